#include "rebel/io.hpp"

#include <cerrno>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "rebel/errors.hpp"

namespace rebel::io {

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  // Try increasing precision until the text parses back to the same bits.
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const std::string& file) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0' || errno == ERANGE)
    throw ValidationError(file + ": non-numeric field '" + s + "'");
  return v;
}

std::uint64_t parse_index(const std::string& s, const std::string& file) {
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0' || errno == ERANGE)
    throw ValidationError(file + ": non-integer field '" + s + "'");
  return v;
}

}  // namespace

void write_path_csv(const ChainPath& path, const std::string& file) {
  std::ofstream out(file);
  if (!out) throw ValidationError("cannot open for writing: " + file);
  for (std::size_t c = 0; c < path.dim; ++c) out << (c ? "," : "") << "x" << (c + 1);
  out << "\n";
  for (std::size_t i = 0; i < path.length(); ++i) {
    const auto s = path.state(i);
    for (std::size_t c = 0; c < path.dim; ++c)
      out << (c ? "," : "") << format_double(s[c]);
    out << "\n";
  }
  if (!out) throw ValidationError("write failed: " + file);
}

ChainPath read_path_csv(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ValidationError("cannot open: " + file);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(file + ": missing header");
  const auto header = split_fields(line);
  ChainPath path;
  path.dim = header.size();
  path.origin = file;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string expect = "x" + std::to_string(c + 1);
    if (header[c] != expect)
      throw ValidationError(file + ": expected header field '" + expect + "', got '" +
                            header[c] + "'");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != path.dim)
      throw ValidationError(file + ": ragged row with " + std::to_string(fields.size()) +
                            " fields");
    for (const auto& f : fields) path.data.push_back(parse_double(f, file));
  }
  return path;
}

void write_blocks_csv(const BlockPartition& partition, const std::string& file) {
  std::ofstream out(file);
  if (!out) throw ValidationError("cannot open for writing: " + file);
  out << "block,start,end,length\n";
  for (std::size_t b = 0; b < partition.blocks.size(); ++b) {
    const Block& blk = partition.blocks[b];
    out << b << "," << (blk.begin + 1) << "," << blk.end << "," << blk.size() << "\n";
  }
  if (!out) throw ValidationError("write failed: " + file);
}

BlockPartition read_blocks_csv(const std::string& file, std::size_t n) {
  std::ifstream in(file);
  if (!in) throw ValidationError("cannot open: " + file);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(file + ": missing header");
  std::vector<Block> blocks;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 4) throw ValidationError(file + ": expected 4 fields per row");
    const std::uint64_t index = parse_index(fields[0], file);
    const std::uint64_t start = parse_index(fields[1], file);
    const std::uint64_t end = parse_index(fields[2], file);
    const std::uint64_t len = parse_index(fields[3], file);
    if (index != blocks.size()) throw ValidationError(file + ": block indices not contiguous");
    if (start + len != end + 1) throw ValidationError(file + ": inconsistent block row");
    blocks.push_back({start - 1, end});
  }
  if (blocks.size() < 2) throw ValidationError(file + ": needs at least 2 blocks");
  BlockPartition p;
  p.blocks = std::move(blocks);
  p.complete_count = p.blocks.size() - 2;
  for (std::size_t b = 0; b + 1 < p.blocks.size(); ++b)
    p.regeneration_times.push_back(p.blocks[b].end);
  check_partition(p, n);
  return p;
}

std::string to_json(const std::vector<double>& values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_double(values[i]);
  }
  out += "]";
  return out;
}

}  // namespace rebel::io
