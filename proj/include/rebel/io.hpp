#pragma once

#include <string>
#include <vector>

#include "rebel/chain.hpp"

namespace rebel::io {

// Path CSV: header "x1,...,xd", one observation per row, '.' decimal point,
// full round-trip precision. Reading rejects ragged rows and non-numeric
// fields; an empty file (header only) gives an empty path.
void write_path_csv(const ChainPath& path, const std::string& file);
ChainPath read_path_csv(const std::string& file);

// Block CSV: header "block,start,end,length" with 1-based inclusive start/end
// over all blocks in order (leading partial, complete, trailing partial).
// Empty blocks have length 0 and start == end + 1.
void write_blocks_csv(const BlockPartition& partition, const std::string& file);
// n is the path length; the reconstruction is validated against it.
BlockPartition read_blocks_csv(const std::string& file, std::size_t n);

std::string format_double(double v);  // shortest representation that round-trips

std::string to_json(const std::vector<double>& values);  // JSON array literal

}  // namespace rebel::io
