#include "rebel/chain.hpp"

#include "rebel/errors.hpp"

namespace rebel {

void check_partition(const BlockPartition& p, std::size_t n) {
  if (p.blocks.size() != p.complete_count + 2)
    throw ValidationError("partition: block count does not match complete_count");
  if (p.regeneration_times.size() != p.complete_count + 1)
    throw ValidationError("partition: renewal count does not match complete_count");
  std::size_t cursor = 0;
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    if (p.blocks[b].begin != cursor)
      throw ValidationError("partition: blocks do not tile the path");
    if (p.blocks[b].end < p.blocks[b].begin)
      throw ValidationError("partition: negative block");
    cursor = p.blocks[b].end;
  }
  if (cursor != n) throw ValidationError("partition: blocks do not cover the path");
  std::size_t prev = 0;
  for (std::size_t i = 0; i < p.regeneration_times.size(); ++i) {
    const std::size_t t = p.regeneration_times[i];
    if (t < 1 || t > n || t <= prev)
      throw ValidationError("partition: renewal times not strictly increasing in [1, n]");
    // Renewal i closes block i: blocks[i] ends at index t (exclusive).
    if (p.blocks[i].end != t)
      throw ValidationError("partition: block boundaries disagree with renewal times");
    prev = t;
  }
}

BlockPartition partition_from_times(std::vector<std::size_t> times, std::size_t n) {
  BlockPartition p;
  p.regeneration_times = std::move(times);
  std::size_t cursor = 0;
  for (std::size_t t : p.regeneration_times) {
    p.blocks.push_back({cursor, t});
    cursor = t;
  }
  p.blocks.push_back({cursor, n});
  p.complete_count = p.regeneration_times.empty() ? 0 : p.regeneration_times.size() - 1;
  check_partition(p, n);
  return p;
}

ChainPath stack(const ChainPath& path, std::size_t order) {
  if (order == 0) throw ValidationError("stack: order must be >= 1");
  const std::size_t n = path.length();
  if (order > n) throw ValidationError("stack: order exceeds path length");
  if (order == 1) return path;
  ChainPath out;
  out.dim = path.dim * order;
  out.origin = path.origin;
  out.data.reserve((n - order + 1) * out.dim);
  for (std::size_t i = order - 1; i < n; ++i) {
    // Most recent first: X_i, X_{i-1}, ..., X_{i-order+1}.
    for (std::size_t j = 0; j < order; ++j) {
      const auto s = path.state(i - j);
      out.data.insert(out.data.end(), s.begin(), s.end());
    }
  }
  return out;
}

}  // namespace rebel
