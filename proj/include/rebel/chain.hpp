#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace rebel {

// A finite trajectory of a chain with states in R^d, stored row-major.
// Observation times are 1-based in all user-facing indices (CSV, renewal
// times); in-memory access is 0-based through state(i).
struct ChainPath {
  std::size_t dim = 1;
  std::vector<double> data;  // length() * dim values
  std::string origin;        // free-form provenance note (model kind, file name)

  std::size_t length() const { return dim == 0 ? 0 : data.size() / dim; }

  std::span<const double> state(std::size_t i) const {
    return {data.data() + i * dim, dim};
  }

  double scalar(std::size_t i) const { return data[i * dim]; }

  void append(std::span<const double> x) { data.insert(data.end(), x.begin(), x.end()); }
};

// Half-open 0-based index range [begin, end) into a path. Empty iff begin == end.
struct Block {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool empty() const { return begin == end; }
};

// Renewal-based decomposition of a path. blocks always holds the leading
// partial block, the complete blocks, and the trailing partial block, in
// order, so blocks.size() == complete_count + 2 and the complete blocks are
// blocks[1] .. blocks[complete_count].
struct BlockPartition {
  std::vector<std::size_t> regeneration_times;  // 1-based, strictly increasing
  std::vector<Block> blocks;
  std::size_t complete_count = 0;

  // Diagnostics: filled by the approximate splitter, zero for atomic chains.
  std::size_t visits = 0;           // eligible small-set visits observed
  std::size_t clamped_params = 0;   // Bernoulli parameters truncated to 1

  const Block& complete(std::size_t j) const { return blocks[j + 1]; }
};

// Throws ValidationError unless the blocks tile [0, n) and agree with the
// renewal times; used by tests and by the CSV reader.
void check_partition(const BlockPartition& p, std::size_t n);

// Builds the partition cut at the given 1-based renewal times.
BlockPartition partition_from_times(std::vector<std::size_t> times, std::size_t n);

// Embeds the last `order` states into each observation:
// state i of the result is (X_{i+order-1}, X_{i+order-2}, ..., X_i) flattened,
// most recent first, so the result has length n - order + 1 and dim d * order.
// stack(path, 1) returns the path unchanged.
ChainPath stack(const ChainPath& path, std::size_t order);

}  // namespace rebel
