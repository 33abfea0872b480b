#include "rebel/baselines.hpp"

#include <cmath>
#include <string>

#include "rebel/errors.hpp"
#include "rebel/rng.hpp"
#include "rebel/stats.hpp"

namespace rebel {

std::size_t bel_block_length(std::size_t n) {
  // The small nudge keeps exact cubes (1000^(1/3) and friends) from landing
  // just under the integer.
  const auto len = static_cast<std::size_t>(
      std::floor(std::cbrt(static_cast<double>(n)) + 1e-9));
  return len == 0 ? 1 : len;
}

Eigen::MatrixXd bel_block_moments(const ChainPath& path, const MomentModel& model,
                                  std::span<const double> theta,
                                  std::size_t block_length) {
  if (theta.size() != static_cast<std::size_t>(model.p))
    throw ValidationError("bel_block_moments: theta has dimension " +
                          std::to_string(theta.size()) + ", model wants " +
                          std::to_string(model.p));
  const std::size_t n = path.length();
  const std::size_t len = block_length == 0 ? bel_block_length(n) : block_length;
  const std::size_t count = n / len;
  if (count == 0)
    throw NotEnoughBlocksError("bel_block_moments: path of length " +
                               std::to_string(n) + " holds no block of length " +
                               std::to_string(len));
  const auto r = static_cast<std::size_t>(model.r);
  Eigen::MatrixXd y(static_cast<Eigen::Index>(count),
                    static_cast<Eigen::Index>(r));
  std::vector<double> m(r);
  for (std::size_t j = 0; j < count; ++j) {
    y.row(static_cast<Eigen::Index>(j)).setZero();
    for (std::size_t i = j * len; i < (j + 1) * len; ++i) {
      model.m(path.state(i), theta, m.data());
      for (std::size_t c = 0; c < r; ++c)
        y(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c)) += m[c];
    }
  }
  return y;
}

ELSolution bel_ratio(const ChainPath& path, const MomentModel& model,
                     std::span<const double> theta, std::size_t block_length) {
  return el_ratio(bel_block_moments(path, model, theta, block_length));
}

std::vector<double> mean_estimate(const ChainPath& path, const MomentModel& model) {
  if (!model.g)
    throw ValidationError("mean_estimate: model '" + model.name +
                          "' has no moment function g");
  const std::size_t n = path.length();
  if (n == 0) throw ValidationError("mean_estimate: empty path");
  const auto r = static_cast<std::size_t>(model.r);
  std::vector<double> sum(r, 0.0), gx(r);
  for (std::size_t i = 0; i < n; ++i) {
    model.g(path.state(i), gx.data());
    for (std::size_t c = 0; c < r; ++c) sum[c] += gx[c];
  }
  for (double& s : sum) s /= static_cast<double>(n);
  return sum;
}

std::vector<double> trunc_estimate(const ChainPath& path,
                                   const BlockPartition& partition,
                                   const MomentModel& model) {
  if (!model.g)
    throw ValidationError("trunc_estimate: model '" + model.name +
                          "' has no moment function g");
  if (partition.complete_count == 0)
    throw NotEnoughBlocksError("trunc_estimate: no complete blocks");
  const auto r = static_cast<std::size_t>(model.r);
  std::vector<double> sum(r, 0.0), gx(r);
  double total_len = 0.0;
  for (std::size_t j = 0; j < partition.complete_count; ++j) {
    const Block b = partition.complete(j);
    for (std::size_t i = b.begin; i < b.end; ++i) {
      model.g(path.state(i), gx.data());
      for (std::size_t c = 0; c < r; ++c) sum[c] += gx[c];
    }
    total_len += static_cast<double>(b.end - b.begin);
  }
  for (double& s : sum) s /= total_len;
  return sum;
}

ChainPath complete_segment(const ChainPath& path, const BlockPartition& partition) {
  if (partition.complete_count == 0)
    throw NotEnoughBlocksError("complete_segment: no complete blocks");
  const std::size_t begin = partition.complete(0).begin;
  const std::size_t end = partition.complete(partition.complete_count - 1).end;
  ChainPath segment;
  segment.dim = path.dim;
  segment.origin = path.origin + " (complete blocks)";
  segment.data.assign(path.data.begin() + static_cast<std::ptrdiff_t>(begin * path.dim),
                      path.data.begin() + static_cast<std::ptrdiff_t>(end * path.dim));
  return segment;
}

double bootstrap_variance(const ChainPath& path,
                          const std::function<double(std::span<const double>)>& g,
                          std::size_t block_length, int n_boot, std::uint64_t seed) {
  const std::size_t n = path.length();
  if (block_length == 0) block_length = bel_block_length(n);
  const std::size_t count = n / block_length;
  if (count < 2)
    throw NotEnoughBlocksError("bootstrap_variance: need at least 2 blocks, got " +
                               std::to_string(count));
  if (n_boot < 2)
    throw ValidationError("bootstrap_variance: n_boot must be at least 2");

  std::vector<double> block_sum(count, 0.0);
  for (std::size_t j = 0; j < count; ++j)
    for (std::size_t i = j * block_length; i < (j + 1) * block_length; ++i)
      block_sum[j] += g(path.state(i));

  const double used = static_cast<double>(count * block_length);
  SplitRng rng(seed);
  std::vector<double> means(static_cast<std::size_t>(n_boot));
  for (auto& mean : means) {
    double total = 0.0;
    for (std::size_t j = 0; j < count; ++j) {
      const auto pick = static_cast<std::size_t>(rng.next_uniform() *
                                                 static_cast<double>(count));
      total += block_sum[pick < count ? pick : count - 1];
    }
    mean = total / used;
  }
  return stats::sample_variance(means);
}

}  // namespace rebel
