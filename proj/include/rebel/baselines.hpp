#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "rebel/chain.hpp"
#include "rebel/el.hpp"

namespace rebel {

// Fixed-length block EL: deterministic non-overlapping blocks of length
// floor(n^(1/3)) (tail observations dropped), the usual weak-dependence
// default. Pass block_length to override.
std::size_t bel_block_length(std::size_t n);
Eigen::MatrixXd bel_block_moments(const ChainPath& path, const MomentModel& model,
                                  std::span<const double> theta,
                                  std::size_t block_length = 0);
ELSolution bel_ratio(const ChainPath& path, const MomentModel& model,
                     std::span<const double> theta, std::size_t block_length = 0);

// Plain sample mean of g over the whole path.
std::vector<double> mean_estimate(const ChainPath& path, const MomentModel& model);

// Mean of g over the complete regeneration blocks only.
std::vector<double> trunc_estimate(const ChainPath& path,
                                   const BlockPartition& partition,
                                   const MomentModel& model);

// Contiguous segment covered by the complete blocks, as its own path.
ChainPath complete_segment(const ChainPath& path, const BlockPartition& partition);

// Variance of the sample mean of g under the non-overlapping block bootstrap:
// resample floor(n / L) blocks of length L with replacement, recompute the
// mean, take the empirical variance over n_boot resamples.
double bootstrap_variance(const ChainPath& path,
                          const std::function<double(std::span<const double>)>& g,
                          std::size_t block_length, int n_boot, std::uint64_t seed);

}  // namespace rebel
