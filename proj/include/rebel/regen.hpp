#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rebel/chain.hpp"
#include "rebel/errors.hpp"

namespace rebel {

// Cuts the path at every visit to the atom. The predicate receives one state;
// a visit at 1-based time t closes a block at t. Throws NoRegenerationError
// if the atom is never visited.
BlockPartition atomic_blocks(const ChainPath& path,
                             const std::function<bool(std::span<const double>)>& atom);

// Convenience predicate: exact equality of coordinate 0 with `value`.
std::function<bool(std::span<const double>)> atom_equals(double value);

// Nadaraya-Watson estimate of the one-step transition density,
//   p(x, y) = sum_i K_h(x - X_i) K_h(y - X_{i+1}) / sum_i K_h(x - X_i),
// with product Gaussian kernels and one bandwidth per coordinate. Evaluations
// are floored at kFloor so downstream ratios stay finite. Instances are
// immutable after construction and safe to share across threads.
class TransitionDensity {
public:
  static constexpr double kFloor = 1e-12;

  // bandwidth: one positive entry per coordinate; pass {} to use the
  // normal-reference rule 1.06 * sd * n^(-1/5) per coordinate.
  // Throws DegenerateDensityError when a coordinate has zero spread (auto
  // bandwidth) or the path is constant.
  TransitionDensity(const ChainPath& path, std::vector<double> bandwidth = {});

  // Synthetic density for tests: evaluate() delegates to fn (still floored).
  static TransitionDensity custom(std::size_t dim,
                                  std::function<double(std::span<const double>,
                                                       std::span<const double>)> fn);

  double evaluate(std::span<const double> x, std::span<const double> y) const;

  // p(x_r, y_c) for every row of xs and ys (points in rows, dim columns).
  Eigen::MatrixXd grid_values(const Eigen::MatrixXd& xs, const Eigen::MatrixXd& ys) const;

  // p(X_i, X_{i+1}) for each 0-based i in `indices` (each must be < n - 1).
  // `path` must be the path the density was estimated from; custom densities
  // evaluate fn on its states.
  std::vector<double> pair_values(const ChainPath& path,
                                  const std::vector<std::size_t>& indices) const;

  std::size_t dim() const { return dim_; }
  const std::vector<double>& bandwidth() const { return bandwidth_; }
  bool is_custom() const { return static_cast<bool>(custom_fn_); }

private:
  TransitionDensity() = default;

  std::size_t dim_ = 1;
  std::vector<double> bandwidth_;
  Eigen::MatrixXd states_;  // n rows, dim columns (empty for custom densities)
  std::function<double(std::span<const double>, std::span<const double>)> custom_fn_;

  Eigen::VectorXd kernel_row(std::span<const double> x) const;
};

// Axis-aligned candidate box; one (lo, hi) interval per coordinate.
struct CandidateBox {
  std::vector<double> lo, hi;
};

// A chosen small set: box, minorization constant, and the uniform minorizing
// density on the box (optionally overridden for tests).
struct SmallSet {
  std::vector<double> lo, hi;
  double delta = 0.0;
  int grid_per_axis = 0;  // resolution used when delta was computed
  double expected_regenerations = 0.0;
  std::function<double(std::span<const double>)> custom_phi;  // tests only

  bool contains(std::span<const double> x) const;
  double volume() const;
  double phi(std::span<const double> y) const;  // 0 outside the box
  std::string to_json() const;
};

// Evaluation grid with `per_axis` points per coordinate spanning the box
// (endpoints included); rows are points.
Eigen::MatrixXd box_grid(const CandidateBox& box, int per_axis);

// Default per-axis grid count for dimension d, derived from a fixed
// 2500-points-per-side budget (50 per axis for scalar chains).
int default_grid_per_axis(std::size_t dim);

struct SmallSetOptions {
  int grid_per_axis = 0;          // 0: default_grid_per_axis(dim)
  double min_expected = 2.0;      // viability threshold on expected renewals
};

// Scores every candidate box: delta = vol(S) * min over the grid on S x S of
// p(x, y), expected renewals = sum over visits i (X_i in S) of
// delta * phi(X_{i+1}) / p(X_i, X_{i+1}). Returns the candidate with the
// highest expected renewal count (ties: smaller volume). Candidates visited
// fewer than twice are skipped; throws NoViableSmallSetError when nothing
// usable remains.
SmallSet select_small_set(const ChainPath& path, const TransitionDensity& density,
                          const std::vector<CandidateBox>& candidates,
                          const SmallSetOptions& options = {});

// Randomized splitting: at each visit X_i in S with i < n, a renewal occurs
// with probability delta * phi(X_{i+1}) / p(X_i, X_{i+1}) (clamped to [0, 1];
// clamps are counted). One uniform is drawn per eligible visit in path order,
// from a stream fully determined by `seed`. Throws NoRegenerationError when
// fewer than 2 renewals occur.
BlockPartition split_chain(const ChainPath& path, const SmallSet& set,
                           const TransitionDensity& density, std::uint64_t seed);

// Order-selection heuristic context. The moment g acts on the original
// (unstacked) state; at order k it is applied to the most recent d coordinates
// of the stacked state and centered at the truncated plug-in estimate.
struct OrderContext {
  std::function<double(std::span<const double>)> moment_g;
  std::vector<CandidateBox> candidates;  // on the original state; empty: quantile boxes
  std::uint64_t seed = 1;
  int grid_per_axis = 0;                 // 0: dimension-based default per k
  double level = 0.05;                   // t-test level
  std::size_t min_blocks = 10;
};

struct OrderResult {
  int order = 1;
  bool exhausted = false;  // no k accepted; `order` is max_k
  std::vector<OrderTestRecord> trace;
};

// For k = 1..max_k: stack, estimate the density, select a small set, split,
// and t-test the lag-1 regression coefficient of the block moments. Returns
// the first k where independence is not rejected at `level`.
OrderResult estimate_order(const ChainPath& path, int max_k, const OrderContext& ctx);

// Quantile-spanning default candidate boxes on the (unstacked) sample:
// central f-fraction intervals for f = 0.1, 0.2, ..., 0.8.
std::vector<CandidateBox> quantile_candidates(const ChainPath& path);

// Expands a per-original-coordinate interval candidate to a stacked box.
CandidateBox repeat_interval(double lo, double hi, std::size_t dim);

}  // namespace rebel
