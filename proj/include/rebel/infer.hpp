#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rebel/chain.hpp"
#include "rebel/el.hpp"

namespace rebel {

// Maximum empirical likelihood estimate: argmin over theta of the block EL
// ratio. Mean-like models use the closed-form block-ratio mean; everything
// else runs a Nelder-Mead search from theta_init (budget = max objective
// evaluations, 0 picks a dimension-based default). Throws
// EstimateNotConvergedError when the budget runs out.
struct MeleResult {
  std::vector<double> theta;
  double ratio = 0.0;  // EL ratio at theta
  int evaluations = 0;
};
MeleResult mele(const ChainPath& path, const BlockPartition& partition,
                const MomentModel& model, std::span<const double> theta_init,
                int budget = 0);

// Plug-in estimates of the asymptotic objects: Sigma (r x r) from the
// complete-block second moments scaled by total block length, D (r x p) as the
// average moment jacobian (finite differences when the model lacks one), and
// the estimator covariance (D' Sigma^-1 D)^-1.
struct AsymptoticEstimates {
  Eigen::MatrixXd sigma;
  Eigen::MatrixXd d;
  Eigen::MatrixXd covariance;
  double total_block_length = 0.0;

  // Standard error of coordinate c of the estimate at sample size n.
  double se(std::size_t c, std::size_t n) const;
};
AsymptoticEstimates asymptotic_estimates(const ChainPath& path,
                                         const BlockPartition& partition,
                                         const MomentModel& model,
                                         std::span<const double> theta);

// Over-identification test: 2 r_n(theta_tilde) against chi-square r - p.
struct OveridTest {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
};
OveridTest overid_test(const ChainPath& path, const BlockPartition& partition,
                       const MomentModel& model, std::span<const double> theta_init = {});

// Estimation-adjusted statistic 2 r_n(theta) - 2 r_n(theta_tilde).
double w1_statistic(const ChainPath& path, const BlockPartition& partition,
                    const MomentModel& model, std::span<const double> theta);

// Profile statistic for the first q coordinates:
// 2 (inf_beta r_n((gamma0, beta)) - r_n(theta_tilde)).
double w2_statistic(const ChainPath& path, const BlockPartition& partition,
                    const MomentModel& model, std::span<const double> gamma0,
                    std::span<const double> theta_init);

enum class CIKind { PlainRatio, Corrected, Subvector };

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.95;
  CIKind kind = CIKind::PlainRatio;
  bool empty = false;
  double center = 0.0;  // statistic minimizer the bisection started from
  std::string to_json() const;
};

struct CIOptions {
  double level = 0.95;
  CIKind kind = CIKind::PlainRatio;
  double statistic_tolerance = 1e-6;
  double bracket_se_multiple = 10.0;
  int max_widenings = 3;
  int mele_budget = 0;
};

// Scalar-parameter confidence interval by bisection on the chosen statistic
// against the chi-square(1) cutoff. The bracket starts at the minimizer
// plus/minus bracket_se_multiple standard errors and doubles when needed.
ConfidenceInterval confidence_interval(const ChainPath& path,
                                       const BlockPartition& partition,
                                       const MomentModel& model,
                                       const CIOptions& options = {});

// Bisection core shared with the fixed-block and Gaussian baselines: finds
// where `statistic` crosses `cutoff` on each side of `center`. half_width is
// the initial bracket half width.
ConfidenceInterval bisect_interval(const std::function<double(double)>& statistic,
                                   double cutoff, double center, double half_width,
                                   const CIOptions& options);

// P(chi-square_p(ncp = delta' Sigma^-1 delta) > chi-square_{p, 1 - alpha}),
// the large-sample rejection probability under a local alternative.
double predicted_power(std::span<const double> delta, const Eigen::MatrixXd& sigma,
                       double alpha);

// Derivative-free simplex minimizer used for the outer EL optimizations.
struct SimplexResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};
SimplexResult minimize_simplex(const std::function<double(const Eigen::VectorXd&)>& f,
                               const Eigen::VectorXd& x0, double step, int budget);

}  // namespace rebel
