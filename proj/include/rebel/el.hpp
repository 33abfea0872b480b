#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rebel/chain.hpp"

namespace rebel {

// Estimating-equation model: m(x, theta) in R^r, theta in R^p, r >= p.
// The optional jacobian fills d m / d theta (r x p, row-major by moment).
// mean_like marks models of the form m(x, theta) = g(x) - theta (r == p),
// which admit closed-form minimizers; g fills the r-vector g(x).
struct MomentModel {
  int p = 1;
  int r = 1;
  std::function<void(std::span<const double>, std::span<const double>, double*)> m;
  std::function<void(std::span<const double>, std::span<const double>, double*)> jacobian;
  bool mean_like = false;
  std::function<void(std::span<const double>, double*)> g;
  std::string name;
};

// m(x, theta) = x - theta over the first d coordinates.
MomentModel mean_model(int d = 1);
// m(x, theta) = 1{x_1 >= threshold} - theta.
MomentModel indicator_ge_model(double threshold);
// m_j(x, theta) = x_1^{e_j} - theta_j for each exponent.
MomentModel poly_model(const std::vector<int>& exponents);

// Per-block moment sums M(B_j, theta) over the complete blocks only:
// row j is sum_{i in B_j} m(X_i, theta). Shape: complete_count x r.
Eigen::MatrixXd block_moments(const ChainPath& path, const BlockPartition& partition,
                              const MomentModel& model, std::span<const double> theta);

enum class ELStatus { Converged, Unbounded, NotEnoughBlocks };

const char* to_string(ELStatus s);

struct ELSolution {
  double ratio = 0.0;        // sup_lambda sum_j log(1 + lambda' Y_j); +inf if Unbounded
  Eigen::VectorXd lambda;    // multiplier at the optimum (last iterate if Unbounded)
  Eigen::VectorXd weights;   // implied probabilities q_j, empty unless Converged
  ELStatus status = ELStatus::Converged;
  int iterations = 0;
};

// Empirical likelihood ratio for mean zero of the rows of Y (one row per
// block). Damped Newton on the concave dual with backtracking line search;
// see ELSolution for the outcome. Zero rows or r > l report NotEnoughBlocks;
// an empty-interior convex hull reports Unbounded with an infinite ratio.
ELSolution el_ratio(const Eigen::MatrixXd& Y);

// First-order approximation l * Ybar' S^-2 Ybar with S^2 = (1/l) sum Y_j Y_j'.
// Throws SingularVarianceError when S^2 is rank deficient.
double self_normalized_stat(const Eigen::MatrixXd& Y);

std::string to_json(const ELSolution& s);

}  // namespace rebel
