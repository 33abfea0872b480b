#include "rebel/el.hpp"

#include <cmath>
#include <limits>
#include <json.hpp>

#include "rebel/errors.hpp"

namespace rebel {

MomentModel mean_model(int d) {
  MomentModel mm;
  mm.p = d;
  mm.r = d;
  mm.name = "mean";
  mm.mean_like = true;
  mm.g = [d](std::span<const double> x, double* out) {
    for (int c = 0; c < d; ++c) out[c] = x[c];
  };
  mm.m = [d](std::span<const double> x, std::span<const double> th, double* out) {
    for (int c = 0; c < d; ++c) out[c] = x[c] - th[c];
  };
  mm.jacobian = [d](std::span<const double>, std::span<const double>, double* jac) {
    for (int i = 0; i < d * d; ++i) jac[i] = 0.0;
    for (int c = 0; c < d; ++c) jac[c * d + c] = -1.0;
  };
  return mm;
}

MomentModel indicator_ge_model(double threshold) {
  MomentModel mm;
  mm.p = 1;
  mm.r = 1;
  mm.name = "indicator_ge";
  mm.mean_like = true;
  mm.g = [threshold](std::span<const double> x, double* out) {
    out[0] = (x[0] >= threshold) ? 1.0 : 0.0;
  };
  mm.m = [threshold](std::span<const double> x, std::span<const double> th, double* out) {
    out[0] = ((x[0] >= threshold) ? 1.0 : 0.0) - th[0];
  };
  mm.jacobian = [](std::span<const double>, std::span<const double>, double* jac) {
    jac[0] = -1.0;
  };
  return mm;
}

MomentModel poly_model(const std::vector<int>& exponents) {
  if (exponents.empty()) throw ValidationError("poly_model: no exponents");
  MomentModel mm;
  mm.p = static_cast<int>(exponents.size());
  mm.r = mm.p;
  mm.name = "poly";
  mm.mean_like = true;
  mm.g = [exponents](std::span<const double> x, double* out) {
    for (std::size_t j = 0; j < exponents.size(); ++j)
      out[j] = std::pow(x[0], exponents[j]);
  };
  mm.m = [exponents](std::span<const double> x, std::span<const double> th, double* out) {
    for (std::size_t j = 0; j < exponents.size(); ++j)
      out[j] = std::pow(x[0], exponents[j]) - th[j];
  };
  const int p = mm.p;
  mm.jacobian = [p](std::span<const double>, std::span<const double>, double* jac) {
    for (int i = 0; i < p * p; ++i) jac[i] = 0.0;
    for (int c = 0; c < p; ++c) jac[c * p + c] = -1.0;
  };
  return mm;
}

Eigen::MatrixXd block_moments(const ChainPath& path, const BlockPartition& partition,
                              const MomentModel& model, std::span<const double> theta) {
  if (static_cast<int>(theta.size()) != model.p)
    throw ValidationError("block_moments: theta dimension mismatch");
  const std::size_t l = partition.complete_count;
  Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(l, model.r);
  std::vector<double> buf(model.r);
  for (std::size_t j = 0; j < l; ++j) {
    const Block& b = partition.complete(j);
    for (std::size_t i = b.begin; i < b.end; ++i) {
      model.m(path.state(i), theta, buf.data());
      for (int c = 0; c < model.r; ++c) Y(j, c) += buf[c];
    }
  }
  return Y;
}

const char* to_string(ELStatus s) {
  switch (s) {
    case ELStatus::Converged: return "Converged";
    case ELStatus::Unbounded: return "Unbounded";
    case ELStatus::NotEnoughBlocks: return "NotEnoughBlocks";
  }
  return "?";
}

ELSolution el_ratio(const Eigen::MatrixXd& Y) {
  const Eigen::Index l = Y.rows();
  const Eigen::Index r = Y.cols();
  ELSolution sol;
  sol.lambda = Eigen::VectorXd::Zero(r);
  if (l < 1 || r > l) {
    sol.status = ELStatus::NotEnoughBlocks;
    return sol;
  }
  if (r == 1) {
    // Exact test: zero must lie in the interior of the hull unless all
    // moments vanish.
    const double ymin = Y.minCoeff();
    const double ymax = Y.maxCoeff();
    if (ymin > 0.0 || ymax < 0.0) {
      sol.status = ELStatus::Unbounded;
      sol.ratio = std::numeric_limits<double>::infinity();
      return sol;
    }
  }

  constexpr double kDomainFloor = 1e-10;
  constexpr double kGradTol = 1e-10;
  constexpr double kArmijo = 1e-4;
  constexpr int kMaxIter = 100;

  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(r);
  Eigen::VectorXd w = Eigen::VectorXd::Ones(l);  // 1 + Y lambda
  double f = 0.0;
  double best_grad = std::numeric_limits<double>::infinity();
  int stale = 0;  // iterations since the gradient norm last improved

  const auto objective = [&](const Eigen::VectorXd& lam, Eigen::VectorXd& wout) {
    wout.noalias() = Y * lam;
    double v = 0.0;
    for (Eigen::Index j = 0; j < l; ++j) v += std::log1p(wout(j));
    wout.array() += 1.0;
    return v;
  };

  for (int iter = 1; iter <= kMaxIter; ++iter) {
    sol.iterations = iter;
    const Eigen::VectorXd inv_w = w.cwiseInverse();
    const Eigen::VectorXd grad = Y.transpose() * inv_w;
    const Eigen::MatrixXd h =
        Y.transpose() * inv_w.array().square().matrix().asDiagonal() * Y;
    Eigen::VectorXd dir = h.ldlt().solve(grad);
    if (!dir.allFinite()) dir = grad;  // fall back to steepest ascent

    const double gnorm = grad.norm();
    const double decrement = std::sqrt(std::max(grad.dot(dir), 0.0));
    if (gnorm < kGradTol || decrement < 1e-12 * (1.0 + std::fabs(f))) {
      sol.status = ELStatus::Converged;
      sol.ratio = std::max(f, 0.0);
      sol.lambda = lambda;
      sol.weights = (inv_w / static_cast<double>(l));
      return sol;
    }
    if (gnorm < best_grad * (1.0 - 1e-12)) {
      best_grad = gnorm;
      stale = 0;
    } else {
      ++stale;
    }

    // Backtracking: stay inside the domain, then require Armijo ascent.
    double t = 1.0;
    Eigen::VectorXd cand_w(l);
    Eigen::VectorXd cand(r);
    double cand_f = 0.0;
    bool accepted = false;
    const double slope = grad.dot(dir);
    for (int halving = 0; halving < 80; ++halving) {
      cand = lambda + t * dir;
      cand_w.noalias() = Y * cand;
      if (cand_w.minCoeff() > -1.0 + kDomainFloor) {
        cand_f = objective(cand, cand_w);
        if (cand_f >= f + kArmijo * t * slope) {
          accepted = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!accepted) break;  // no usable step; classify below
    const bool ascended = cand_f > f;
    lambda.swap(cand);
    w.swap(cand_w);
    f = cand_f;

    if (lambda.norm() > 1e8 || (ascended && stale >= 50)) {
      sol.status = ELStatus::Unbounded;
      sol.ratio = std::numeric_limits<double>::infinity();
      sol.lambda = lambda;
      return sol;
    }
  }
  // Budget exhausted: a bounded optimum would have met the decrement test, so
  // classify by how small the gradient got.
  const Eigen::VectorXd grad = Y.transpose() * w.cwiseInverse();
  const double scale = std::max(1.0, Y.rowwise().norm().mean());
  if (grad.norm() < 1e-6 * scale * static_cast<double>(l)) {
    sol.status = ELStatus::Converged;
    sol.ratio = std::max(f, 0.0);
    sol.lambda = lambda;
    sol.weights = (w.cwiseInverse() / static_cast<double>(l));
  } else {
    sol.status = ELStatus::Unbounded;
    sol.ratio = std::numeric_limits<double>::infinity();
    sol.lambda = lambda;
  }
  return sol;
}

double self_normalized_stat(const Eigen::MatrixXd& Y) {
  const Eigen::Index l = Y.rows();
  const Eigen::Index r = Y.cols();
  if (l < 1) throw NotEnoughBlocksError("self_normalized_stat: no blocks");
  const Eigen::VectorXd ybar = Y.colwise().mean();
  Eigen::MatrixXd s2 = (Y.transpose() * Y) / static_cast<double>(l);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(s2);
  if (lu.rank() < r)
    throw SingularVarianceError("self_normalized_stat: singular second moment matrix");
  return static_cast<double>(l) * ybar.dot(lu.solve(ybar));
}

std::string to_json(const ELSolution& s) {
  nlohmann::json j;
  j["ratio"] = std::isinf(s.ratio) ? "inf" : nlohmann::json(s.ratio);
  j["status"] = to_string(s.status);
  j["iterations"] = s.iterations;
  j["lambda"] = std::vector<double>(s.lambda.data(), s.lambda.data() + s.lambda.size());
  j["weights"] = std::vector<double>(s.weights.data(), s.weights.data() + s.weights.size());
  return j.dump();
}

}  // namespace rebel
