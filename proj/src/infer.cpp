#include "rebel/infer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rebel/errors.hpp"
#include "rebel/io.hpp"
#include "rebel/stats.hpp"

namespace rebel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double ratio_at(const ChainPath& path, const BlockPartition& partition,
                const MomentModel& model, std::span<const double> theta) {
  const Eigen::MatrixXd y = block_moments(path, partition, model, theta);
  return el_ratio(y).ratio;
}

std::vector<double> to_vector(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

SimplexResult minimize_simplex(const std::function<double(const Eigen::VectorXd&)>& f,
                               const Eigen::VectorXd& x0, double step, int budget) {
  const int n = static_cast<int>(x0.size());
  SimplexResult result;
  if (n == 0) {
    result.x = x0;
    result.value = f(x0);
    result.evaluations = 1;
    result.converged = true;
    return result;
  }

  int evals = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++evals;
    const double v = f(x);
    return std::isnan(v) ? kInf : v;
  };

  std::vector<Eigen::VectorXd> xs(n + 1, x0);
  std::vector<double> fs(n + 1);
  fs[0] = eval(x0);
  for (int i = 0; i < n; ++i) {
    const double h = step * std::max(1.0, std::abs(x0[i]));
    xs[i + 1][i] += h;
    fs[i + 1] = eval(xs[i + 1]);
  }

  std::vector<int> order(n + 1);
  while (evals < budget) {
    for (int i = 0; i <= n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return fs[a] < fs[b]; });
    const int best = order[0];
    const int worst = order[n];
    const int second_worst = order[n - 1];

    const double fbest = fs[best];
    double diameter = 0.0;
    for (int i = 0; i <= n; ++i)
      diameter = std::max(diameter, (xs[i] - xs[best]).lpNorm<Eigen::Infinity>());
    const bool flat = std::isfinite(fs[worst]) &&
                      fs[worst] - fbest <= 1e-10 * (1.0 + std::abs(fbest));
    if (flat && diameter <= 1e-8 * (1.0 + xs[best].lpNorm<Eigen::Infinity>())) {
      result.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i <= n; ++i)
      if (i != worst) centroid += xs[i];
    centroid /= n;

    const Eigen::VectorXd reflected = centroid + (centroid - xs[worst]);
    const double fr = eval(reflected);
    if (fr < fbest) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - xs[worst]);
      const double fe = eval(expanded);
      if (fe < fr) {
        xs[worst] = expanded;
        fs[worst] = fe;
      } else {
        xs[worst] = reflected;
        fs[worst] = fr;
      }
      continue;
    }
    if (fr < fs[second_worst]) {
      xs[worst] = reflected;
      fs[worst] = fr;
      continue;
    }
    // Contraction, outside or inside depending on the reflected value.
    Eigen::VectorXd contracted;
    if (fr < fs[worst])
      contracted = centroid + 0.5 * (reflected - centroid);
    else
      contracted = centroid + 0.5 * (xs[worst] - centroid);
    const double fc = eval(contracted);
    if (fc < std::min(fr, fs[worst])) {
      xs[worst] = contracted;
      fs[worst] = fc;
      continue;
    }
    for (int i = 0; i <= n; ++i) {
      if (i == best) continue;
      xs[i] = xs[best] + 0.5 * (xs[i] - xs[best]);
      fs[i] = eval(xs[i]);
    }
  }

  int best = 0;
  for (int i = 1; i <= n; ++i)
    if (fs[i] < fs[best]) best = i;
  result.x = xs[best];
  result.value = fs[best];
  result.evaluations = evals;
  return result;
}

MeleResult mele(const ChainPath& path, const BlockPartition& partition,
                const MomentModel& model, std::span<const double> theta_init,
                int budget) {
  MeleResult result;
  if (model.mean_like && model.r == model.p && model.g) {
    // Block EL over mean-style moments is minimized exactly at the ratio of
    // block sums, where every moment sum vanishes and lambda = 0.
    Eigen::VectorXd num = Eigen::VectorXd::Zero(model.r);
    Eigen::VectorXd gx(model.r);
    double total_len = 0.0;
    for (std::size_t j = 0; j < partition.complete_count; ++j) {
      const Block b = partition.complete(j);
      for (std::size_t i = b.begin; i < b.end; ++i) {
        model.g(path.state(i), gx.data());
        num += gx;
      }
      total_len += static_cast<double>(b.end - b.begin);
    }
    if (total_len <= 0.0)
      throw NotEnoughBlocksError("mele: no complete blocks");
    const Eigen::VectorXd theta = num / total_len;
    result.theta = to_vector(theta);
    result.ratio = ratio_at(path, partition, model, result.theta);
    result.evaluations = 1;
    return result;
  }

  if (theta_init.size() != static_cast<std::size_t>(model.p))
    throw ValidationError("mele: theta_init has dimension " +
                          std::to_string(theta_init.size()) + ", model wants " +
                          std::to_string(model.p));
  if (budget <= 0) budget = 400 * model.p + 200;

  auto objective = [&](const Eigen::VectorXd& t) {
    return ratio_at(path, partition, model,
                    {t.data(), static_cast<std::size_t>(t.size())});
  };
  Eigen::VectorXd x0 = Eigen::Map<const Eigen::VectorXd>(
      theta_init.data(), static_cast<Eigen::Index>(theta_init.size()));
  SimplexResult first = minimize_simplex(objective, x0, 0.25, budget / 2);
  SimplexResult second =
      minimize_simplex(objective, first.x, 0.05, budget - first.evaluations);
  const SimplexResult& pick = second.value <= first.value ? second : first;
  result.theta = to_vector(pick.x);
  result.ratio = pick.value;
  result.evaluations = first.evaluations + second.evaluations;
  if (!(first.converged || second.converged) || !std::isfinite(pick.value))
    throw EstimateNotConvergedError("mele: simplex search did not converge in " +
                                        std::to_string(result.evaluations) +
                                        " evaluations",
                                    result.theta);
  return result;
}

double AsymptoticEstimates::se(std::size_t c, std::size_t n) const {
  if (static_cast<Eigen::Index>(c) >= covariance.rows())
    throw ValidationError("se: coordinate out of range");
  if (n == 0) throw ValidationError("se: sample size is zero");
  return std::sqrt(covariance(static_cast<Eigen::Index>(c),
                              static_cast<Eigen::Index>(c)) /
                   static_cast<double>(n));
}

AsymptoticEstimates asymptotic_estimates(const ChainPath& path,
                                         const BlockPartition& partition,
                                         const MomentModel& model,
                                         std::span<const double> theta) {
  const auto r = static_cast<std::size_t>(model.r);
  const auto p = static_cast<std::size_t>(model.p);
  const Eigen::MatrixXd y = block_moments(path, partition, model, theta);

  AsymptoticEstimates est;
  est.total_block_length = 0.0;
  for (std::size_t j = 0; j < partition.complete_count; ++j) {
    const Block b = partition.complete(j);
    est.total_block_length += static_cast<double>(b.end - b.begin);
  }
  if (est.total_block_length <= 0.0)
    throw NotEnoughBlocksError("asymptotic_estimates: no complete blocks");
  est.sigma = y.transpose() * y / est.total_block_length;

  Eigen::MatrixXd dsum = Eigen::MatrixXd::Zero(model.r, model.p);
  std::vector<double> jac(r * p);
  std::vector<double> th(theta.begin(), theta.end());
  std::vector<double> mplus(r), mminus(r);
  for (std::size_t j = 0; j < partition.complete_count; ++j) {
    const Block b = partition.complete(j);
    for (std::size_t i = b.begin; i < b.end; ++i) {
      const auto x = path.state(i);
      if (model.jacobian) {
        model.jacobian(x, theta, jac.data());
      } else {
        for (std::size_t k = 0; k < p; ++k) {
          const double h = 1e-6 * std::max(1.0, std::abs(th[k]));
          const double saved = th[k];
          th[k] = saved + h;
          model.m(x, th, mplus.data());
          th[k] = saved - h;
          model.m(x, th, mminus.data());
          th[k] = saved;
          for (std::size_t a = 0; a < r; ++a)
            jac[a * p + k] = (mplus[a] - mminus[a]) / (2.0 * h);
        }
      }
      for (std::size_t a = 0; a < r; ++a)
        for (std::size_t k = 0; k < p; ++k)
          dsum(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(k)) +=
              jac[a * p + k];
    }
  }
  est.d = dsum / est.total_block_length;

  Eigen::LDLT<Eigen::MatrixXd> sigma_ldlt(est.sigma);
  if (sigma_ldlt.info() != Eigen::Success || !sigma_ldlt.isPositive())
    throw SingularVarianceError(
        "asymptotic_estimates: block moment variance is not positive definite");
  const Eigen::MatrixXd sandwich = est.d.transpose() * sigma_ldlt.solve(est.d);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(sandwich);
  if (!lu.isInvertible())
    throw SingularVarianceError("asymptotic_estimates: D' Sigma^-1 D is singular");
  est.covariance = lu.inverse();
  return est;
}

OveridTest overid_test(const ChainPath& path, const BlockPartition& partition,
                       const MomentModel& model, std::span<const double> theta_init) {
  if (model.r == model.p)
    throw DegreesOfFreedomZeroError(
        "overid_test: moment dimension equals parameter dimension");
  const MeleResult fit = mele(path, partition, model, theta_init);
  OveridTest test;
  test.statistic = 2.0 * fit.ratio;
  test.df = model.r - model.p;
  test.p_value = stats::chi2_sf(test.df, test.statistic);
  return test;
}

double w1_statistic(const ChainPath& path, const BlockPartition& partition,
                    const MomentModel& model, std::span<const double> theta) {
  const MeleResult fit = mele(path, partition, model, theta);
  const double at_theta = ratio_at(path, partition, model, theta);
  return std::max(0.0, 2.0 * (at_theta - fit.ratio));
}

double w2_statistic(const ChainPath& path, const BlockPartition& partition,
                    const MomentModel& model, std::span<const double> gamma0,
                    std::span<const double> theta_init) {
  const std::size_t q = gamma0.size();
  const auto p = static_cast<std::size_t>(model.p);
  if (q == 0 || q > p)
    throw ValidationError("w2_statistic: tested subvector has dimension " +
                          std::to_string(q) + ", model has " +
                          std::to_string(model.p) + " parameters");
  if (theta_init.size() != p)
    throw ValidationError("w2_statistic: theta_init has dimension " +
                          std::to_string(theta_init.size()) + ", model wants " +
                          std::to_string(model.p));
  const MeleResult fit = mele(path, partition, model, theta_init);

  double profile;
  std::vector<double> th(theta_init.begin(), theta_init.end());
  std::copy(gamma0.begin(), gamma0.end(), th.begin());
  if (q == p) {
    profile = ratio_at(path, partition, model, th);
  } else {
    const auto free_dim = static_cast<Eigen::Index>(p - q);
    auto objective = [&](const Eigen::VectorXd& beta) {
      std::vector<double> t(th);
      for (Eigen::Index i = 0; i < free_dim; ++i) t[q + static_cast<std::size_t>(i)] = beta[i];
      return ratio_at(path, partition, model, t);
    };
    Eigen::VectorXd beta0(free_dim);
    for (Eigen::Index i = 0; i < free_dim; ++i)
      beta0[i] = theta_init[q + static_cast<std::size_t>(i)];
    const int budget = 400 * static_cast<int>(free_dim) + 200;
    SimplexResult a = minimize_simplex(objective, beta0, 0.25, budget / 2);
    SimplexResult b = minimize_simplex(objective, a.x, 0.05, budget - a.evaluations);
    profile = std::min(a.value, b.value);
  }
  return std::max(0.0, 2.0 * (profile - fit.ratio));
}

ConfidenceInterval bisect_interval(const std::function<double(double)>& statistic,
                                   double cutoff, double center, double half_width,
                                   const CIOptions& options) {
  ConfidenceInterval ci;
  ci.level = options.level;
  ci.kind = options.kind;
  ci.center = center;
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw ValidationError("bisect_interval: bracket half width must be positive");

  const double at_center = statistic(center);
  if (at_center > cutoff) {
    ci.empty = true;
    ci.lower = ci.upper = center;
    return ci;
  }

  auto solve_side = [&](double direction) {
    double width = half_width;
    double outer = center + direction * width;
    double outer_value = statistic(outer);
    int widenings = 0;
    while (outer_value <= cutoff && widenings < options.max_widenings) {
      width *= 2.0;
      outer = center + direction * width;
      outer_value = statistic(outer);
      ++widenings;
    }
    if (outer_value <= cutoff)
      throw Error("bisect_interval: statistic stays below the cutoff " +
                  std::to_string(cutoff) + " out to " + std::to_string(outer));
    double inner = center;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (inner + outer);
      const double value = statistic(mid);
      if (std::isfinite(value) &&
          std::abs(value - cutoff) <= options.statistic_tolerance)
        return mid;
      if (value > cutoff)
        outer = mid;
      else
        inner = mid;
    }
    return 0.5 * (inner + outer);
  };

  ci.lower = solve_side(-1.0);
  ci.upper = solve_side(+1.0);
  return ci;
}

ConfidenceInterval confidence_interval(const ChainPath& path,
                                       const BlockPartition& partition,
                                       const MomentModel& model,
                                       const CIOptions& options) {
  if (model.p != 1)
    throw ValidationError("confidence_interval: scalar parameter required, model has " +
                          std::to_string(model.p));
  std::vector<double> init{0.0};
  const MeleResult fit = mele(path, partition, model, init, options.mele_budget);
  const double center = fit.theta[0];

  const AsymptoticEstimates est =
      asymptotic_estimates(path, partition, model, fit.theta);
  const double se = est.se(0, path.length());
  const double cutoff = stats::chi2_quantile(1, options.level);

  auto statistic = [&](double theta) {
    const double value[1] = {theta};
    const double r = ratio_at(path, partition, model, value);
    if (options.kind == CIKind::PlainRatio) return 2.0 * r;
    return std::max(0.0, 2.0 * (r - fit.ratio));
  };

  ConfidenceInterval ci = bisect_interval(
      statistic, cutoff, center, options.bracket_se_multiple * std::max(se, 1e-12),
      options);
  if (ci.empty)
    throw EmptyRegionError(
        "confidence_interval: statistic already exceeds the cutoff at its minimizer " +
        std::to_string(center));
  return ci;
}

double predicted_power(std::span<const double> delta, const Eigen::MatrixXd& sigma,
                       double alpha) {
  const auto p = static_cast<Eigen::Index>(delta.size());
  if (p == 0 || sigma.rows() != p || sigma.cols() != p)
    throw ValidationError("predicted_power: delta and Sigma dimensions disagree");
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw ValidationError("predicted_power: alpha must lie in (0, 1)");
  Eigen::LDLT<Eigen::MatrixXd> ldlt(sigma);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw SingularVarianceError("predicted_power: Sigma is not positive definite");
  const Eigen::Map<const Eigen::VectorXd> d(delta.data(), p);
  const double ncp = d.dot(ldlt.solve(d));
  const double cutoff = stats::chi2_quantile(static_cast<int>(p), 1.0 - alpha);
  return stats::noncentral_chi2_sf(static_cast<double>(p), ncp, cutoff);
}

std::string ConfidenceInterval::to_json() const {
  std::ostringstream out;
  const char* kind_name = kind == CIKind::PlainRatio    ? "plain"
                          : kind == CIKind::Corrected   ? "corrected"
                                                        : "subvector";
  out << "{\"lower\": " << io::format_double(lower)
      << ", \"upper\": " << io::format_double(upper)
      << ", \"level\": " << io::format_double(level) << ", \"kind\": \""
      << kind_name << "\", \"empty\": " << (empty ? "true" : "false")
      << ", \"center\": " << io::format_double(center) << "}";
  return out.str();
}

}  // namespace rebel
