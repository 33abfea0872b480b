// Independent reference implementations used to check the library. Everything
// here is deliberately brute-force or closed-form and shares no code with the
// implementation under test.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace oracle {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Primal empirical-likelihood ratio for scalar moments and at most 3 points:
// maximize sum_j log(l * q_j) over the simplex subject to sum_j q_j y_j = 0,
// returned as the nonnegative ratio -max (= +inf when infeasible).
// l = 1, 2 solved exactly; l = 3 by parametrizing the feasible segment and
// grid search with two refinement passes.
// ---------------------------------------------------------------------------
inline double primal_el_ratio(const std::vector<double>& y) {
  const std::size_t l = y.size();
  if (l == 0) throw std::invalid_argument("primal_el_ratio: empty");
  const double ymin = *std::min_element(y.begin(), y.end());
  const double ymax = *std::max_element(y.begin(), y.end());
  if (ymin == 0.0 && ymax == 0.0) return 0.0;  // uniform weights feasible
  if (ymin >= 0.0 || ymax <= 0.0) return kInf; // zero outside the open hull

  if (l == 2) {
    // q1 y1 + q2 y2 = 0, q1 + q2 = 1  =>  q1 = y2 / (y2 - y1).
    const double q1 = y[1] / (y[1] - y[0]);
    const double q2 = 1.0 - q1;
    if (!(q1 > 0.0 && q2 > 0.0)) return kInf;
    return -(std::log(2.0 * q1) + std::log(2.0 * q2));
  }
  if (l != 3) throw std::invalid_argument("primal_el_ratio: l must be <= 3");

  // Pick the pair (j, k) with the widest spread as the dependent coordinates
  // so the parametrization q_j(t), q_k(t) is well conditioned.
  int perm[3] = {0, 1, 2};
  double best_gap = -1.0;
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    const double gap = std::abs(y[j] - y[k]);
    if (gap > best_gap) {
      best_gap = gap;
      perm[0] = i; perm[1] = j; perm[2] = k;
    }
  }
  const double yi = y[perm[0]], yj = y[perm[1]], yk = y[perm[2]];
  if (best_gap == 0.0) {
    // All three equal and nonzero: infeasible (handled above when zero).
    return kInf;
  }
  const auto objective = [&](double t) {
    // q_i = t; solve q_j (yj - yk) = -yk - t (yi - yk); q_k = 1 - t - q_j.
    const double qj = (-yk - t * (yi - yk)) / (yj - yk);
    const double qk = 1.0 - t - qj;
    if (!(t > 0.0 && qj > 0.0 && qk > 0.0)) return -kInf;
    return std::log(3.0 * t) + std::log(3.0 * qj) + std::log(3.0 * qk);
  };
  double lo = 0.0, hi = 1.0, best_t = -1.0, best_f = -kInf;
  for (int pass = 0; pass < 3; ++pass) {
    const double step = (hi - lo) / 1000.0;
    for (int s = 0; s <= 1000; ++s) {
      const double t = lo + step * s;
      const double f = objective(t);
      if (f > best_f) { best_f = f; best_t = t; }
    }
    if (best_t < 0.0) return kInf;  // no feasible point on the segment
    lo = std::max(0.0, best_t - step);
    hi = std::min(1.0, best_t + step);
  }
  return -best_f;
}

// ---------------------------------------------------------------------------
// Two-state chain on {0, 1} with P(0->1) = a, P(1->0) = b, atom {0},
// moment m(x, theta) = x - theta. Closed-form block quantities:
// block = one excursion from 0 back to 0, length L = 1 + N where N is the
// number of 1-steps (N = 0 w.p. 1-a, geometric(b) otherwise), block sum = N.
// ---------------------------------------------------------------------------
struct TwoStateBlocks {
  double mean_length;     // E[L]
  double mean_moment;     // E[M(B, theta)]
  double second_moment;   // E[M(B, theta)^2]
  double sigma;           // E[M^2] / E[L]: asymptotic variance of sqrt(n) theta_hat
};

inline TwoStateBlocks two_state_blocks(double a, double b, double theta) {
  TwoStateBlocks r;
  const double es = a / b;                    // E[N]
  const double es2 = a * (2.0 - b) / (b * b); // E[N^2]
  r.mean_length = 1.0 + es;
  // M = N - theta L = N (1 - theta) - theta.
  r.mean_moment = es * (1.0 - theta) - theta;
  r.second_moment = (1.0 - theta) * (1.0 - theta) * es2 -
                    2.0 * theta * (1.0 - theta) * es + theta * theta;
  r.sigma = r.second_moment / r.mean_length;
  return r;
}

// Stationary mean of the two-state chain: pi(1) = a / (a + b).
inline double two_state_mean(double a, double b) { return a / (a + b); }

// Long-run variance of the sample mean of the two-state chain (times n):
// pi1 (1 - pi1) (1 + rho) / (1 - rho) with rho = 1 - a - b.
inline double two_state_long_run_variance(double a, double b) {
  const double pi1 = a / (a + b);
  const double rho = 1.0 - a - b;
  return pi1 * (1.0 - pi1) * (1.0 + rho) / (1.0 - rho);
}

// ---------------------------------------------------------------------------
// Standard normal CDF (independent of the library's implementation).
// ---------------------------------------------------------------------------
inline double phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Power of the chi-square(1, ncp) test at cutoff q:
// P(chi'2_1(ncp) > q) = Phi(sqrt(ncp) - sqrt(q)) + Phi(-sqrt(ncp) - sqrt(q)).
inline double noncentral_chi2_power_1df(double ncp, double q) {
  const double s = std::sqrt(ncp), r = std::sqrt(q);
  return phi(s - r) + phi(-s - r);
}

// ---------------------------------------------------------------------------
// AR(1): variance of the length-L block mean relative to the marginal
// variance, V_L = 1 + 2 sum_{k<L} (1 - k/L) rho^k. The non-overlapping block
// bootstrap variance of the sample mean has expectation ~ V_L * var_x / n.
// ---------------------------------------------------------------------------
inline double ar1_block_variance_factor(double rho, std::size_t L) {
  double s = 0.0;
  double rk = 1.0;
  for (std::size_t k = 1; k < L; ++k) {
    rk *= rho;
    s += (1.0 - static_cast<double>(k) / static_cast<double>(L)) * rk;
  }
  return 1.0 + 2.0 * s;
}

// Marginal variance of the stationary AR(1) with unit-variance innovations.
inline double ar1_marginal_variance(double rho) { return 1.0 / (1.0 - rho * rho); }

// Long-run variance factor of the AR(1) sample mean: (1 + rho) / (1 - rho).
inline double ar1_long_run_factor(double rho) { return (1.0 + rho) / (1.0 - rho); }

// ---------------------------------------------------------------------------
// Reference chi-square(1) quantiles (Wilks cutoffs), from standard tables.
// ---------------------------------------------------------------------------
inline constexpr double kChi2_1_50 = 0.454936423119573;
inline constexpr double kChi2_1_90 = 2.705543454095404;
inline constexpr double kChi2_1_95 = 3.841458820694124;

}  // namespace oracle
