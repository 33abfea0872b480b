#pragma once

#include <cstddef>
#include <vector>

// Scalar distribution functions used across the library. All of them are pure
// double-precision arithmetic with no global state.
namespace rebel::stats {

double normal_cdf(double x);

// Inverse standard normal CDF, Wichura's PPND16 rational approximations
// (absolute error below 1e-15 over (0,1)).
double normal_quantile(double p);

// Regularized lower incomplete gamma P(a, x) and its complement Q(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

double chi2_cdf(double df, double x);
double chi2_sf(double df, double x);
double chi2_quantile(double df, double p);

// Student-t CDF and two-sided p-value for a t statistic with df degrees of freedom.
double student_t_cdf(double df, double t);
double student_t_two_sided_p(double df, double t);

// Noncentral chi-square CDF/SF via the Poisson mixture
//   F(x; df, ncp) = sum_k Pois(k; ncp/2) * ChiSq_{df + 2k}(x),
// summed until the remaining Poisson mass is below 1e-12 of the total.
double noncentral_chi2_cdf(double df, double ncp, double x);
double noncentral_chi2_sf(double df, double ncp, double x);

// Kolmogorov-Smirnov distance between a sample and a reference CDF.
// The sample is copied and sorted internally.
double ks_distance(std::vector<double> sample, double (*cdf)(double));
double ks_distance_chi2(std::vector<double> sample, double df);

// Empirical quantile with linear interpolation between order statistics.
double empirical_quantile(std::vector<double> sample, double p);

double sample_mean(const std::vector<double>& v);
double sample_variance(const std::vector<double>& v);  // denominator n - 1

}  // namespace rebel::stats
