#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "rebel/rng.hpp"
#include "rebel/stats.hpp"

using namespace rebel;

TEST_CASE("normal cdf and quantile at tabulated points") {
  CHECK(stats::normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(stats::normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-9));
  CHECK(stats::normal_cdf(-1.959963984540054) == doctest::Approx(0.025).epsilon(1e-7));
  CHECK(stats::normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-8));
  CHECK(stats::normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(stats::normal_quantile(0.00135) ==
        doctest::Approx(-2.999976992622113).epsilon(1e-6));
  // quantile inverts the cdf across the working range
  for (double x = -5.0; x <= 5.0; x += 0.25)
    CHECK(stats::normal_quantile(stats::normal_cdf(x)) == doctest::Approx(x).epsilon(1e-6));
}

TEST_CASE("chi-square cdf, sf, quantile at tabulated points") {
  CHECK(stats::chi2_quantile(1, 0.95) == doctest::Approx(oracle::kChi2_1_95).epsilon(1e-9));
  CHECK(stats::chi2_quantile(1, 0.90) == doctest::Approx(oracle::kChi2_1_90).epsilon(1e-9));
  CHECK(stats::chi2_quantile(1, 0.50) == doctest::Approx(oracle::kChi2_1_50).epsilon(1e-9));
  CHECK(stats::chi2_quantile(2, 0.95) == doctest::Approx(5.991464547107979).epsilon(1e-9));
  CHECK(stats::chi2_quantile(5, 0.99) == doctest::Approx(15.08627246938899).epsilon(1e-9));
  CHECK(stats::chi2_cdf(1, oracle::kChi2_1_95) == doctest::Approx(0.95).epsilon(1e-10));
  CHECK(stats::chi2_sf(1, oracle::kChi2_1_95) == doctest::Approx(0.05).epsilon(1e-8));
  // chi2(2) is exponential(1/2): cdf(x) = 1 - exp(-x/2)
  for (double x = 0.5; x < 10.0; x += 0.5)
    CHECK(stats::chi2_cdf(2, x) == doctest::Approx(1.0 - std::exp(-x / 2)).epsilon(1e-10));
}

TEST_CASE("gamma and beta special functions") {
  // gamma_p(1/2, x) = erf(sqrt(x))
  for (double x : {0.1, 0.5, 1.0, 2.0, 5.0})
    CHECK(stats::gamma_p(0.5, x) == doctest::Approx(std::erf(std::sqrt(x))).epsilon(1e-10));
  CHECK(stats::gamma_p(1.0, 1.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
  CHECK(stats::gamma_q(1.0, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(stats::incomplete_beta(0.5, 0.5, 0.5) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(stats::incomplete_beta(2.0, 3.0, 0.4) ==
        doctest::Approx(0.5248).epsilon(1e-10));  // 6x^2(1-x)^... closed form below
  // Closed form for integer a, b: I_{0.4}(2,3) = sum_{k=2}^{4} C(4,k) .4^k .6^{4-k}
  const double p = 6 * 0.16 * 0.36 + 4 * 0.064 * 0.6 + 0.0256;
  CHECK(stats::incomplete_beta(2.0, 3.0, 0.4) == doctest::Approx(p).epsilon(1e-10));
}

TEST_CASE("student t cdf at tabulated points") {
  CHECK(stats::student_t_cdf(10, 1.8124611228107335) == doctest::Approx(0.95).epsilon(1e-8));
  CHECK(stats::student_t_cdf(1, 1.0) == doctest::Approx(0.75).epsilon(1e-10));  // Cauchy
  CHECK(stats::student_t_two_sided_p(10, 1.8124611228107335) ==
        doctest::Approx(0.10).epsilon(1e-7));
  CHECK(stats::student_t_two_sided_p(5, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("noncentral chi-square against the 1-df closed form") {
  for (double ncp : {0.5, 1.0, 4.0, 9.0})
    for (double x : {1.0, 3.84, 8.0}) {
      const double want = oracle::noncentral_chi2_power_1df(ncp, x);
      CHECK(stats::noncentral_chi2_sf(1, ncp, x) == doctest::Approx(want).epsilon(1e-8));
      CHECK(stats::noncentral_chi2_cdf(1, ncp, x) ==
            doctest::Approx(1.0 - want).epsilon(1e-8));
    }
  // ncp = 0 degenerates to the central distribution
  CHECK(stats::noncentral_chi2_cdf(3, 0.0, 2.5) ==
        doctest::Approx(stats::chi2_cdf(3, 2.5)).epsilon(1e-9));
}

TEST_CASE("ks distance on a constructed sample") {
  // Sample placed exactly at cdf midpoints: distance = 1/(2n).
  std::vector<double> s;
  const int n = 100;
  for (int i = 0; i < n; ++i)
    s.push_back(stats::chi2_quantile(1, (i + 0.5) / n));
  CHECK(stats::ks_distance_chi2(s, 1) == doctest::Approx(0.005).epsilon(1e-9));
}

TEST_CASE("empirical quantile uses linear interpolation") {
  std::vector<double> v{4.0, 1.0, 3.0, 2.0};
  CHECK(stats::empirical_quantile(v, 0.0) == 1.0);
  CHECK(stats::empirical_quantile(v, 1.0) == 4.0);
  CHECK(stats::empirical_quantile(v, 0.5) == doctest::Approx(2.5));
  CHECK(stats::empirical_quantile(v, 1.0 / 3.0) == doctest::Approx(2.0));
}

TEST_CASE("sample moments") {
  std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  CHECK(stats::sample_mean(v) == doctest::Approx(2.5));
  CHECK(stats::sample_variance(v) == doctest::Approx(5.0 / 3.0));
}

TEST_CASE("rng streams are deterministic and distinct") {
  SplitRng a(42), b(42);
  for (int i = 0; i < 16; ++i) CHECK(a.next_u64() == b.next_u64());

  SplitRng base(42);
  SplitRng s1 = base.split(1), s2 = base.split(2);
  int same = 0;
  for (int i = 0; i < 64; ++i)
    if (s1.next_u64() == s2.next_u64()) ++same;
  CHECK(same == 0);

  CHECK(SplitRng::derive(7, 3) == SplitRng::derive(7, 3));
  CHECK(SplitRng::derive(7, 3) != SplitRng::derive(7, 4));
  CHECK(SplitRng::derive(7, 3) != SplitRng::derive(8, 3));
}

TEST_CASE("rng uniform and gaussian moments") {
  SplitRng rng(123);
  const int n = 200000;
  double su = 0, su2 = 0, sg = 0, sg2 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    su += u;
    su2 += u * u;
    const double g = rng.next_gaussian();
    sg += g;
    sg2 += g * g;
  }
  CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(su2 / n == doctest::Approx(1.0 / 3.0).epsilon(0.01));
  CHECK(sg / n == doctest::Approx(0.0).scale(1.0).epsilon(0.01));
  CHECK(sg2 / n == doctest::Approx(1.0).epsilon(0.02));
}
