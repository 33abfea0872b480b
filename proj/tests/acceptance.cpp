// Acceptance gate: one criterion per command-line argument (c1..c8), all of
// them when invoked bare. Prints one [PASS]/[FAIL] line per criterion plus
// indented diagnostics, and exits nonzero when any selected criterion fails.
//
// Scale: c3 runs the coverage tables in a 2000-replication desk mode with a
// +/-0.03 tolerance by default; pass --full for the 10^4-replication runs at
// the tighter published tolerances.

#include <Eigen/Dense>

#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rebel/baselines.hpp"
#include "rebel/chain.hpp"
#include "rebel/el.hpp"
#include "rebel/infer.hpp"
#include "rebel/mc.hpp"
#include "rebel/models.hpp"
#include "rebel/regen.hpp"
#include "rebel/stats.hpp"

using namespace rebel;

namespace {

constexpr std::uint64_t kSeed = 20260816;

struct Criterion {
  bool pass = true;
  std::string headline;
  std::vector<std::string> notes;
};

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Eigen::MatrixXd column(const std::vector<double>& v) {
  Eigen::MatrixXd y(static_cast<Eigen::Index>(v.size()), 1);
  for (std::size_t i = 0; i < v.size(); ++i) y(static_cast<Eigen::Index>(i), 0) = v[i];
  return y;
}

// c1: dual solver vs the brute-force primal on tiny instances, plus the
// closed-form two-block example {-1, 2} whose ratio is log(9/8).
Criterion c1(bool) {
  const auto t0 = std::chrono::steady_clock::now();
  Criterion c;

  Eigen::MatrixXd worked(2, 1);
  worked << -1.0, 2.0;
  const double got = el_ratio(worked).ratio;
  const double want = std::log(9.0 / 8.0);
  const double worked_err = std::abs(got - want);
  if (worked_err > 1e-10) {
    c.pass = false;
    c.notes.push_back(fmt("worked example off by %.3e (want %.12f, got %.12f)",
                          worked_err, want, got));
  }

  std::mt19937_64 gen(kSeed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> pick_l(2, 3);
  std::uniform_real_distribution<double> scale(0.2, 5.0);
  double max_err = 0.0;
  int finite_cases = 0, unbounded_cases = 0, mismatches = 0;
  for (int inst = 0; inst < 200; ++inst) {
    const int l = pick_l(gen);
    std::vector<double> y(static_cast<std::size_t>(l));
    const double s = scale(gen);
    for (auto& v : y) v = s * normal(gen);
    if (inst % 7 == 0)
      for (auto& v : y) v = std::round(v);

    const double primal = oracle::primal_el_ratio(y);
    const ELSolution dual = el_ratio(column(y));
    if (std::isinf(primal)) {
      ++unbounded_cases;
      if (dual.status != ELStatus::Unbounded) ++mismatches;
    } else {
      ++finite_cases;
      if (dual.status != ELStatus::Converged) {
        ++mismatches;
        continue;
      }
      const double err = std::abs(dual.ratio - primal) / std::max(1.0, std::abs(primal));
      max_err = std::max(max_err, err);
    }
  }
  const double elapsed = seconds_since(t0);
  if (mismatches > 0 || max_err > 1e-4) c.pass = false;
  if (elapsed >= 60.0) {
    c.pass = false;
    c.notes.push_back(fmt("runtime %.1fs exceeds the 60s budget", elapsed));
  }
  c.headline = fmt(
      "dual vs primal-grid oracle: max err %.2e over %d finite + %d unbounded "
      "instances (%d status mismatches), worked example err %.1e, %.1fs",
      max_err, finite_cases, unbounded_cases, mismatches, worked_err, elapsed);
  return c;
}

// c2: chi-square calibration of the block ratio on an exactly atomic chain.
Criterion c2(bool) {
  Criterion c;
  const MCReport report = run_coverage(preset_wilks(2000, 5000, kSeed));
  const CellReport& cell = report.cell(Method::ReBEL, 0.0);
  const double cov = cell.acceptance_rate();
  c.pass = cov >= 0.93 && cov <= 0.965;
  c.headline = fmt("two-state 95%% coverage %.4f in [0.930, 0.965] (n=2000, %d/%d reps used)",
                   cov, cell.used, cell.total);
  return c;
}

// c3: AR(1) coverage table at rho = 0.9 for the regenerative and fixed-block
// methods, three path lengths.
Criterion c3(bool full) {
  Criterion c;
  const int reps = full ? 10000 : 2000;
  const double tol_rebel = full ? 0.015 : 0.03;
  const double tol_bel = full ? 0.02 : 0.03;
  const std::size_t lengths[3] = {250, 500, 1000};
  const double target_rebel[3] = {0.92, 0.94, 0.94};
  const double target_bel[3] = {0.82, 0.88, 0.91};

  int misses = 0;
  for (int i = 0; i < 3; ++i) {
    const MCReport report = run_coverage(preset_table1(lengths[i], reps, kSeed + i));
    const struct {
      Method method;
      double target, tol;
      const char* label;
    } rows[2] = {{Method::ReBEL, target_rebel[i], tol_rebel, "rebel"},
                 {Method::BEL, target_bel[i], tol_bel, "bel"}};
    for (const auto& row : rows) {
      const CellReport& cell = report.cell(row.method, 0.0);
      const double cov = cell.acceptance_rate();
      const bool ok = std::abs(cov - row.target) <= row.tol;
      if (!ok) ++misses;
      c.notes.push_back(fmt("%s n=%zu: coverage %.4f vs %.2f +/- %.3f %s (%d/%d used, %d failures)",
                            row.label, lengths[i], cov, row.target, row.tol,
                            ok ? "ok" : "MISS", cell.used, cell.total, cell.failures()));
    }
  }
  c.pass = misses == 0;
  c.headline = fmt("ar(1) rho=0.9 coverage table, %d reps: %d of 6 cells missed", reps, misses);
  return c;
}

// c4: long-run threshold-crossing frequency of the volatility model.
Criterion c4(bool) {
  Criterion c;
  const std::size_t n = 1000000;
  const ChainPath path = simulate(ModelSpec::tgarch(kSeed), n);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (path.scalar(i) >= 10.0) ++hits;
  const double freq = static_cast<double>(hits) / static_cast<double>(n);
  c.pass = std::abs(freq - 0.1479) <= 0.005;
  c.headline = fmt("tgarch P(X >= 10) = %.4f vs 0.1479 +/- 0.005 (10^6 draws)", freq);
  return c;
}

// c5: tail-probability experiment at n = 1000: null coverage and type-II
// rates under 5/sqrt(n) and 10/sqrt(n) alternatives, four methods.
Criterion c5(bool) {
  Criterion c;
  const MCReport report = run_coverage(preset_table2(2000, kSeed));

  struct Row {
    Method method;
    const char* label;
    double targets[3];  // offsets 0, 5, 10
  };
  const Row rows[4] = {{Method::ReBEL, "rebel", {0.54, 0.24, 0.07}},
                       {Method::BEL, "bel", {0.55, 0.13, 0.02}},
                       {Method::Mean, "mean", {0.58, 0.14, 0.02}},
                       {Method::Trunc, "trunc", {0.58, 0.20, 0.06}}};
  const double offsets[3] = {0.0, 5.0, 10.0};

  int misses = 0;
  for (const Row& row : rows) {
    for (int k = 0; k < 3; ++k) {
      const CellReport& cell = report.cell(row.method, offsets[k]);
      const double rate = cell.acceptance_rate();
      const bool ok = std::abs(rate - row.targets[k]) <= 0.05;
      if (!ok) ++misses;
      c.notes.push_back(fmt("%s offset %.0f: %s %.3f vs %.2f +/- 0.05 %s (%d/%d used)",
                            row.label, offsets[k],
                            k == 0 ? "coverage" : "type-II", rate, row.targets[k],
                            ok ? "ok" : "MISS", cell.used, cell.total));
    }
  }
  if (misses > 0) {
    c.notes.push_back(fmt(
        "diagnostics: mean complete blocks %.1f, mean visits %.1f, mean delta %.4f, "
        "mean clamped %.2f over %d partitions",
        report.mean_complete_blocks, report.mean_visits, report.mean_delta,
        report.mean_clamped, report.partitions));
    for (const Row& row : rows) {
      const CellReport& cell = report.cell(row.method, 0.0);
      c.notes.push_back(fmt(
          "diagnostics %s: failures %d (no-regen %d, blocks %d, converge %d, other %d), "
          "unbounded %d",
          row.label, cell.failures(), cell.failed_no_regeneration,
          cell.failed_not_enough_blocks, cell.failed_not_converged,
          cell.failed_other, cell.unbounded));
    }
  }
  c.pass = misses == 0;
  c.headline = fmt("tail-probability table, n=1000, 2000 reps: %d of 12 cells missed", misses);
  return c;
}

// c6: null distribution of the statistic at n = 10^4 against chi-square(1).
Criterion c6(bool) {
  Criterion c;
  const QQReport qq = run_qq(preset_qqplot(1000, kSeed));

  const double probs[3] = {0.5, 0.9, 0.95};
  const double refs[3] = {oracle::kChi2_1_50, oracle::kChi2_1_90, oracle::kChi2_1_95};
  bool quantiles_ok = true;
  std::string qnote = "quantiles";
  for (int i = 0; i < 3; ++i) {
    const double emp = qq.empirical_quantile(probs[i]);
    const double rel = std::abs(emp - refs[i]) / refs[i];
    if (rel > 0.10) quantiles_ok = false;
    qnote += fmt(" p%.0f %.3f vs %.3f (%+.1f%%)", probs[i] * 100, emp, refs[i], 100 * rel);
  }
  c.notes.push_back(qnote);
  c.notes.push_back(fmt("%zu statistics, %d unbounded, %d failures",
                        qq.statistics.size(), qq.unbounded, qq.failures));
  c.pass = qq.ks < 0.05 && quantiles_ok;
  c.headline = fmt("null qq at n=10^4, 1000 reps: KS %.4f vs < 0.05, quantiles %s",
                   qq.ks, quantiles_ok ? "within 10%" : "outside 10%");
  return c;
}

// c7: rejection under local alternatives vs the noncentral chi-square
// prediction from the estimated block variance.
Criterion c7(bool) {
  Criterion c;
  const PowerReport power = run_power(preset_power(1000, kSeed));

  int misses = 0;
  for (const PowerCell& cell : power.cells) {
    const double gap = std::abs(cell.empirical_rejection - cell.predicted_rejection);
    const bool checked = cell.offset > 0.0;
    const bool ok = !checked || gap <= 0.05;
    if (checked && !ok) ++misses;
    c.notes.push_back(fmt("offset %.0f: empirical %.3f vs predicted %.3f (gap %.3f)%s",
                          cell.offset, cell.empirical_rejection, cell.predicted_rejection,
                          gap, checked ? (ok ? " ok" : " MISS") : " [size, informational]"));
  }
  c.pass = misses == 0;
  c.headline = fmt("local power at n=5000, offsets 2 and 4: %d misses beyond 5pp", misses);
  return c;
}

// c8: structural invariants. Each sub-check is cheap; the whole bundle must
// finish inside a minute.
Criterion c8(bool) {
  const auto t0 = std::chrono::steady_clock::now();
  Criterion c;
  std::vector<std::string> failed;

  // Blocks tile the observation window between the first and last renewal.
  {
    const ChainPath path = simulate(ModelSpec::finite({{0.7, 0.3}, {0.4, 0.6}}, 0, kSeed), 2000);
    const BlockPartition part = atomic_blocks(path, atom_equals(0.0));
    bool ok = part.blocks.size() == part.complete_count + 2 &&
              part.blocks.front().begin == 0 && part.blocks.back().end == path.length();
    for (std::size_t j = 0; ok && j + 1 < part.blocks.size(); ++j)
      ok = part.blocks[j].end == part.blocks[j + 1].begin;
    for (std::size_t j = 0; ok && j < part.complete_count; ++j)
      ok = !part.complete(j).empty();
    for (std::size_t j = 0; ok && j + 1 < part.regeneration_times.size(); ++j)
      ok = part.regeneration_times[j] < part.regeneration_times[j + 1];
    if (!ok) failed.push_back("partition tiling");
  }

  // Splitting an exact atom with its own transition row must reproduce the
  // atomic cut (delta = 1 makes every eligible visit a sure renewal).
  {
    const ChainPath path = simulate(ModelSpec::finite({{0.7, 0.3}, {0.4, 0.6}}, 0, kSeed + 1), 800);
    const auto mass = TransitionDensity::custom(
        1, [](std::span<const double> x, std::span<const double> y) {
          const double P[2][2] = {{0.7, 0.3}, {0.4, 0.6}};
          return P[std::lround(x[0])][std::lround(y[0])];
        });
    SmallSet set;
    set.lo = {-0.25};
    set.hi = {0.25};
    set.delta = 1.0;
    set.custom_phi = [](std::span<const double> y) {
      return std::lround(y[0]) == 0 ? 0.7 : 0.3;
    };
    const BlockPartition split = split_chain(path, set, mass, kSeed);
    BlockPartition atomic = atomic_blocks(path, atom_equals(0.0));
    // The splitter never marks a renewal at time n, the atomic cut does.
    if (!atomic.regeneration_times.empty() &&
        atomic.regeneration_times.back() == path.length())
      atomic.regeneration_times.pop_back();
    if (split.regeneration_times != atomic.regeneration_times ||
        split.clamped_params != 0)
      failed.push_back("split/atomic equivalence");
  }

  // The ratio is invariant under invertible linear maps of the moments.
  {
    std::mt19937_64 gen(kSeed + 2);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd y(40, 2);
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      y(i, 0) = normal(gen);
      y(i, 1) = 0.4 * normal(gen) + 0.2 * y(i, 0);
    }
    Eigen::Matrix2d a;
    a << 2.0, 0.5, -1.0, 1.2;
    const ELSolution base = el_ratio(y);
    const ELSolution mapped = el_ratio(y * a.transpose());
    bool ok = base.status == ELStatus::Converged &&
              mapped.status == ELStatus::Converged &&
              std::abs(base.ratio - mapped.ratio) <= 1e-8;
    const ELSolution scaled = el_ratio(y.col(0) * 37.5);
    const ELSolution unscaled = el_ratio(y.col(0));
    ok = ok && std::abs(scaled.ratio - unscaled.ratio) <= 1e-8;
    if (!ok) failed.push_back("affine invariance");
  }

  // For the mean model the likelihood maximizer is the complete-block mean.
  {
    const ChainPath path = simulate(ModelSpec::finite({{0.7, 0.3}, {0.4, 0.6}}, 0, kSeed + 3), 1500);
    const BlockPartition part = atomic_blocks(path, atom_equals(0.0));
    const MomentModel model = mean_model(1);
    const double init = 0.3;
    const MeleResult fit = mele(path, part, model, {&init, 1});
    const double trunc = trunc_estimate(path, part, model)[0];
    if (std::abs(fit.theta[0] - trunc) > 1e-12 || fit.ratio != 0.0)
      failed.push_back("mele/trunc identity");
  }

  // Converged weights form a probability vector that kills the moments.
  {
    std::mt19937_64 gen(kSeed + 4);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd y(25, 2);
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      y(i, 0) = normal(gen);
      y(i, 1) = 0.5 * normal(gen);
    }
    const ELSolution s = el_ratio(y);
    bool ok = s.status == ELStatus::Converged && s.weights.size() == y.rows() &&
              s.weights.minCoeff() > 0.0 &&
              std::abs(s.weights.sum() - 1.0) <= 1e-10 &&
              (y.transpose() * s.weights).norm() <= 1e-8;
    if (!ok) failed.push_back("weight simplex / moment kill");
  }

  const double elapsed = seconds_since(t0);
  if (elapsed >= 60.0) failed.push_back(fmt("runtime %.1fs over the 60s budget", elapsed));
  for (const std::string& f : failed) c.notes.push_back("failed: " + f);
  c.pass = failed.empty();
  c.headline = fmt("structural invariants: %zu of 5 checks failed, %.2fs",
                   failed.size(), elapsed);
  return c;
}

struct Entry {
  const char* name;
  Criterion (*run)(bool);
};

constexpr Entry kEntries[] = {{"c1", c1}, {"c2", c2}, {"c3", c3}, {"c4", c4},
                              {"c5", c5}, {"c6", c6}, {"c7", c7}, {"c8", c8}};

}  // namespace

int main(int argc, char** argv) {
  bool full = false;
  std::vector<std::string> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--full") {
      full = true;
    } else if (arg == "--help") {
      std::printf("usage: acceptance [--full] [c1 .. c8]\n");
      return 0;
    } else {
      selected.push_back(arg);
    }
  }
  if (selected.empty())
    for (const Entry& e : kEntries) selected.push_back(e.name);

  int failures = 0, ran = 0;
  for (const std::string& name : selected) {
    const Entry* entry = nullptr;
    for (const Entry& e : kEntries)
      if (name == e.name) entry = &e;
    if (!entry) {
      std::fprintf(stderr, "unknown criterion '%s' (expected c1 .. c8)\n", name.c_str());
      return 2;
    }
    Criterion result;
    try {
      result = entry->run(full);
    } catch (const std::exception& ex) {
      result.pass = false;
      result.headline = fmt("threw %s", ex.what());
    }
    ++ran;
    if (!result.pass) ++failures;
    std::printf("[%s] %c%s: %s\n", result.pass ? "PASS" : "FAIL",
                std::toupper(entry->name[0]), entry->name + 1, result.headline.c_str());
    for (const std::string& note : result.notes)
      std::printf("         %s\n", note.c_str());
    std::fflush(stdout);
  }
  std::printf("acceptance: %d/%d criteria passed%s\n", ran - failures, ran,
              full ? " (full scale)" : "");
  return failures == 0 ? 0 : 1;
}
