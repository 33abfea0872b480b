#include "rebel/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "rebel/baselines.hpp"
#include "rebel/errors.hpp"
#include "rebel/infer.hpp"
#include "rebel/io.hpp"
#include "rebel/rng.hpp"
#include "rebel/stats.hpp"

namespace rebel {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum Code : std::uint8_t {
  kAccepted = 0,
  kRejected = 1,
  kUnbounded = 2,
  kFailNoRegen = 3,
  kFailBlocks = 4,
  kFailConverge = 5,
  kFailOther = 6,
};

struct RepResult {
  bool has_partition = false;
  double complete_blocks = 0.0;
  double visits = 0.0;
  double delta = kNaN;
  double clamped = 0.0;
  double expected = kNaN;
  std::vector<std::uint8_t> codes;  // method-major, offset-minor
  double stat_at_null = kNaN;       // 2 r_n(theta0) for the regenerative method
  Eigen::MatrixXd sigma;            // empty unless collected
  Eigen::MatrixXd d;
};

std::vector<double> offsets_of(const ExperimentSpec& spec) {
  std::vector<double> offsets{0.0};
  for (double c : spec.alternatives)
    if (c != 0.0) offsets.push_back(c);
  return offsets;
}

void validate_experiment(const ExperimentSpec& spec) {
  validate(spec.model);
  if (spec.n == 0) throw ValidationError("experiment: n must be positive");
  if (spec.replications <= 0)
    throw ValidationError("experiment: replications must be positive");
  if (!(spec.nominal_level > 0.0) || !(spec.nominal_level < 1.0))
    throw ValidationError("experiment: nominal level must lie in (0, 1)");
  if (spec.methods.empty()) throw ValidationError("experiment: no methods");
  if (spec.stack_order == 0 || spec.stack_order >= spec.n)
    throw ValidationError("experiment: stack order must lie in [1, n)");
  if (spec.theta0.size() != static_cast<std::size_t>(spec.moment.p))
    throw ValidationError("experiment: theta0 has dimension " +
                          std::to_string(spec.theta0.size()) +
                          ", the moment model wants " + std::to_string(spec.moment.p));
  const bool wants_wald =
      std::find(spec.methods.begin(), spec.methods.end(), Method::Mean) !=
          spec.methods.end() ||
      std::find(spec.methods.begin(), spec.methods.end(), Method::Trunc) !=
          spec.methods.end();
  if (wants_wald && (spec.moment.r != 1 || !spec.moment.g))
    throw ValidationError(
        "experiment: mean/trunc methods need a scalar moment with g");
}

std::uint8_t code_of(const ELSolution& sol, double cutoff) {
  switch (sol.status) {
    case ELStatus::NotEnoughBlocks:
      return kFailBlocks;
    case ELStatus::Unbounded:
      return kUnbounded;
    case ELStatus::Converged:
      return 2.0 * sol.ratio <= cutoff ? kAccepted : kRejected;
  }
  return kFailOther;
}

std::uint8_t code_of_error(const Error& e) {
  if (dynamic_cast<const NoRegenerationError*>(&e) ||
      dynamic_cast<const NoViableSmallSetError*>(&e))
    return kFailNoRegen;
  if (dynamic_cast<const NotEnoughBlocksError*>(&e)) return kFailBlocks;
  if (dynamic_cast<const EstimateNotConvergedError*>(&e)) return kFailConverge;
  return kFailOther;
}

RepResult run_rep(const ExperimentSpec& spec, const std::vector<double>& offsets,
                  double cutoff, double z, int rep) {
  RepResult out;
  out.codes.assign(spec.methods.size() * offsets.size(), kFailOther);

  const std::uint64_t rep_seed =
      SplitRng::derive(spec.seed, static_cast<std::uint64_t>(rep));
  ModelSpec model = spec.model;
  model.seed = SplitRng::derive(rep_seed, 0);
  const ChainPath raw = simulate(model, spec.n);
  ChainPath stacked_storage;
  const ChainPath* chain = &raw;
  if (spec.stack_order > 1) {
    stacked_storage = stack(raw, spec.stack_order);
    chain = &stacked_storage;
  }

  std::optional<BlockPartition> partition;
  std::optional<SmallSet> chosen;
  std::uint8_t partition_fail = kFailNoRegen;
  try {
    if (const auto* atomic = std::get_if<AtomicPolicy>(&spec.policy)) {
      partition = atomic_blocks(*chain, atom_equals(atomic->value));
    } else {
      std::vector<CandidateBox> candidates;
      if (const auto* frozen = std::get_if<FrozenSetPolicy>(&spec.policy))
        candidates.push_back(frozen->box);
      else {
        const auto& select = std::get<SelectSetPolicy>(spec.policy);
        candidates = select.candidates.empty() ? quantile_candidates(*chain)
                                               : select.candidates;
      }
      TransitionDensity density(*chain);
      SmallSetOptions options;
      options.grid_per_axis = static_cast<int>(spec.grid_per_axis);
      SmallSet set = select_small_set(*chain, density, candidates, options);
      partition = split_chain(*chain, set, density, SplitRng::derive(rep_seed, 1));
      chosen = std::move(set);
    }
  } catch (const Error& e) {
    partition_fail = code_of_error(e);
    if (partition_fail == kFailBlocks || partition_fail == kFailConverge)
      partition_fail = kFailNoRegen;  // partition-stage failures are all renewal scarcity
  }

  if (partition) {
    out.has_partition = true;
    out.complete_blocks = static_cast<double>(partition->complete_count);
    out.clamped = static_cast<double>(partition->clamped_params);
    if (chosen) {
      out.visits = static_cast<double>(partition->visits);
      out.delta = chosen->delta;
      out.expected = chosen->expected_regenerations;
    } else {
      out.visits = static_cast<double>(partition->regeneration_times.size());
      out.delta = 1.0;
      out.expected = out.visits;
    }
  }

  const double scale = std::sqrt(static_cast<double>(spec.n));
  auto theta_at = [&](double offset) {
    std::vector<double> theta(spec.theta0);
    theta[0] += offset / scale;
    return theta;
  };
  auto g1 = [&](std::span<const double> x) {
    double value = 0.0;
    spec.moment.g(x, &value);
    return value;
  };

  for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
    const Method method = spec.methods[mi];
    std::uint8_t* codes = out.codes.data() + mi * offsets.size();
    switch (method) {
      case Method::ReBEL: {
        for (std::size_t oi = 0; oi < offsets.size(); ++oi) {
          if (!partition) {
            codes[oi] = partition_fail;
            continue;
          }
          try {
            const std::vector<double> theta = theta_at(offsets[oi]);
            const ELSolution sol =
                el_ratio(block_moments(*chain, *partition, spec.moment, theta));
            codes[oi] = code_of(sol, cutoff);
            if (oi == 0 && sol.status != ELStatus::NotEnoughBlocks)
              out.stat_at_null = 2.0 * sol.ratio;
          } catch (const Error& e) {
            codes[oi] = code_of_error(e);
          }
        }
        break;
      }
      case Method::BEL: {
        for (std::size_t oi = 0; oi < offsets.size(); ++oi) {
          try {
            const ELSolution sol = bel_ratio(*chain, spec.moment,
                                             theta_at(offsets[oi]),
                                             spec.bel_block_length);
            codes[oi] = code_of(sol, cutoff);
          } catch (const Error& e) {
            codes[oi] = code_of_error(e);
          }
        }
        break;
      }
      case Method::Mean: {
        try {
          const double estimate = mean_estimate(*chain, spec.moment)[0];
          const double variance =
              bootstrap_variance(*chain, g1, spec.bel_block_length, spec.n_boot,
                                 SplitRng::derive(rep_seed, 2));
          const double half = z * std::sqrt(std::max(variance, 0.0));
          for (std::size_t oi = 0; oi < offsets.size(); ++oi) {
            const double target = theta_at(offsets[oi])[0];
            codes[oi] = std::abs(estimate - target) <= half ? kAccepted : kRejected;
          }
        } catch (const Error& e) {
          std::fill(codes, codes + offsets.size(), code_of_error(e));
        }
        break;
      }
      case Method::Trunc: {
        if (!partition) {
          std::fill(codes, codes + offsets.size(), partition_fail);
          break;
        }
        try {
          const double estimate = trunc_estimate(*chain, *partition, spec.moment)[0];
          const ChainPath segment = complete_segment(*chain, *partition);
          const double variance =
              bootstrap_variance(segment, g1, spec.bel_block_length, spec.n_boot,
                                 SplitRng::derive(rep_seed, 3));
          const double half = z * std::sqrt(std::max(variance, 0.0));
          for (std::size_t oi = 0; oi < offsets.size(); ++oi) {
            const double target = theta_at(offsets[oi])[0];
            codes[oi] = std::abs(estimate - target) <= half ? kAccepted : kRejected;
          }
        } catch (const Error& e) {
          std::fill(codes, codes + offsets.size(), code_of_error(e));
        }
        break;
      }
    }
  }

  if (spec.collect_sigma && partition) {
    try {
      const AsymptoticEstimates est =
          asymptotic_estimates(*chain, *partition, spec.moment, spec.theta0);
      out.sigma = est.sigma;
      out.d = est.d;
    } catch (const Error&) {
      // leave empty; sigma_count tracks usable replications
    }
  }
  return out;
}

std::vector<RepResult> run_all(const ExperimentSpec& spec,
                               const std::vector<double>& offsets,
                               const ProgressFn& progress) {
  validate_experiment(spec);
  const int total = spec.replications;
  const double cutoff = stats::chi2_quantile(spec.moment.r, spec.nominal_level);
  const double z = stats::normal_quantile(0.5 + spec.nominal_level / 2.0);

  std::vector<RepResult> results(static_cast<std::size_t>(total));
  std::atomic<int> done{0};
  std::mutex progress_mutex;
  const int step = std::max(1, total / 100);

  auto work = [&](int lo, int hi) {
    for (int rep = lo; rep < hi; ++rep) {
      auto& slot = results[static_cast<std::size_t>(rep)];
      try {
        slot = run_rep(spec, offsets, cutoff, z, rep);
      } catch (const std::exception&) {
        slot.codes.assign(spec.methods.size() * offsets.size(), kFailOther);
      }
      const int count = ++done;
      if (progress && (count % step == 0 || count == total)) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        progress(count, total);
      }
    }
  };

  const int workers = std::max(1, spec.workers);
  if (workers == 1 || total == 1) {
    work(0, total);
  } else {
    const int chunk = (total + workers - 1) / workers;
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) {
      const int lo = w * chunk;
      const int hi = std::min(total, lo + chunk);
      if (lo >= hi) break;
      threads.emplace_back(work, lo, hi);
    }
    for (auto& t : threads) t.join();
  }
  return results;
}

void append_row(std::string& out, const char* fmt, ...) {
  char buffer[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buffer, sizeof(buffer), fmt, args);
  va_end(args);
  out += buffer;
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::ReBEL: return "rebel";
    case Method::BEL: return "bel";
    case Method::Mean: return "mean";
    case Method::Trunc: return "trunc";
  }
  return "unknown";
}

Method method_from_string(const std::string& name) {
  if (name == "rebel") return Method::ReBEL;
  if (name == "bel") return Method::BEL;
  if (name == "mean") return Method::Mean;
  if (name == "trunc") return Method::Trunc;
  throw ValidationError("unknown method '" + name + "'");
}

double CellReport::acceptance_rate() const {
  return used > 0 ? static_cast<double>(accepted) / used : kNaN;
}

double CellReport::mc_se() const {
  if (used <= 0) return kNaN;
  const double p = acceptance_rate();
  return std::sqrt(p * (1.0 - p) / used);
}

MCReport run_coverage(const ExperimentSpec& spec, const ProgressFn& progress) {
  const std::vector<double> offsets = offsets_of(spec);
  const std::vector<RepResult> results = run_all(spec, offsets, progress);

  MCReport report;
  report.name = spec.name;
  report.model_kind = model_kind_name(spec.model.kind);
  report.n = spec.n;
  report.replications = spec.replications;
  report.nominal_level = spec.nominal_level;
  report.seed = spec.seed;
  report.offsets = offsets;

  for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
    for (std::size_t oi = 0; oi < offsets.size(); ++oi) {
      CellReport cell;
      cell.method = spec.methods[mi];
      cell.offset = offsets[oi];
      for (const RepResult& rep : results) {
        ++cell.total;
        const std::uint8_t code = rep.codes.empty()
                                      ? static_cast<std::uint8_t>(kFailOther)
                                      : rep.codes[mi * offsets.size() + oi];
        switch (code) {
          case kAccepted:
            ++cell.used;
            ++cell.accepted;
            break;
          case kRejected:
            ++cell.used;
            break;
          case kUnbounded:
            ++cell.used;
            ++cell.unbounded;
            break;
          case kFailNoRegen:
            ++cell.failed_no_regeneration;
            break;
          case kFailBlocks:
            ++cell.failed_not_enough_blocks;
            break;
          case kFailConverge:
            ++cell.failed_not_converged;
            break;
          default:
            ++cell.failed_other;
            break;
        }
      }
      cell.flagged = cell.failures() > 0.05 * cell.total;
      report.cells.push_back(cell);
    }
  }

  double blocks = 0, visits = 0, delta = 0, clamped = 0, expected = 0;
  int with_delta = 0;
  for (const RepResult& rep : results) {
    if (!rep.has_partition) continue;
    ++report.partitions;
    blocks += rep.complete_blocks;
    visits += rep.visits;
    clamped += rep.clamped;
    if (std::isfinite(rep.delta)) {
      delta += rep.delta;
      expected += rep.expected;
      ++with_delta;
    }
    if (rep.sigma.size() > 0) {
      if (report.sigma_count == 0) {
        report.mean_sigma = rep.sigma;
        report.mean_d = rep.d;
      } else {
        report.mean_sigma += rep.sigma;
        report.mean_d += rep.d;
      }
      ++report.sigma_count;
    }
  }
  if (report.partitions > 0) {
    report.mean_complete_blocks = blocks / report.partitions;
    report.mean_visits = visits / report.partitions;
    report.mean_clamped = clamped / report.partitions;
  }
  if (with_delta > 0) {
    report.mean_delta = delta / with_delta;
    report.mean_expected_regenerations = expected / with_delta;
  }
  if (report.sigma_count > 0) {
    report.mean_sigma /= report.sigma_count;
    report.mean_d /= report.sigma_count;
  }
  return report;
}

const CellReport& MCReport::cell(Method m, double offset) const {
  for (const CellReport& c : cells)
    if (c.method == m && c.offset == offset) return c;
  throw ValidationError("MCReport: no cell for method " + to_string(m) +
                        " at offset " + std::to_string(offset));
}

std::string MCReport::to_csv() const {
  std::string out =
      "name,model,n,replications,level,seed,method,offset,total,used,accepted,"
      "rejected,unbounded,noregen,notenoughblocks,notconverged,other,"
      "acceptance_rate,mc_se,flagged\n";
  for (const CellReport& c : cells) {
    out += name + "," + model_kind + "," + std::to_string(n) + "," +
           std::to_string(replications) + "," + io::format_double(nominal_level) +
           "," + std::to_string(seed) + "," + to_string(c.method) + "," +
           io::format_double(c.offset) + "," + std::to_string(c.total) + "," +
           std::to_string(c.used) + "," + std::to_string(c.accepted) + "," +
           std::to_string(c.used - c.accepted) + "," +
           std::to_string(c.unbounded) + "," +
           std::to_string(c.failed_no_regeneration) + "," +
           std::to_string(c.failed_not_enough_blocks) + "," +
           std::to_string(c.failed_not_converged) + "," +
           std::to_string(c.failed_other) + "," +
           io::format_double(c.acceptance_rate()) + "," +
           io::format_double(c.mc_se()) + "," + (c.flagged ? "1" : "0") + "\n";
  }
  return out;
}

std::string MCReport::to_table() const {
  std::string out;
  append_row(out, "experiment %s  model %s  n=%zu  reps=%d  level %.3f  seed %llu\n",
             name.c_str(), model_kind.c_str(), n, replications, nominal_level,
             static_cast<unsigned long long>(seed));
  append_row(out,
             "partitions %d/%d  mean blocks %.1f  visits %.1f  delta %.4f  "
             "clamped %.2f  expected regen %.1f\n\n",
             partitions, replications, mean_complete_blocks, mean_visits,
             mean_delta, mean_clamped, mean_expected_regenerations);
  append_row(out, "%-6s %8s %6s %8s %7s %6s %5s %5s\n", "method", "offset",
             "used", "accept%", "mc-se%", "unbnd", "fail", "flag");
  for (const CellReport& c : cells) {
    append_row(out, "%-6s %8.3f %6d %8.2f %7.2f %6d %5d %5s\n",
               to_string(c.method).c_str(), c.offset, c.used,
               100.0 * c.acceptance_rate(), 100.0 * c.mc_se(), c.unbounded,
               c.failures(), c.flagged ? "YES" : "");
  }
  return out;
}

QQReport run_qq(const ExperimentSpec& spec, const ProgressFn& progress) {
  ExperimentSpec qq_spec = spec;
  qq_spec.methods = {Method::ReBEL};
  qq_spec.alternatives.clear();
  const std::vector<double> offsets{0.0};
  const std::vector<RepResult> results = run_all(qq_spec, offsets, progress);

  QQReport report;
  report.name = qq_spec.name;
  report.n = qq_spec.n;
  report.replications = qq_spec.replications;
  report.df = qq_spec.moment.r;
  for (const RepResult& rep : results) {
    if (std::isnan(rep.stat_at_null))
      ++report.failures;
    else if (std::isinf(rep.stat_at_null))
      ++report.unbounded;
    else
      report.statistics.push_back(rep.stat_at_null);
  }
  std::sort(report.statistics.begin(), report.statistics.end());
  if (!report.statistics.empty())
    report.ks = stats::ks_distance_chi2(report.statistics, report.df);
  return report;
}

double QQReport::empirical_quantile(double prob) const {
  return stats::empirical_quantile(statistics, prob);
}

std::string QQReport::to_csv() const {
  std::string out = "prob,empirical,chi2,marker\n";
  const std::size_t m = statistics.size();
  for (std::size_t i = 0; i < m; ++i) {
    const double prob = static_cast<double>(i + 1) / (static_cast<double>(m) + 1.0);
    out += io::format_double(prob) + "," + io::format_double(statistics[i]) + "," +
           io::format_double(stats::chi2_quantile(df, prob)) + ",0\n";
  }
  if (m > 0) {
    for (double prob : {0.5, 0.9, 0.95}) {
      out += io::format_double(prob) + "," +
             io::format_double(empirical_quantile(prob)) + "," +
             io::format_double(stats::chi2_quantile(df, prob)) + ",1\n";
    }
  }
  return out;
}

PowerReport run_power(const ExperimentSpec& spec, const ProgressFn& progress) {
  ExperimentSpec power_spec = spec;
  power_spec.methods = {Method::ReBEL};
  power_spec.collect_sigma = true;
  PowerReport report;
  report.coverage = run_coverage(power_spec, progress);
  if (report.coverage.sigma_count == 0)
    throw SingularVarianceError(
        "run_power: no replication produced a variance estimate");

  const double alpha = 1.0 - power_spec.nominal_level;
  const auto r = static_cast<std::size_t>(power_spec.moment.r);
  for (double offset : report.coverage.offsets) {
    PowerCell cell;
    cell.offset = offset;
    const CellReport& c = report.coverage.cell(Method::ReBEL, offset);
    cell.used = c.used;
    cell.empirical_rejection = 1.0 - c.acceptance_rate();
    if (offset == 0.0) {
      cell.predicted_rejection = alpha;
    } else {
      // Drift of the mean moment under theta0 + offset / sqrt(n) on the
      // first coordinate.
      std::vector<double> delta(r);
      for (std::size_t a = 0; a < r; ++a)
        delta[a] = report.coverage.mean_d(static_cast<Eigen::Index>(a), 0) * offset;
      cell.predicted_rejection =
          predicted_power(delta, report.coverage.mean_sigma, alpha);
    }
    report.cells.push_back(cell);
  }
  return report;
}

std::string PowerReport::to_csv() const {
  std::string out = "offset,used,empirical_rejection,predicted_rejection\n";
  for (const PowerCell& c : cells)
    out += io::format_double(c.offset) + "," + std::to_string(c.used) + "," +
           io::format_double(c.empirical_rejection) + "," +
           io::format_double(c.predicted_rejection) + "\n";
  return out;
}

std::string PowerReport::to_table() const {
  std::string out = coverage.to_table();
  out += "\n";
  append_row(out, "%8s %6s %10s %10s\n", "offset", "used", "reject%", "predict%");
  for (const PowerCell& c : cells)
    append_row(out, "%8.3f %6d %10.2f %10.2f\n", c.offset, c.used,
               100.0 * c.empirical_rejection, 100.0 * c.predicted_rejection);
  return out;
}

std::string ExperimentSpec::to_json() const {
  std::ostringstream out;
  out << "{\"name\": \"" << name << "\", \"model\": " << model.to_json()
      << ", \"n\": " << n << ", \"replications\": " << replications
      << ", \"methods\": [";
  for (std::size_t i = 0; i < methods.size(); ++i)
    out << (i ? ", " : "") << "\"" << to_string(methods[i]) << "\"";
  out << "], \"nominal_level\": " << io::format_double(nominal_level)
      << ", \"alternatives\": [";
  for (std::size_t i = 0; i < alternatives.size(); ++i)
    out << (i ? ", " : "") << io::format_double(alternatives[i]);
  out << "], \"seed\": " << seed << ", \"policy\": ";
  if (const auto* atomic = std::get_if<AtomicPolicy>(&policy)) {
    out << "{\"kind\": \"atomic\", \"value\": " << io::format_double(atomic->value)
        << "}";
  } else if (const auto* frozen = std::get_if<FrozenSetPolicy>(&policy)) {
    out << "{\"kind\": \"frozen\", \"lo\": " << io::to_json(frozen->box.lo)
        << ", \"hi\": " << io::to_json(frozen->box.hi) << "}";
  } else {
    const auto& select = std::get<SelectSetPolicy>(policy);
    out << "{\"kind\": \"select\", \"candidates\": [";
    for (std::size_t i = 0; i < select.candidates.size(); ++i)
      out << (i ? ", " : "") << "{\"lo\": " << io::to_json(select.candidates[i].lo)
          << ", \"hi\": " << io::to_json(select.candidates[i].hi) << "}";
    out << "]}";
  }
  out << ", \"stack_order\": " << stack_order << ", \"moment\": \"" << moment.name
      << "\", \"theta0\": " << io::to_json(theta0)
      << ", \"grid_per_axis\": " << grid_per_axis << ", \"workers\": " << workers
      << ", \"bel_block_length\": " << bel_block_length
      << ", \"n_boot\": " << n_boot << "}";
  return out.str();
}

ExperimentSpec preset_table1(std::size_t n, int replications, std::uint64_t seed) {
  ExperimentSpec spec;
  spec.name = "table1-n" + std::to_string(n);
  spec.model = ModelSpec::ar1(0.9, seed);
  spec.n = n;
  spec.replications = replications;
  spec.methods = {Method::ReBEL, Method::BEL};
  spec.seed = seed;
  // Symmetric interval candidates around the stationary mean; selection keeps
  // the one with the largest expected renewal count per replication.
  SelectSetPolicy policy;
  for (double a = 0.5; a <= 4.0 + 1e-9; a += 0.5)
    policy.candidates.push_back(repeat_interval(-a, a, 1));
  spec.policy = policy;
  spec.moment = mean_model(1);
  spec.theta0 = {0.0};
  return spec;
}

ExperimentSpec preset_table2(int replications, std::uint64_t seed) {
  ExperimentSpec spec;
  spec.name = "table2";
  spec.model = ModelSpec::tgarch(seed);
  spec.n = 1000;
  spec.replications = replications;
  spec.methods = {Method::ReBEL, Method::BEL, Method::Mean, Method::Trunc};
  spec.alternatives = {5.0, 10.0};
  spec.seed = seed;
  spec.policy = FrozenSetPolicy{CandidateBox{{-1.3, -1.3}, {4.7, 4.7}}};
  spec.stack_order = 2;
  spec.moment = indicator_ge_model(10.0);
  spec.theta0 = {0.1479};
  spec.grid_per_axis = 20;
  return spec;
}

ExperimentSpec preset_qqplot(int replications, std::uint64_t seed) {
  ExperimentSpec spec = preset_table2(replications, seed);
  spec.name = "qqplot";
  spec.n = 10000;
  spec.methods = {Method::ReBEL};
  spec.alternatives.clear();
  return spec;
}

namespace {
ExperimentSpec finite_two_state(std::size_t n, int replications, std::uint64_t seed) {
  ExperimentSpec spec;
  spec.model = ModelSpec::finite({{0.7, 0.3}, {0.4, 0.6}}, 0, seed);
  spec.n = n;
  spec.replications = replications;
  spec.seed = seed;
  spec.policy = AtomicPolicy{0.0};
  spec.moment = mean_model(1);
  spec.theta0 = {3.0 / 7.0};  // stationary mean of the two-state chain
  return spec;
}
}  // namespace

ExperimentSpec preset_wilks(std::size_t n, int replications, std::uint64_t seed) {
  ExperimentSpec spec = finite_two_state(n, replications, seed);
  spec.name = "wilks-n" + std::to_string(n);
  return spec;
}

ExperimentSpec preset_power(int replications, std::uint64_t seed) {
  ExperimentSpec spec = finite_two_state(5000, replications, seed);
  spec.name = "power";
  spec.alternatives = {2.0, 4.0};
  spec.collect_sigma = true;
  return spec;
}

ExperimentSpec preset_by_name(const std::string& name, int replications,
                              std::uint64_t seed) {
  if (name == "table1") return preset_table1(1000, replications, seed);
  if (name == "table2") return preset_table2(replications, seed);
  if (name == "qqplot") return preset_qqplot(replications, seed);
  if (name == "wilks") return preset_wilks(2000, replications, seed);
  if (name == "power") return preset_power(replications, seed);
  throw ValidationError("unknown preset '" + name +
                        "' (expected table1, table2, qqplot, wilks, power)");
}

}  // namespace rebel
