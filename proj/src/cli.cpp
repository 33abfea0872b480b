#include "rebel/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rebel/baselines.hpp"
#include "rebel/errors.hpp"
#include "rebel/infer.hpp"
#include "rebel/io.hpp"
#include "rebel/mc.hpp"
#include "rebel/models.hpp"
#include "rebel/regen.hpp"
#include "rebel/rng.hpp"
#include "rebel/stats.hpp"

namespace rebel::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

int exit_code_for(const Error& e) {
  if (dynamic_cast<const NoRegenerationError*>(&e)) return 3;
  if (dynamic_cast<const NoViableSmallSetError*>(&e)) return 3;
  if (dynamic_cast<const EmptyRegionError*>(&e)) return 4;
  if (dynamic_cast<const ValidationError*>(&e)) return 2;
  return 5;
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file);
  if (!out) throw ValidationError("cannot open " + file.string() + " for writing");
  out << text;
  if (text.empty() || text.back() != '\n') out << "\n";
  if (!out) throw ValidationError("failed writing " + file.string());
}

fs::path prepare_out_dir(const std::string& out) {
  if (out.empty()) throw ValidationError("--out directory is required");
  fs::path dir(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ValidationError("cannot create output directory " + out);
  return dir;
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file " + path);
  json cfg;
  try {
    in >> cfg;
  } catch (const json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
  if (!cfg.is_object()) throw ValidationError(path + ": config must be a JSON object");
  return cfg;
}

// Flag-beats-config resolution: a config value fills in only when the flag
// was not given on the command line.
struct Overlay {
  CLI::App* cmd = nullptr;
  json cfg = json::object();

  bool passed(const std::string& flag) const { return cmd->count(flag) > 0; }
  bool available(const std::string& flag, const std::string& key) const {
    return passed(flag) || cfg.contains(key);
  }
  template <typename T>
  void fallback(const std::string& flag, const std::string& key, T& value) const {
    if (!passed(flag) && cfg.contains(key)) {
      try {
        value = cfg.at(key).get<T>();
      } catch (const json::exception& e) {
        throw ValidationError("config key '" + key + "': " + e.what());
      }
    }
  }
};

std::vector<double> parse_double_list(const std::string& text, const char* what) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string field =
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      std::size_t used = 0;
      values.push_back(std::stod(field, &used));
      if (used != field.size()) throw std::invalid_argument(field);
    } catch (const std::exception&) {
      throw ValidationError(std::string(what) + ": bad number '" + field + "'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return values;
}

std::vector<std::vector<double>> parse_transition(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t semi = text.find(';', pos);
    const std::string row =
        text.substr(pos, semi == std::string::npos ? std::string::npos : semi - pos);
    rows.push_back(parse_double_list(row, "--transition"));
    if (semi == std::string::npos) break;
    pos = semi + 1;
  }
  return rows;
}

// "lo:hi[,lo:hi...]" -> pairs.
std::vector<std::array<double, 2>> parse_intervals(const std::string& text) {
  std::vector<std::array<double, 2>> pairs;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string field =
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    const std::size_t colon = field.find(':');
    if (colon == std::string::npos)
      throw ValidationError("--box: expected lo:hi, got '" + field + "'");
    const auto lo = parse_double_list(field.substr(0, colon), "--box");
    const auto hi = parse_double_list(field.substr(colon + 1), "--box");
    if (lo.size() != 1 || hi.size() != 1 || !(lo[0] < hi[0]))
      throw ValidationError("--box: expected lo < hi in '" + field + "'");
    pairs.push_back({lo[0], hi[0]});
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return pairs;
}

json intervals_to_json(const std::vector<std::array<double, 2>>& pairs) {
  json out = json::array();
  for (const auto& p : pairs) out.push_back({p[0], p[1]});
  return out;
}

std::vector<std::array<double, 2>> intervals_from_json(const json& j) {
  std::vector<std::array<double, 2>> pairs;
  for (const auto& item : j) {
    if (!item.is_array() || item.size() != 2)
      throw ValidationError("config: box entries must be [lo, hi] pairs");
    pairs.push_back({item.at(0).get<double>(), item.at(1).get<double>()});
  }
  return pairs;
}

// Tile per-coordinate intervals of the original chain across a stacked state.
CandidateBox tile_box(const std::vector<std::array<double, 2>>& base,
                      std::size_t original_dim, std::size_t order) {
  if (base.size() != original_dim && base.size() != 1)
    throw ValidationError("--box: expected 1 or " + std::to_string(original_dim) +
                          " intervals, got " + std::to_string(base.size()));
  CandidateBox box;
  for (std::size_t rep = 0; rep < order; ++rep) {
    for (std::size_t c = 0; c < original_dim; ++c) {
      const auto& pair = base[base.size() == 1 ? 0 : c];
      box.lo.push_back(pair[0]);
      box.hi.push_back(pair[1]);
    }
  }
  return box;
}

std::vector<Method> parse_methods(const std::string& text) {
  std::vector<Method> methods;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string field =
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    methods.push_back(method_from_string(field));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (methods.empty()) throw ValidationError("--methods: empty list");
  return methods;
}

struct MomentChoice {
  MomentModel model;
  json descriptor;
};

MomentChoice resolve_moment(const Overlay& ov, const std::string& moment_name,
                            double indicator_ge, const std::string& poly) {
  MomentChoice choice;
  const bool has_indicator = ov.available("--indicator-ge", "indicator_ge");
  const bool has_poly = ov.available("--poly", "poly");
  if (has_indicator && has_poly)
    throw ValidationError("--indicator-ge and --poly are mutually exclusive");
  if (has_indicator) {
    double threshold = indicator_ge;
    ov.fallback("--indicator-ge", "indicator_ge", threshold);
    choice.model = indicator_ge_model(threshold);
    choice.descriptor = {{"indicator_ge", threshold}};
  } else if (has_poly) {
    std::string spec = poly;
    ov.fallback("--poly", "poly", spec);
    std::vector<int> exponents;
    for (double e : parse_double_list(spec, "--poly"))
      exponents.push_back(static_cast<int>(e));
    choice.model = poly_model(exponents);
    choice.descriptor = {{"poly", exponents}};
  } else {
    if (moment_name != "mean")
      throw ValidationError("unknown moment '" + moment_name +
                            "' (expected mean, or use --indicator-ge / --poly)");
    choice.model = mean_model(1);
    choice.descriptor = {{"moment", "mean"}};
  }
  return choice;
}

ProgressFn progress_printer(bool enabled, const std::string& label) {
  if (!enabled) return {};
  return [label](int done, int total) {
    std::fprintf(stderr, "\r%s: %d/%d", label.c_str(), done, total);
    if (done == total) std::fprintf(stderr, "\n");
    std::fflush(stderr);
  };
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string model = "ar1";
  std::size_t n = 1000;
  std::uint64_t seed = 1;
  double rho = 0.9;
  double ar = 0.97;
  double vol_intercept = 1.0;
  double vol_abs = 0.5;
  double vol_pos = 0.4;
  std::string transition = "0.7,0.3;0.4,0.6";
  std::size_t initial_state = 0;
  std::string out;
  std::string config;
};

int cmd_simulate(const SimulateArgs& args, Overlay& ov) {
  SimulateArgs a = args;
  ov.fallback("--n", "n", a.n);
  ov.fallback("--out", "out", a.out);

  ModelSpec model;
  if (!ov.passed("--model") && ov.cfg.contains("model_spec")) {
    model = ModelSpec::from_json(ov.cfg.at("model_spec").dump());
  } else {
    if (a.model == "finite")
      model = ModelSpec::finite(parse_transition(a.transition), a.initial_state,
                                a.seed);
    else if (a.model == "ar1")
      model = ModelSpec::ar1(a.rho, a.seed);
    else if (a.model == "tgarch")
      model = ModelSpec::tgarch(a.seed);
    else
      throw ValidationError("unknown model '" + a.model +
                            "' (expected finite, ar1, tgarch)");
  }
  if (ov.passed("--seed")) model.seed = a.seed;
  if (ov.passed("--rho")) model.rho = a.rho;
  if (ov.passed("--ar")) model.ar = a.ar;
  if (ov.passed("--vol-intercept")) model.vol_intercept = a.vol_intercept;
  if (ov.passed("--vol-abs")) model.vol_abs = a.vol_abs;
  if (ov.passed("--vol-pos")) model.vol_pos = a.vol_pos;
  if (ov.passed("--transition")) model.transition = parse_transition(a.transition);
  if (ov.passed("--initial-state")) model.initial_state = a.initial_state;
  validate(model);

  const fs::path dir = prepare_out_dir(a.out);
  const ChainPath path = simulate(model, a.n);
  io::write_path_csv(path, (dir / "path.csv").string());

  json manifest{{"command", "simulate"},
                {"model_spec", json::parse(model.to_json())},
                {"n", a.n},
                {"out", a.out}};
  write_text(dir / "manifest.json", manifest.dump(2));
  std::printf("wrote %s (%zu rows)\n", (dir / "path.csv").c_str(), path.length());
  return 0;
}

// ------------------------------------------------------------------- split

struct SplitArgs {
  std::string in;
  std::string out;
  double atom_value = 0.0;
  std::string box;
  std::size_t stack = 1;
  std::string order;  // "" or "auto"
  int max_order = 3;
  int grid = 0;
  std::string bandwidth;
  std::uint64_t seed = 1;
  double min_expected = 2.0;
  std::string config;
};

int cmd_split(const SplitArgs& args, Overlay& ov) {
  SplitArgs a = args;
  ov.fallback("--in", "in", a.in);
  ov.fallback("--out", "out", a.out);
  ov.fallback("--stack", "stack", a.stack);
  ov.fallback("--order", "order", a.order);
  ov.fallback("--max-order", "max_order", a.max_order);
  ov.fallback("--grid", "grid", a.grid);
  ov.fallback("--seed", "seed", a.seed);
  ov.fallback("--min-expected", "min_expected", a.min_expected);
  if (a.in.empty()) throw ValidationError("--in is required");
  if (!a.order.empty() && a.order != "auto")
    throw ValidationError("--order accepts only 'auto'; use --stack for a fixed order");

  const bool atomic_mode = ov.available("--atom-value", "atom_value");
  const bool box_mode = ov.available("--box", "box");
  if (atomic_mode && box_mode)
    throw ValidationError("--atom-value and --box are mutually exclusive");
  ov.fallback("--atom-value", "atom_value", a.atom_value);

  std::vector<std::array<double, 2>> base_box;
  if (box_mode) {
    if (ov.passed("--box"))
      base_box = parse_intervals(a.box);
    else
      base_box = intervals_from_json(ov.cfg.at("box"));
  }

  const ChainPath path = io::read_path_csv(a.in);
  const fs::path dir = prepare_out_dir(a.out);

  json smallset;
  json order_trace = json::array();
  std::size_t order = a.stack;
  if (a.order == "auto") {
    if (atomic_mode)
      throw ValidationError("--order auto applies to the splitting modes only");
    OrderContext ctx;
    ctx.moment_g = [](std::span<const double> x) { return x[0]; };
    if (box_mode) {
      CandidateBox base = tile_box(base_box, path.dim, 1);
      ctx.candidates = {base};
    }
    ctx.seed = a.seed;
    ctx.grid_per_axis = a.grid;
    const OrderResult result = estimate_order(path, a.max_order, ctx);
    order = static_cast<std::size_t>(result.order);
    for (const OrderTestRecord& rec : result.trace)
      order_trace.push_back({{"order", rec.k},
                             {"blocks", rec.blocks},
                             {"rho", rec.rho},
                             {"t_stat", rec.t_stat},
                             {"p_value", rec.p_value},
                             {"accepted", rec.accepted}});
    if (result.exhausted)
      std::fprintf(stderr,
                   "note: no order up to %d passed the independence test; "
                   "using %zu\n",
                   a.max_order, order);
  }

  ChainPath stacked_storage;
  const ChainPath* chain = &path;
  if (order > 1) {
    stacked_storage = stack(path, order);
    chain = &stacked_storage;
  }

  BlockPartition partition;
  if (atomic_mode) {
    partition = atomic_blocks(*chain, atom_equals(a.atom_value));
    smallset = {{"kind", "atomic"},
                {"value", a.atom_value},
                {"order", order},
                {"renewals", partition.regeneration_times.size()}};
  } else {
    std::vector<double> bandwidth;
    if (ov.passed("--bandwidth"))
      bandwidth = parse_double_list(a.bandwidth, "--bandwidth");
    else if (ov.cfg.contains("bandwidth"))
      bandwidth = ov.cfg.at("bandwidth").get<std::vector<double>>();
    if (bandwidth.size() == 1 && chain->dim > 1)
      bandwidth.assign(chain->dim, bandwidth[0]);

    const TransitionDensity density(*chain, bandwidth);
    std::vector<CandidateBox> candidates;
    if (box_mode)
      candidates = {tile_box(base_box, path.dim, order)};
    else
      candidates = quantile_candidates(*chain);
    SmallSetOptions options;
    options.grid_per_axis = a.grid;
    options.min_expected = a.min_expected;
    const SmallSet set = select_small_set(*chain, density, candidates, options);
    partition = split_chain(*chain, set, density, a.seed);
    smallset = json::parse(set.to_json());
    smallset["kind"] = "split";
    smallset["order"] = order;
    smallset["renewals"] = partition.regeneration_times.size();
    smallset["visits"] = partition.visits;
    smallset["clamped_params"] = partition.clamped_params;
    smallset["bandwidth"] = density.bandwidth();
  }
  if (!order_trace.empty()) smallset["order_trace"] = order_trace;

  io::write_blocks_csv(partition, (dir / "blocks.csv").string());
  write_text(dir / "smallset.json", smallset.dump(2));

  json manifest{{"command", "split"}, {"in", a.in},   {"out", a.out},
                {"stack", order},     {"grid", a.grid}, {"seed", a.seed},
                {"min_expected", a.min_expected}};
  if (atomic_mode) manifest["atom_value"] = a.atom_value;
  if (box_mode) manifest["box"] = intervals_to_json(base_box);
  if (!a.order.empty()) manifest["order_requested"] = a.order;
  if (!atomic_mode && smallset.contains("bandwidth"))
    manifest["bandwidth"] = smallset["bandwidth"];
  write_text(dir / "manifest.json", manifest.dump(2));
  std::printf("wrote %s (%zu complete blocks)\n", (dir / "blocks.csv").c_str(),
              partition.complete_count);
  return 0;
}

// ------------------------------------------------------------------- el-ci

struct ElCiArgs {
  std::string in;
  std::string blocks;
  std::string out;
  std::size_t stack = 1;
  std::string moment = "mean";
  double indicator_ge = 0.0;
  std::string poly;
  std::string methods = "rebel";
  double level = 0.95;
  std::string kind = "plain";
  std::size_t bel_block_length = 0;
  int n_boot = 500;
  std::uint64_t seed = 1;
  bool curve = false;
  int curve_points = 101;
  std::string config;
};

int cmd_el_ci(const ElCiArgs& args, Overlay& ov) {
  ElCiArgs a = args;
  ov.fallback("--in", "in", a.in);
  ov.fallback("--blocks", "blocks", a.blocks);
  ov.fallback("--out", "out", a.out);
  ov.fallback("--stack", "stack", a.stack);
  ov.fallback("--moment", "moment", a.moment);
  ov.fallback("--methods", "methods", a.methods);
  ov.fallback("--level", "level", a.level);
  ov.fallback("--kind", "kind", a.kind);
  ov.fallback("--bel-block-length", "bel_block_length", a.bel_block_length);
  ov.fallback("--n-boot", "n_boot", a.n_boot);
  ov.fallback("--seed", "seed", a.seed);
  ov.fallback("--curve", "curve", a.curve);
  ov.fallback("--curve-points", "curve_points", a.curve_points);
  if (a.in.empty()) throw ValidationError("--in is required");
  if (!(a.level > 0.0) || !(a.level < 1.0))
    throw ValidationError("--level must lie in (0, 1)");
  if (a.kind != "plain" && a.kind != "corrected")
    throw ValidationError("--kind must be plain or corrected");

  const MomentChoice moment = resolve_moment(ov, a.moment, a.indicator_ge, a.poly);
  if (moment.model.p != 1)
    throw ValidationError("el-ci: the moment must have one parameter, got " +
                          std::to_string(moment.model.p));
  const std::vector<Method> methods = parse_methods(a.methods);

  const ChainPath raw = io::read_path_csv(a.in);
  ChainPath stacked_storage;
  const ChainPath* chain = &raw;
  if (a.stack > 1) {
    stacked_storage = stack(raw, a.stack);
    chain = &stacked_storage;
  }
  const std::size_t n = chain->length();

  const bool needs_blocks =
      std::find(methods.begin(), methods.end(), Method::ReBEL) != methods.end() ||
      std::find(methods.begin(), methods.end(), Method::Trunc) != methods.end();
  std::optional<BlockPartition> partition;
  if (needs_blocks) {
    if (a.blocks.empty())
      throw ValidationError("--blocks is required for the rebel/trunc methods");
    partition = io::read_blocks_csv(a.blocks, n);
  }

  const fs::path dir = prepare_out_dir(a.out);
  const double cutoff = stats::chi2_quantile(1, a.level);
  const double z = stats::normal_quantile(0.5 + a.level / 2.0);
  auto g1 = [&](std::span<const double> x) {
    double value = 0.0;
    moment.model.g(x, &value);
    return value;
  };

  json intervals = json::array();
  std::optional<ConfidenceInterval> rebel_ci;
  for (Method method : methods) {
    switch (method) {
      case Method::ReBEL: {
        CIOptions options;
        options.level = a.level;
        options.kind = a.kind == "plain" ? CIKind::PlainRatio : CIKind::Corrected;
        const ConfidenceInterval ci =
            confidence_interval(*chain, *partition, moment.model, options);
        rebel_ci = ci;
        intervals.push_back({{"method", "rebel"},
                             {"kind", a.kind},
                             {"lower", ci.lower},
                             {"upper", ci.upper},
                             {"center", ci.center}});
        break;
      }
      case Method::BEL: {
        const std::size_t len =
            a.bel_block_length ? a.bel_block_length : bel_block_length(n);
        const std::size_t count = n / len;
        if (count < 1)
          throw NotEnoughBlocksError("el-ci: no fixed block fits the path");
        const std::size_t used = count * len;
        double estimate = 0.0;
        for (std::size_t i = 0; i < used; ++i) estimate += g1(chain->state(i));
        estimate /= static_cast<double>(used);
        const Eigen::MatrixXd y =
            bel_block_moments(*chain, moment.model, {&estimate, 1}, len);
        const double sigma2 = y.squaredNorm() / static_cast<double>(used);
        const double se = std::sqrt(sigma2 / static_cast<double>(used));
        auto statistic = [&](double theta) {
          return 2.0 * bel_ratio(*chain, moment.model, {&theta, 1}, len).ratio;
        };
        CIOptions options;
        options.level = a.level;
        const ConfidenceInterval ci = bisect_interval(
            statistic, cutoff, estimate, 10.0 * std::max(se, 1e-12), options);
        if (ci.empty)
          throw EmptyRegionError("el-ci: fixed-block region is empty at " +
                                 std::to_string(estimate));
        intervals.push_back({{"method", "bel"},
                             {"lower", ci.lower},
                             {"upper", ci.upper},
                             {"center", ci.center},
                             {"block_length", len}});
        break;
      }
      case Method::Mean: {
        const double estimate = mean_estimate(*chain, moment.model)[0];
        const double variance = bootstrap_variance(
            *chain, g1, a.bel_block_length, a.n_boot, a.seed);
        const double half = z * std::sqrt(std::max(variance, 0.0));
        intervals.push_back({{"method", "mean"},
                             {"lower", estimate - half},
                             {"upper", estimate + half},
                             {"center", estimate},
                             {"se", std::sqrt(std::max(variance, 0.0))}});
        break;
      }
      case Method::Trunc: {
        const double estimate =
            trunc_estimate(*chain, *partition, moment.model)[0];
        const ChainPath segment = complete_segment(*chain, *partition);
        const double variance =
            bootstrap_variance(segment, g1, a.bel_block_length, a.n_boot,
                               SplitRng::derive(a.seed, 1));
        const double half = z * std::sqrt(std::max(variance, 0.0));
        intervals.push_back({{"method", "trunc"},
                             {"lower", estimate - half},
                             {"upper", estimate + half},
                             {"center", estimate},
                             {"se", std::sqrt(std::max(variance, 0.0))}});
        break;
      }
    }
  }

  json report{{"level", a.level}, {"intervals", intervals}};
  write_text(dir / "ci.json", report.dump(2));

  if (a.curve) {
    if (!rebel_ci)
      throw ValidationError("--curve needs the rebel method");
    if (a.curve_points < 2)
      throw ValidationError("--curve-points must be at least 2");
    const double width = rebel_ci->upper - rebel_ci->lower;
    const double lo = rebel_ci->lower - 0.25 * width;
    const double hi = rebel_ci->upper + 0.25 * width;
    std::optional<double> ratio_tilde;
    if (a.kind == "corrected") {
      const MeleResult fit =
          mele(*chain, *partition, moment.model, std::vector<double>{0.0});
      ratio_tilde = fit.ratio;
    }
    std::string curve = "theta,statistic\n";
    for (int i = 0; i < a.curve_points; ++i) {
      const double theta =
          lo + (hi - lo) * static_cast<double>(i) / (a.curve_points - 1);
      const double ratio =
          el_ratio(block_moments(*chain, *partition, moment.model, {&theta, 1}))
              .ratio;
      const double stat = ratio_tilde ? std::max(0.0, 2.0 * (ratio - *ratio_tilde))
                                      : 2.0 * ratio;
      curve += io::format_double(theta) + "," + io::format_double(stat) + "\n";
    }
    write_text(dir / "curve.csv", curve);
  }

  json manifest{{"command", "el-ci"},
                {"in", a.in},
                {"out", a.out},
                {"stack", a.stack},
                {"methods", a.methods},
                {"level", a.level},
                {"kind", a.kind},
                {"bel_block_length", a.bel_block_length},
                {"n_boot", a.n_boot},
                {"seed", a.seed},
                {"curve", a.curve},
                {"curve_points", a.curve_points}};
  for (auto& [key, value] : moment.descriptor.items()) manifest[key] = value;
  if (!a.blocks.empty()) manifest["blocks"] = a.blocks;
  write_text(dir / "manifest.json", manifest.dump(2));
  std::printf("wrote %s\n", (dir / "ci.json").c_str());
  return 0;
}

// ---------------------------------------------------------------------- mc

struct McArgs {
  std::string preset;
  std::size_t n = 0;  // 0: preset default
  int reps = 2000;
  std::uint64_t seed = 1;
  int workers = 1;
  int grid = 0;
  double level = 0.95;
  std::string methods;
  std::size_t bel_block_length = 0;
  int n_boot = 500;
  bool progress = false;
  std::string out;
  std::string config;
};

ExperimentSpec resolve_experiment(const McArgs& a, Overlay& ov) {
  if (a.preset.empty()) throw ValidationError("--preset is required");
  ExperimentSpec spec = preset_by_name(a.preset, a.reps, a.seed);
  if (ov.available("--n", "n") && a.n > 0) {
    spec.n = a.n;
    if (a.preset == "table1")
      spec.name = "table1-n" + std::to_string(a.n);
    else if (a.preset == "wilks")
      spec.name = "wilks-n" + std::to_string(a.n);
  }
  if (ov.available("--level", "level")) spec.nominal_level = a.level;
  if (ov.available("--methods", "methods") && !a.methods.empty())
    spec.methods = parse_methods(a.methods);
  if (ov.available("--grid", "grid") && a.grid > 0)
    spec.grid_per_axis = static_cast<std::size_t>(a.grid);
  if (ov.available("--bel-block-length", "bel_block_length"))
    spec.bel_block_length = a.bel_block_length;
  if (ov.available("--n-boot", "n_boot")) spec.n_boot = a.n_boot;
  spec.workers = a.workers;
  return spec;
}

void apply_mc_fallbacks(McArgs& a, Overlay& ov) {
  ov.fallback("--preset", "preset", a.preset);
  ov.fallback("--n", "n", a.n);
  ov.fallback("--reps", "replications", a.reps);
  ov.fallback("--seed", "seed", a.seed);
  ov.fallback("--workers", "workers", a.workers);
  ov.fallback("--grid", "grid", a.grid);
  ov.fallback("--level", "level", a.level);
  ov.fallback("--methods", "methods", a.methods);
  ov.fallback("--bel-block-length", "bel_block_length", a.bel_block_length);
  ov.fallback("--n-boot", "n_boot", a.n_boot);
  ov.fallback("--out", "out", a.out);
}

json mc_manifest(const char* command, const McArgs& a, const ExperimentSpec& spec) {
  return json{{"command", command},
              {"preset", a.preset},
              {"n", spec.n},
              {"replications", spec.replications},
              {"seed", spec.seed},
              {"workers", spec.workers},
              {"grid", a.grid},
              {"level", spec.nominal_level},
              {"methods", a.methods},
              {"bel_block_length", spec.bel_block_length},
              {"n_boot", spec.n_boot},
              {"out", a.out},
              {"experiment", json::parse(spec.to_json())}};
}

int cmd_mc(const McArgs& args, Overlay& ov) {
  McArgs a = args;
  apply_mc_fallbacks(a, ov);
  const ExperimentSpec spec = resolve_experiment(a, ov);
  const fs::path dir = prepare_out_dir(a.out);
  const ProgressFn progress = progress_printer(a.progress, spec.name);

  std::string table;
  if (a.preset == "power") {
    const PowerReport report = run_power(spec, progress);
    write_text(dir / "report.csv", report.coverage.to_csv());
    write_text(dir / "power.csv", report.to_csv());
    table = report.to_table();
  } else {
    const MCReport report = run_coverage(spec, progress);
    write_text(dir / "report.csv", report.to_csv());
    table = report.to_table();
  }
  write_text(dir / "table.txt", table);
  write_text(dir / "manifest.json", mc_manifest("mc", a, spec).dump(2));
  std::fputs(table.c_str(), stdout);
  return 0;
}

int cmd_qq(const McArgs& args, Overlay& ov) {
  McArgs a = args;
  apply_mc_fallbacks(a, ov);
  if (a.preset.empty()) a.preset = "qqplot";
  if (a.preset == "tgarch") a.preset = "qqplot";  // historical alias
  const ExperimentSpec spec = resolve_experiment(a, ov);
  const fs::path dir = prepare_out_dir(a.out);

  const QQReport report = run_qq(spec, progress_printer(a.progress, spec.name));
  write_text(dir / "qq.csv", report.to_csv());

  json summary{{"ks", report.ks},
               {"replications", report.replications},
               {"statistics", report.statistics.size()},
               {"unbounded", report.unbounded},
               {"failures", report.failures},
               {"df", report.df}};
  if (!report.statistics.empty()) {
    json quantiles = json::object();
    for (double prob : {0.5, 0.9, 0.95}) {
      char key[8];
      std::snprintf(key, sizeof(key), "p%02d", static_cast<int>(prob * 100));
      quantiles[key] = {{"empirical", report.empirical_quantile(prob)},
                        {"reference", stats::chi2_quantile(report.df, prob)}};
    }
    summary["quantiles"] = quantiles;
  }
  write_text(dir / "qq_summary.json", summary.dump(2));
  write_text(dir / "manifest.json", mc_manifest("qq", a, spec).dump(2));
  std::printf("ks %.4f over %zu statistics (%d unbounded, %d failures)\n",
              report.ks, report.statistics.size(), report.unbounded,
              report.failures);
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Regenerative block empirical likelihood for Markov chains"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "rebel 0.1.0");

  SimulateArgs sim;
  CLI::App* simulate_cmd =
      app.add_subcommand("simulate", "Simulate a chain and write it as CSV");
  simulate_cmd->add_option("--model", sim.model, "finite | ar1 | tgarch");
  simulate_cmd->add_option("--n", sim.n, "number of observations");
  simulate_cmd->add_option("--seed", sim.seed, "simulation seed");
  simulate_cmd->add_option("--rho", sim.rho, "ar1 coefficient");
  simulate_cmd->add_option("--ar", sim.ar, "tgarch autoregression");
  simulate_cmd->add_option("--vol-intercept", sim.vol_intercept, "tgarch volatility intercept");
  simulate_cmd->add_option("--vol-abs", sim.vol_abs, "tgarch |eps| loading");
  simulate_cmd->add_option("--vol-pos", sim.vol_pos, "tgarch eps+ loading");
  simulate_cmd->add_option("--transition", sim.transition,
                           "finite rows 'p11,p12;p21,p22'");
  simulate_cmd->add_option("--initial-state", sim.initial_state, "finite start state");
  simulate_cmd->add_option("-o,--out", sim.out, "output directory");
  simulate_cmd->add_option("--config", sim.config, "JSON config file");

  SplitArgs split_args;
  CLI::App* split_cmd =
      app.add_subcommand("split", "Cut a path into regeneration blocks");
  split_cmd->add_option("--in", split_args.in, "input path CSV");
  split_cmd->add_option("-o,--out", split_args.out, "output directory");
  split_cmd->add_option("--atom-value", split_args.atom_value,
                        "exact atom on coordinate 0");
  split_cmd->add_option("--box", split_args.box, "small set 'lo:hi[,lo:hi...]'");
  split_cmd->add_option("--stack", split_args.stack, "embedding order");
  split_cmd->add_option("--order", split_args.order, "'auto' to choose the order");
  split_cmd->add_option("--max-order", split_args.max_order, "cap for --order auto");
  split_cmd->add_option("--grid", split_args.grid, "density grid points per axis");
  split_cmd->add_option("--bandwidth", split_args.bandwidth,
                        "kernel bandwidths 'b' or 'b1,b2,...'");
  split_cmd->add_option("--seed", split_args.seed, "splitting randomization seed");
  split_cmd->add_option("--min-expected", split_args.min_expected,
                        "small-set viability threshold");
  split_cmd->add_option("--config", split_args.config, "JSON config file");

  ElCiArgs ci_args;
  CLI::App* ci_cmd =
      app.add_subcommand("el-ci", "Confidence intervals for a scalar moment");
  ci_cmd->add_option("--in", ci_args.in, "input path CSV");
  ci_cmd->add_option("--blocks", ci_args.blocks, "blocks CSV from split");
  ci_cmd->add_option("-o,--out", ci_args.out, "output directory");
  ci_cmd->add_option("--stack", ci_args.stack, "embedding order used by split");
  ci_cmd->add_option("--moment", ci_args.moment, "moment preset (mean)");
  ci_cmd->add_option("--indicator-ge", ci_args.indicator_ge,
                     "indicator moment 1{x1 >= c}");
  ci_cmd->add_option("--poly", ci_args.poly, "polynomial moment exponents 'e1,...'");
  ci_cmd->add_option("--methods", ci_args.methods, "rebel,bel,mean,trunc");
  ci_cmd->add_option("--level", ci_args.level, "confidence level");
  ci_cmd->add_option("--kind", ci_args.kind, "plain | corrected");
  ci_cmd->add_option("--bel-block-length", ci_args.bel_block_length,
                     "fixed block length (0: n^(1/3))");
  ci_cmd->add_option("--n-boot", ci_args.n_boot, "bootstrap resamples");
  ci_cmd->add_option("--seed", ci_args.seed, "bootstrap seed");
  ci_cmd->add_flag("--curve", ci_args.curve, "emit a (theta, statistic) grid");
  ci_cmd->add_option("--curve-points", ci_args.curve_points, "curve resolution");
  ci_cmd->add_option("--config", ci_args.config, "JSON config file");

  McArgs mc_args;
  CLI::App* mc_cmd = app.add_subcommand("mc", "Coverage / power experiments");
  McArgs qq_args;
  CLI::App* qq_cmd = app.add_subcommand("qq", "Null-distribution sample vs chi-square");
  for (auto [cmd, target] : {std::pair{mc_cmd, &mc_args}, std::pair{qq_cmd, &qq_args}}) {
    cmd->add_option("--preset", target->preset,
                    "table1 | table2 | qqplot | wilks | power");
    cmd->add_option("--n", target->n, "path length override");
    cmd->add_option("--reps", target->reps, "replications");
    cmd->add_option("--seed", target->seed, "master seed");
    cmd->add_option("--workers", target->workers, "parallel workers");
    cmd->add_option("--grid", target->grid, "density grid points per axis");
    cmd->add_option("--level", target->level, "nominal confidence level");
    cmd->add_option("--methods", target->methods, "method list override");
    cmd->add_option("--bel-block-length", target->bel_block_length,
                    "fixed block length (0: n^(1/3))");
    cmd->add_option("--n-boot", target->n_boot, "bootstrap resamples");
    cmd->add_flag("--progress", target->progress, "report progress on stderr");
    cmd->add_option("-o,--out", target->out, "output directory");
    cmd->add_option("--config", target->config, "JSON config file");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (simulate_cmd->parsed()) {
      Overlay ov{simulate_cmd, sim.config.empty() ? json::object()
                                                  : load_config(sim.config)};
      return cmd_simulate(sim, ov);
    }
    if (split_cmd->parsed()) {
      Overlay ov{split_cmd, split_args.config.empty()
                                ? json::object()
                                : load_config(split_args.config)};
      return cmd_split(split_args, ov);
    }
    if (ci_cmd->parsed()) {
      Overlay ov{ci_cmd,
                 ci_args.config.empty() ? json::object() : load_config(ci_args.config)};
      return cmd_el_ci(ci_args, ov);
    }
    if (mc_cmd->parsed()) {
      Overlay ov{mc_cmd,
                 mc_args.config.empty() ? json::object() : load_config(mc_args.config)};
      return cmd_mc(mc_args, ov);
    }
    if (qq_cmd->parsed()) {
      Overlay ov{qq_cmd,
                 qq_args.config.empty() ? json::object() : load_config(qq_args.config)};
      return cmd_qq(qq_args, ov);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 5;
  }
  return 2;
}

}  // namespace rebel::cli
