#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rebel/el.hpp"
#include "rebel/models.hpp"
#include "rebel/regen.hpp"

namespace rebel {

enum class Method { ReBEL, BEL, Mean, Trunc };
std::string to_string(Method m);
Method method_from_string(const std::string& name);

// How each replication obtains its regeneration structure.
struct AtomicPolicy {
  double value = 0.0;  // renewal whenever coordinate 0 hits this value
};
struct FrozenSetPolicy {
  CandidateBox box;  // fixed small set; the minorization mass is re-estimated per path
};
struct SelectSetPolicy {
  std::vector<CandidateBox> candidates;  // empty: quantile-based candidates per path
};
using SmallSetPolicy = std::variant<AtomicPolicy, FrozenSetPolicy, SelectSetPolicy>;

struct ExperimentSpec {
  std::string name;  // label used in reports
  ModelSpec model;
  std::size_t n = 1000;
  int replications = 1000;
  std::vector<Method> methods{Method::ReBEL};
  double nominal_level = 0.95;
  // Local alternatives: each offset c tests theta0 + c / sqrt(n) on the first
  // coordinate. The null point (offset 0) is always tallied first.
  std::vector<double> alternatives;
  std::uint64_t seed = 1;
  SmallSetPolicy policy = AtomicPolicy{};
  std::size_t stack_order = 1;
  MomentModel moment = mean_model(1);
  std::vector<double> theta0{0.0};
  std::size_t grid_per_axis = 0;  // 0: dimension-based default
  int workers = 1;
  std::size_t bel_block_length = 0;  // 0: floor(n^(1/3))
  int n_boot = 500;
  bool collect_sigma = false;  // accumulate the block-variance estimate at theta0

  std::string to_json() const;
};

// One (method, offset) cell of a coverage experiment. Failures are
// replications where the method could not produce a decision at all; they are
// excluded from the acceptance rate but counted and flagged when frequent.
struct CellReport {
  Method method = Method::ReBEL;
  double offset = 0.0;
  int total = 0;
  int used = 0;
  int accepted = 0;
  int unbounded = 0;  // rejections forced by an unbounded EL ratio
  int failed_no_regeneration = 0;
  int failed_not_enough_blocks = 0;
  int failed_not_converged = 0;
  int failed_other = 0;
  bool flagged = false;  // failures above 5% of total

  int failures() const {
    return failed_no_regeneration + failed_not_enough_blocks +
           failed_not_converged + failed_other;
  }
  double acceptance_rate() const;
  double mc_se() const;
};

struct MCReport {
  std::string name;
  std::string model_kind;
  std::size_t n = 0;
  int replications = 0;
  double nominal_level = 0.95;
  std::uint64_t seed = 0;
  std::vector<double> offsets;
  std::vector<CellReport> cells;  // method-major, offset-minor

  // Diagnostics averaged over replications that produced a partition.
  int partitions = 0;
  double mean_complete_blocks = 0.0;
  double mean_visits = 0.0;
  double mean_delta = 0.0;
  double mean_clamped = 0.0;
  double mean_expected_regenerations = 0.0;

  // Mean block-variance and jacobian estimates at theta0 (empty unless
  // collect_sigma was set on the experiment).
  Eigen::MatrixXd mean_sigma;
  Eigen::MatrixXd mean_d;
  int sigma_count = 0;

  const CellReport& cell(Method m, double offset) const;
  std::string to_csv() const;
  std::string to_table() const;
};

using ProgressFn = std::function<void(int done, int total)>;

MCReport run_coverage(const ExperimentSpec& spec, const ProgressFn& progress = {});

// Null-distribution sample of 2 r_n(theta0) for the regenerative method.
struct QQReport {
  std::string name;
  std::size_t n = 0;
  int replications = 0;
  int df = 1;
  std::vector<double> statistics;  // sorted, finite
  int unbounded = 0;
  int failures = 0;
  double ks = 0.0;  // Kolmogorov-Smirnov distance to chi-square(df)

  double empirical_quantile(double prob) const;
  std::string to_csv() const;
};

QQReport run_qq(const ExperimentSpec& spec, const ProgressFn& progress = {});

// Rejection rates under local alternatives next to their large-sample
// predictions computed from the averaged block-variance estimate.
struct PowerCell {
  double offset = 0.0;
  int used = 0;
  double empirical_rejection = 0.0;
  double predicted_rejection = 0.0;
};
struct PowerReport {
  MCReport coverage;
  std::vector<PowerCell> cells;
  std::string to_csv() const;
  std::string to_table() const;
};

PowerReport run_power(const ExperimentSpec& spec, const ProgressFn& progress = {});

// Ready-made experiment configurations.
ExperimentSpec preset_table1(std::size_t n, int replications, std::uint64_t seed = 1);
ExperimentSpec preset_table2(int replications, std::uint64_t seed = 1);
ExperimentSpec preset_qqplot(int replications, std::uint64_t seed = 1);
ExperimentSpec preset_wilks(std::size_t n, int replications, std::uint64_t seed = 1);
ExperimentSpec preset_power(int replications, std::uint64_t seed = 1);
ExperimentSpec preset_by_name(const std::string& name, int replications,
                              std::uint64_t seed);

}  // namespace rebel
