#include "rebel/models.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <json.hpp>

#include "rebel/errors.hpp"
#include "rebel/rng.hpp"

namespace rebel {

using nlohmann::json;

ModelSpec ModelSpec::finite(std::vector<std::vector<double>> p, std::size_t init,
                            std::uint64_t seed) {
  ModelSpec s;
  s.kind = ModelKind::FiniteMarkov;
  s.transition = std::move(p);
  s.initial_state = init;
  s.seed = seed;
  return s;
}

ModelSpec ModelSpec::ar1(double rho, std::uint64_t seed) {
  ModelSpec s;
  s.kind = ModelKind::AR1Uniform;
  s.rho = rho;
  s.seed = seed;
  return s;
}

ModelSpec ModelSpec::tgarch(std::uint64_t seed) {
  ModelSpec s;
  s.kind = ModelKind::TGarchAR;
  s.seed = seed;
  return s;
}

void validate(const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelKind::FiniteMarkov: {
      const std::size_t k = spec.transition.size();
      if (k == 0) throw ValidationError("FiniteMarkov: empty transition matrix");
      for (const auto& row : spec.transition) {
        if (row.size() != k)
          throw ValidationError("FiniteMarkov: transition matrix not square");
        double sum = 0.0;
        for (double v : row) {
          if (!(v >= 0.0)) throw ValidationError("FiniteMarkov: negative entry");
          sum += v;
        }
        if (std::fabs(sum - 1.0) > 1e-12)
          throw ValidationError("FiniteMarkov: row does not sum to 1 within 1e-12");
      }
      if (spec.initial_state >= k)
        throw ValidationError("FiniteMarkov: initial state out of range");
      break;
    }
    case ModelKind::AR1Uniform:
      if (!(std::fabs(spec.rho) < 1.0))
        throw ValidationError("AR1Uniform: |rho| must be < 1");
      break;
    case ModelKind::TGarchAR:
      if (!(std::fabs(spec.ar) < 1.0))
        throw ValidationError("TGarchAR: |ar| must be < 1");
      if (!(spec.vol_intercept > 0.0))
        throw ValidationError("TGarchAR: volatility intercept must be > 0");
      if (spec.vol_abs < 0.0 || spec.vol_abs + spec.vol_pos < 0.0)
        throw ValidationError("TGarchAR: volatility coefficients must keep sigma positive");
      break;
  }
}

namespace {

ChainPath simulate_finite(const ModelSpec& spec, std::size_t n) {
  ChainPath path;
  path.dim = 1;
  path.origin = "finite";
  path.data.reserve(n);
  SplitRng rng(spec.seed);
  std::size_t state = spec.initial_state;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.next_uniform();
    const auto& row = spec.transition[state];
    double cum = 0.0;
    std::size_t next = row.size() - 1;
    for (std::size_t j = 0; j < row.size(); ++j) {
      cum += row[j];
      if (u < cum) {
        next = j;
        break;
      }
    }
    state = next;
    path.data.push_back(static_cast<double>(state));
  }
  return path;
}

ChainPath simulate_ar1(const ModelSpec& spec, std::size_t n) {
  ChainPath path;
  path.dim = 1;
  path.origin = "ar1";
  path.data.reserve(n);
  SplitRng rng(spec.seed);
  const double half_width = std::sqrt(3.0);  // unit-variance uniform innovation
  double x = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double eps = (2.0 * rng.next_uniform() - 1.0) * half_width;
    x = spec.rho * x + eps;
    path.data.push_back(x);
  }
  return path;
}

}  // namespace

TGarchDetail simulate_tgarch_detail(const ModelSpec& spec, std::size_t n) {
  TGarchDetail out;
  out.x.reserve(n);
  out.sigma.reserve(n);
  SplitRng rng(spec.seed);
  double x = 0.0;
  double eps_prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sigma = spec.vol_intercept + spec.vol_abs * std::fabs(eps_prev) +
                         spec.vol_pos * std::max(eps_prev, 0.0);
    const double eps = sigma * rng.next_gaussian();
    x = spec.ar * x + eps;
    eps_prev = eps;
    out.x.push_back(x);
    out.sigma.push_back(sigma);
  }
  return out;
}

ChainPath simulate(const ModelSpec& spec, std::size_t n) {
  validate(spec);
  switch (spec.kind) {
    case ModelKind::FiniteMarkov:
      return simulate_finite(spec, n);
    case ModelKind::AR1Uniform:
      return simulate_ar1(spec, n);
    case ModelKind::TGarchAR: {
      ChainPath path;
      path.dim = 1;
      path.origin = "tgarch";
      path.data = simulate_tgarch_detail(spec, n).x;
      return path;
    }
  }
  throw ValidationError("simulate: unknown model kind");
}

std::vector<double> stationary_distribution(const ModelSpec& spec) {
  validate(spec);
  if (spec.kind != ModelKind::FiniteMarkov)
    throw ValidationError("stationary_distribution: finite chains only");
  const std::size_t k = spec.transition.size();
  // Solve pi (P - I) = 0 with sum(pi) = 1: transpose and replace one equation.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) a(j, i) = spec.transition[i][j];
  a -= Eigen::MatrixXd::Identity(k, k);
  for (std::size_t j = 0; j < k; ++j) a(k - 1, j) = 1.0;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
  b(k - 1) = 1.0;
  const Eigen::VectorXd pi = a.fullPivLu().solve(b);
  return {pi.data(), pi.data() + k};
}

std::string model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::FiniteMarkov: return "finite";
    case ModelKind::AR1Uniform: return "ar1";
    case ModelKind::TGarchAR: return "tgarch";
  }
  return "unknown";
}

std::string ModelSpec::to_json() const {
  json j;
  j["seed"] = seed;
  j["kind"] = model_kind_name(kind);
  switch (kind) {
    case ModelKind::FiniteMarkov:
      j["transition"] = transition;
      j["initial_state"] = initial_state;
      break;
    case ModelKind::AR1Uniform:
      j["rho"] = rho;
      break;
    case ModelKind::TGarchAR:
      j["ar"] = ar;
      j["vol_intercept"] = vol_intercept;
      j["vol_abs"] = vol_abs;
      j["vol_pos"] = vol_pos;
      break;
  }
  return j.dump();
}

ModelSpec ModelSpec::from_json(const std::string& text) {
  const json j = json::parse(text);
  ModelSpec s;
  const std::string kind = j.at("kind").get<std::string>();
  s.seed = j.value("seed", std::uint64_t{1});
  if (kind == "finite") {
    s.kind = ModelKind::FiniteMarkov;
    s.transition = j.at("transition").get<std::vector<std::vector<double>>>();
    s.initial_state = j.value("initial_state", std::size_t{0});
  } else if (kind == "ar1") {
    s.kind = ModelKind::AR1Uniform;
    s.rho = j.value("rho", 0.9);
  } else if (kind == "tgarch") {
    s.kind = ModelKind::TGarchAR;
    s.ar = j.value("ar", 0.97);
    s.vol_intercept = j.value("vol_intercept", 1.0);
    s.vol_abs = j.value("vol_abs", 0.5);
    s.vol_pos = j.value("vol_pos", 0.4);
  } else {
    throw ValidationError("ModelSpec: unknown kind '" + kind + "'");
  }
  validate(s);
  return s;
}

}  // namespace rebel
