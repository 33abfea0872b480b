#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rebel/chain.hpp"

namespace rebel {

enum class ModelKind { FiniteMarkov, AR1Uniform, TGarchAR };

// Serialization name: "finite", "ar1", or "tgarch".
std::string model_kind_name(ModelKind kind);

// Serializable description of a simulable chain. Only the fields relevant to
// `kind` are read; everything else is ignored.
struct ModelSpec {
  ModelKind kind = ModelKind::AR1Uniform;
  std::uint64_t seed = 1;

  // FiniteMarkov: row-stochastic transition matrix over states 0..k-1, emitted
  // as real scalars equal to the state index.
  std::vector<std::vector<double>> transition;
  std::size_t initial_state = 0;

  // AR1Uniform: X_0 = 0, X_i = rho X_{i-1} + eps_i with eps_i uniform,
  // mean 0, variance 1 (support [-sqrt(3), sqrt(3)]).
  double rho = 0.9;

  // TGarchAR: X_0 = 0, eps_0 = 0,
  //   sigma_i = vol_intercept + vol_abs |eps_{i-1}| + vol_pos max(eps_{i-1}, 0)
  //   eps_i   = sigma_i nu_i,  nu_i iid standard normal
  //   X_i     = ar X_{i-1} + eps_i.
  double ar = 0.97;
  double vol_intercept = 1.0;
  double vol_abs = 0.5;
  double vol_pos = 0.4;

  static ModelSpec finite(std::vector<std::vector<double>> p, std::size_t init,
                          std::uint64_t seed);
  static ModelSpec ar1(double rho, std::uint64_t seed);
  static ModelSpec tgarch(std::uint64_t seed);

  std::string to_json() const;
  static ModelSpec from_json(const std::string& text);
};

// Throws ValidationError if the spec is malformed (non-stochastic rows,
// |rho| >= 1, nonpositive volatility intercept, ...).
void validate(const ModelSpec& spec);

// Returns exactly n observations X_1..X_n. The same (spec, n) always yields
// the same bytes; observations before X_1 (the fixed X_0 = 0 start, eps_0)
// are internal and never emitted.
ChainPath simulate(const ModelSpec& spec, std::size_t n);

// TGarchAR trajectory together with its volatility sequence (test hook).
struct TGarchDetail {
  std::vector<double> x;
  std::vector<double> sigma;
};
TGarchDetail simulate_tgarch_detail(const ModelSpec& spec, std::size_t n);

// Stationary distribution of a FiniteMarkov spec (left eigenvector, solved
// as a linear system).
std::vector<double> stationary_distribution(const ModelSpec& spec);

}  // namespace rebel
