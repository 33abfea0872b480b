#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace rebel {

// Base class for every failure the library can signal deliberately.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Input that violates a documented precondition (bad transition matrix, |rho| >= 1, ...).
class ValidationError : public Error {
public:
  using Error::Error;
};

// The path never regenerates (no atom visit, or fewer than 2 split renewals).
class NoRegenerationError : public Error {
public:
  NoRegenerationError(const std::string& what, std::size_t visits)
      : Error(what), visits(visits) {}
  std::size_t visits;
};

// Kernel transition density cannot be formed (constant path, zero spread).
class DegenerateDensityError : public Error {
public:
  using Error::Error;
};

// No candidate small set produces a usable expected renewal count.
class NoViableSmallSetError : public Error {
public:
  using Error::Error;
};

// Too few complete blocks for the requested statistic.
class NotEnoughBlocksError : public Error {
public:
  using Error::Error;
};

// Singular second-moment matrix where an inverse is required.
class SingularVarianceError : public Error {
public:
  using Error::Error;
};

// Outer optimizer exhausted its budget; carries the best iterate found.
class EstimateNotConvergedError : public Error {
public:
  EstimateNotConvergedError(const std::string& what, std::vector<double> best)
      : Error(what), best_iterate(std::move(best)) {}
  std::vector<double> best_iterate;
};

// Test with zero degrees of freedom requested (r == p over-identification test).
class DegreesOfFreedomZeroError : public Error {
public:
  using Error::Error;
};

// Confidence region empty: criterion exceeds the cutoff everywhere probed.
class EmptyRegionError : public Error {
public:
  using Error::Error;
};

struct OrderTestRecord {
  int k = 0;
  std::size_t blocks = 0;
  double rho = 0.0;
  double t_stat = 0.0;
  double p_value = 0.0;
  bool accepted = false;
};

// Order-selection heuristic ran out of blocks before reaching a decision.
class OrderTestInconclusiveError : public Error {
public:
  OrderTestInconclusiveError(const std::string& what, std::vector<OrderTestRecord> trace)
      : Error(what), trace(std::move(trace)) {}
  std::vector<OrderTestRecord> trace;
};

}  // namespace rebel
