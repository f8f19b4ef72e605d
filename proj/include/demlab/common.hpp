#pragma once
// demlab -- weighted Bergman kernels, Demailly approximants and
// plurisubharmonic envelopes on model domains.
//
// Shared error types and small formatting helpers.

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

namespace demlab {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point was used outside the domain it claims to live in.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid argument (bad radius, empty schedule, malformed grid, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Unknown weight name or bad catalog parameters.
class CatalogError : public Error {
 public:
  using Error::Error;
};

/// A toric-only engine was handed a non-toric weight (or vice versa).
class EngineMismatchError : public Error {
 public:
  using Error::Error;
};

/// Quadrature failed to reach the requested relative tolerance.
/// Carries the best error estimate achieved before giving up.
class QuadAccuracyError : public Error {
 public:
  QuadAccuracyError(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

/// Gram matrix numerically indefinite beyond tolerance.
class ConditioningError : public Error {
 public:
  ConditioningError(const std::string& what, double pivot)
      : Error(what), pivot_(pivot) {}
  double pivot() const { return pivot_; }

 private:
  double pivot_;
};

/// Fixpoint iteration did not converge; carries the last gap.
class IterationError : public Error {
 public:
  IterationError(const std::string& what, double last_gap)
      : Error(what), last_gap_(last_gap) {}
  double last_gap() const { return last_gap_; }

 private:
  double last_gap_;
};

/// An operation was invoked outside its stated contract
/// (e.g. a lower-bound check on a weight not declared psh).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Config file problem, with line/key diagnostics.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line, std::string key = "")
      : Error(what), line_(line), key_(std::move(key)) {}
  int line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  int line_;
  std::string key_;
};

/// Fixed 17-significant-digit float formatting. Every CSV/JSON writer
/// goes through this so identical runs produce byte-identical output.
inline std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline bool nearly_equal(double a, double b, double rel, double abs = 0.0) {
  if (a == b) return true;
  const double diff = std::fabs(a - b);
  return diff <= abs + rel * std::max(std::fabs(a), std::fabs(b));
}

}  // namespace demlab
