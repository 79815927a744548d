#ifndef SLOWFAST_TYPES_HPP
#define SLOWFAST_TYPES_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace slowfast {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// eps <= 0 passed where a positive time-scale separation is required.
class DegenerateTimescaleError : public Error {
public:
  using Error::Error;
};

/// Operation needs an optional hook (e.g. an analytic slow manifold) that
/// the system does not provide.
class UnsupportedOperationError : public Error {
public:
  using Error::Error;
};

/// eps outside the validity interval of an eps-dependent domain.
class DomainUndefinedError : public Error {
public:
  using Error::Error;
};

/// Point lies outside the domain an operation is defined on.
class DomainError : public Error {
public:
  using Error::Error;
};

/// Iterative solver failed; carries the last iterate for triage.
class NoConvergenceError : public Error {
public:
  NoConvergenceError(const std::string& what, Vec last)
      : Error(what), last_iterate(std::move(last)) {}
  Vec last_iterate;
};

class SingularJacobianError : public Error {
public:
  using Error::Error;
};

/// A trajectory left the domain where the computation is meaningful.
class LeftDomainError : public Error {
public:
  using Error::Error;
};

class InvalidStateError : public Error {
public:
  using Error::Error;
};

/// Construction-time validation failure (parameter bounds, config ranges,
/// malformed input files).
class ValidationError : public Error {
public:
  using Error::Error;
};

/// Split state of a slow-fast system: slow block x (length n >= 1) and
/// fast block y (length m >= 1). All entries must be finite.
struct State {
  Vec x;
  Vec y;

  State() = default;
  State(Vec x_, Vec y_);

  /// Throws InvalidStateError on empty blocks or non-finite entries.
  void validate() const;
};

bool all_finite(const Vec& v);

/// Named positive-ish parameters with per-parameter lower bounds, validated
/// eagerly at construction. Order of insertion is preserved.
class ParameterSet {
public:
  ParameterSet() = default;

  /// Adds a parameter; throws ValidationError if value <= lower_bound is
  /// violated (bound is strict by default since downstream formulas divide
  /// by rate constants).
  void add(const std::string& name, double value, double lower_bound = 0.0,
           bool strict = true);

  double get(const std::string& name) const;
  bool has(const std::string& name) const;
  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return names_.size(); }

private:
  std::vector<std::string> names_;
  std::vector<double> values_;
  std::vector<double> bounds_;
  std::vector<bool> strict_;
};

} // namespace slowfast

#endif
