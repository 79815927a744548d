#include "slowfast/types.hpp"

#include <algorithm>
#include <cmath>

namespace slowfast {

bool all_finite(const Vec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i])) return false;
  return true;
}

State::State(Vec x_, Vec y_) : x(std::move(x_)), y(std::move(y_)) { validate(); }

void State::validate() const {
  if (x.size() < 1 || y.size() < 1)
    throw InvalidStateError("state blocks must have n >= 1 and m >= 1");
  if (!all_finite(x) || !all_finite(y))
    throw InvalidStateError("state has non-finite entries");
}

void ParameterSet::add(const std::string& name, double value, double lower_bound,
                       bool strict) {
  if (has(name)) throw ValidationError("duplicate parameter: " + name);
  if (!std::isfinite(value))
    throw ValidationError("parameter " + name + " is not finite");
  bool ok = strict ? (value > lower_bound) : (value >= lower_bound);
  if (!ok)
    throw ValidationError("parameter " + name + " = " + std::to_string(value) +
                          " violates bound " + (strict ? "> " : ">= ") +
                          std::to_string(lower_bound));
  names_.push_back(name);
  values_.push_back(value);
  bounds_.push_back(lower_bound);
  strict_.push_back(strict);
}

double ParameterSet::get(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw ValidationError("unknown parameter: " + name);
  return values_[static_cast<std::size_t>(it - names_.begin())];
}

bool ParameterSet::has(const std::string& name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

} // namespace slowfast
