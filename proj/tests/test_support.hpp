#ifndef SLOWFAST_TEST_SUPPORT_HPP
#define SLOWFAST_TEST_SUPPORT_HPP

#include <initializer_list>

#include "slowfast/system.hpp"

namespace slowfast::test {

inline Vec vec(std::initializer_list<double> vals) {
  Vec v(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

/// n = m = 1 system with f0 = y, g0 = -y; the slow manifold is y = 0.
inline SlowFastSystem linear_test_system() {
  return SlowFastSystem(
      1, 1, [](const Vec&, const Vec& y, double) { return y; },
      [](const Vec&, const Vec& y, double) { return Vec(-y); }, {},
      [](const Vec&) { return Vec(Vec::Zero(1)); },
      [](const Vec&, const Vec&, double) {
        Mat J(1, 1);
        J(0, 0) = -1.0;
        return J;
      });
}

} // namespace slowfast::test

#endif
