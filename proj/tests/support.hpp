#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "chopsticks/geometry.hpp"
#include "chopsticks/rng.hpp"

namespace chopsticks::test {

// Hand-rolled generators for the property tests.
inline Vec3 random_vec(Rng& r, double lo, double hi) {
  return Vec3(r.uniform(lo, hi), r.uniform(lo, hi), r.uniform(lo, hi));
}

inline Vec3 random_unit(Rng& r) {
  for (;;) {
    const Vec3 v(r.normal(), r.normal(), r.normal());
    if (v.norm() > 1e-6) return v.normalized();
  }
}

inline UnitQuaternion random_rotation(Rng& r) {
  for (;;) {
    const double w = r.normal(), x = r.normal(), y = r.normal(), z = r.normal();
    const double n = std::sqrt(w * w + x * x + y * y + z * z);
    if (n > 1e-6) return UnitQuaternion::from_components(w / n, x / n, y / n, z / n);
  }
}

inline RigidTransform random_transform(Rng& r, double extent) {
  return {random_vec(r, -extent, extent), random_rotation(r)};
}

// Central differences of a scalar function.
inline Eigen::VectorXd numeric_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                        const Eigen::VectorXd& x, double h = 1e-6) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd a = x, b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (f(a) - f(b)) / (2 * h);
  }
  return g;
}

// Captures warnings for the lifetime of the object.
class WarningCapture {
 public:
  WarningCapture() {
    set_warning_sink([this](std::string_view m) { messages.emplace_back(m); });
  }
  ~WarningCapture() { set_warning_sink(nullptr); }
  std::vector<std::string> messages;
};

}  // namespace chopsticks::test
