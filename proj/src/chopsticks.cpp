#include "chopsticks/chopsticks.hpp"

#include <cmath>
#include <sstream>

#include "chopsticks/errors.hpp"

namespace chopsticks {

namespace {

double pivot_angle(const ChopstickGeometry& g) {
  const double l = g.pivot_to_tip;
  return std::atan2(g.pivot_gap, std::sqrt(l * l - g.pivot_gap * g.pivot_gap));
}

}  // namespace

double tip_separation(double opening, const ChopstickGeometry& g) {
  return 2.0 * g.pivot_to_tip * std::sin(0.5 * opening);
}

double opening_for_separation(double separation, const ChopstickGeometry& g) {
  const double max_sep = tip_separation(g.max_opening, g);
  if (separation > max_sep) {
    std::ostringstream os;
    os << "object needs tip separation " << separation << " m, chopsticks open to " << max_sep
       << " m";
    throw ObjectTooWide(os.str());
  }
  if (separation <= 0.0) return 0.0;
  return 2.0 * std::asin(separation / (2.0 * g.pivot_to_tip));
}

Vec3 tip_direction_local(double opening, const ChopstickGeometry& g) {
  const double a = pivot_angle(g) - 0.5 * opening;
  return {std::cos(a), 0.0, -std::sin(a)};
}

Vec3 upper_tip_local(double opening, const ChopstickGeometry& g) {
  const double b = pivot_angle(g);
  const double l = g.pivot_to_tip;
  return {l * (std::sin(b) - std::sin(b - opening)), 0.0,
          l * (std::cos(b) - std::cos(b - opening))};
}

UnitQuaternion upper_rotation_local(double opening, const ChopstickGeometry& g) {
  return UnitQuaternion::from_axis_angle(Vec3::UnitY(), pivot_angle(g) - opening);
}

ChopstickPair chopstick_pair(const ChopstickConfig& c, const ChopstickGeometry& g) {
  ChopstickPair p;
  const RigidTransform lower = c.frame();
  const RigidTransform upper{lower.apply(upper_tip_local(c.opening, g)),
                             c.orientation * upper_rotation_local(c.opening, g)};
  const RigidTransform* frames[2] = {&upper, &lower};
  for (int i = 0; i < 2; ++i) {
    const RigidTransform& f = *frames[i];
    const Vec3 axis = f.rotate(Vec3::UnitZ());
    p.stick[i].tip = f.position;
    p.stick[i].rear = f.position + g.length * axis;
    p.stick[i].pose = {f.position + 0.5 * g.length * axis, f.orientation};
  }
  return p;
}

}  // namespace chopsticks
