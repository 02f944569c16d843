#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "chopsticks/geometry.hpp"

namespace chopsticks {

enum class Shape { sphere, capsule, box };

std::string_view shape_name(Shape s);
Shape parse_shape(std::string_view name);  // throws std::invalid_argument

/// Graspable primitive. `size` holds sphere (radius, 0, 0), capsule
/// (radius, cylinder length, 0) with the axis along local z, or box full side
/// lengths (x, y, z).
struct RigidObject {
  std::string id;
  Shape shape = Shape::sphere;
  Vec3 size = Vec3::Zero();
  RigidTransform pose;
  Vec3 velocity = Vec3::Zero();
  Vec3 angular_velocity = Vec3::Zero();
};

RigidObject make_sphere(double radius, const RigidTransform& pose = {});
RigidObject make_capsule(double radius, double length, const RigidTransform& pose = {});
RigidObject make_box(const Vec3& sides, const RigidTransform& pose = {});

// Size-range diagnostics for the tested primitive ranges (sphere and
// capsule radius 0.5-1 cm, capsule length 2-4 cm, box sides 1-2 cm). Empty
// when in range.
std::vector<std::string> size_range_warnings(const RigidObject& o);

// Signed distance from a point to the object surface and the outward
// surface normal at the nearest surface point.
double object_signed_distance(const RigidObject& o, const Vec3& p, Vec3* normal = nullptr);

// Distance between the two surface crossings of the line through the
// object's center along `direction` (world, unit).
double width_along(const RigidObject& o, const Vec3& direction);

// Lowest point height of the object (for resting checks).
double lowest_z(const RigidObject& o);

SurfaceDistance capsule_object_distance(const Capsule& c, const RigidObject& o);
// Signed distance between two objects (conservative for box pairs: exact
// separation along box axes only). Negative means overlap.
double object_object_distance(const RigidObject& a, const RigidObject& b);

}  // namespace chopsticks
