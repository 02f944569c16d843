#pragma once

#include <array>
#include <functional>
#include <string_view>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace chopsticks {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Sink for non-fatal diagnostics (non-unit quaternions, out-of-range sizes).
// Defaults to stderr; tests swap it to capture messages.
using WarningSink = std::function<void(std::string_view)>;
void set_warning_sink(WarningSink sink);
void warn(std::string_view message);

/// Rotation stored as a unit quaternion in canonical form (w >= 0, ties on
/// w == 0 broken by the first nonzero vector component being positive), so
/// that q and -q always produce identical coefficients.
class UnitQuaternion {
 public:
  UnitQuaternion() = default;

  // Normalizes; emits a warning when the input norm is off by more than 1e-9.
  static UnitQuaternion from_components(double w, double x, double y, double z);
  // Like from_components, but keeps already-unit canonical input bit for bit
  // (for reading back stored values).
  static UnitQuaternion from_stored(double w, double x, double y, double z);
  static UnitQuaternion from_axis_angle(const Vec3& axis, double angle);
  static UnitQuaternion from_rotation_vector(const Vec3& rotvec);
  static UnitQuaternion from_matrix(const Mat3& m);

  double w() const { return w_; }
  double x() const { return x_; }
  double y() const { return y_; }
  double z() const { return z_; }
  std::array<double, 4> coeffs() const { return {w_, x_, y_, z_}; }

  Vec3 rotate(const Vec3& v) const;
  Mat3 matrix() const;
  UnitQuaternion inverse() const;
  // Rotation vector (axis * angle) with angle in [0, pi].
  Vec3 rotation_vector() const;

  friend UnitQuaternion operator*(const UnitQuaternion& a, const UnitQuaternion& b);
  friend bool operator==(const UnitQuaternion&, const UnitQuaternion&) = default;

 private:
  UnitQuaternion(double w, double x, double y, double z, bool);
  double w_ = 1.0, x_ = 0.0, y_ = 0.0, z_ = 0.0;
};

// Absolute rotation angle between two orientations, in [0, pi].
double quat_angle(const UnitQuaternion& a, const UnitQuaternion& b);

// Shortest-arc spherical interpolation at constant angular speed.
UnitQuaternion slerp(const UnitQuaternion& a, const UnitQuaternion& b, double t);

struct RigidTransform {
  Vec3 position = Vec3::Zero();
  UnitQuaternion orientation;

  static RigidTransform identity() { return {}; }
  Vec3 apply(const Vec3& p) const { return position + orientation.rotate(p); }
  Vec3 rotate(const Vec3& v) const { return orientation.rotate(v); }
  RigidTransform inverse() const;
  friend RigidTransform operator*(const RigidTransform& a, const RigidTransform& b);
};

/// Capsule whose axis is the local z axis of `frame`, spanning
/// [-half_length, +half_length].
struct Capsule {
  double half_length = 0.0;
  double radius = 0.0;
  RigidTransform frame;

  Vec3 end_a() const { return frame.apply(Vec3(0, 0, -half_length)); }
  Vec3 end_b() const { return frame.apply(Vec3(0, 0, half_length)); }
};

struct SegmentClosest {
  double s = 0.0, t = 0.0;  // parameters in [0, 1] along each segment
  Vec3 point_a, point_b;
};

// Closest points between segments [p0, p1] and [q0, q1].
SegmentClosest closest_segment_segment(const Vec3& p0, const Vec3& p1, const Vec3& q0,
                                       const Vec3& q1);
// Parameter in [0, 1] of the point on [a, b] closest to p.
double closest_segment_point(const Vec3& a, const Vec3& b, const Vec3& p);

struct SurfaceDistance {
  double distance = 0.0;  // signed: negative is penetration depth
  Vec3 point_a;           // on the surface of the first argument
  Vec3 point_b;           // on the surface of the second argument
  Vec3 normal;            // unit, from the second shape toward the first
};

// Signed surface distance between two capsules. `normal` points from b to a.
SurfaceDistance capsule_distance(const Capsule& a, const Capsule& b);

struct Sphere {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
};

struct Box {
  RigidTransform frame;
  Vec3 half_extents = Vec3::Zero();
};

// Horizontal plane z = height with normal +z (the table top).
struct HalfSpace {
  double height = 0.0;
};

SurfaceDistance capsule_sphere_distance(const Capsule& c, const Sphere& s);
SurfaceDistance capsule_box_distance(const Capsule& c, const Box& b);
SurfaceDistance capsule_halfspace_distance(const Capsule& c, const HalfSpace& h);

// Signed distance from a point to a box surface and the outward normal at the
// nearest surface point (sdf gradient).
double box_signed_distance(const Box& b, const Vec3& p, Vec3* normal = nullptr);

// ---------------------------------------------------------------------------
// Clamped log-barrier.

inline constexpr double kBarrierFloor = 1e-6;

// -((z - z0)^2 / z) ln(z / z0) for 0 < z < z0, zero for z >= z0.
// Throws std::domain_error for z <= 0 or z0 <= 0.
double clog(double z, double z0);
double clog_derivative(double z, double z0);

struct BarrierValue {
  double value = 0.0;
  double slope = 0.0;  // d value / d z
};

// clog evaluated with its argument floored at kBarrierFloor. Below the floor
// the barrier continues linearly with the slope it has at the floor, so the
// value stays finite and the gradient still points out of the obstacle.
BarrierValue clamped_clog(double z, double z0);

}  // namespace chopsticks
