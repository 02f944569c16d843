#include "chopsticks/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace chopsticks {

namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

WarningSink& sink() {
  static WarningSink s = [](std::string_view msg) { std::cerr << "warning: " << msg << '\n'; };
  return s;
}

}  // namespace

void set_warning_sink(WarningSink s) {
  std::lock_guard lock(sink_mutex());
  sink() = std::move(s);
}

void warn(std::string_view message) {
  std::lock_guard lock(sink_mutex());
  if (sink()) sink()(message);
}

// ---------------------------------------------------------------------------

UnitQuaternion::UnitQuaternion(double w, double x, double y, double z, bool) {
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  w /= n;
  x /= n;
  y /= n;
  z /= n;
  bool flip = w < 0.0;
  if (w == 0.0) {
    if (x != 0.0)
      flip = x < 0.0;
    else if (y != 0.0)
      flip = y < 0.0;
    else
      flip = z < 0.0;
  }
  if (flip) {
    w = -w;
    x = -x;
    y = -y;
    z = -z;
  }
  // -0.0 would make coefficient comparisons and text output ambiguous.
  w_ = w + 0.0;
  x_ = x + 0.0;
  y_ = y + 0.0;
  z_ = z + 0.0;
}

UnitQuaternion UnitQuaternion::from_components(double w, double x, double y, double z) {
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  if (!(n > 0.0) || !std::isfinite(n))
    throw std::invalid_argument("quaternion with zero or non-finite norm");
  if (std::abs(n - 1.0) > 1e-9) {
    std::ostringstream os;
    os << "non-unit quaternion (norm " << n << ") normalized";
    warn(os.str());
  }
  return UnitQuaternion(w, x, y, z, true);
}

UnitQuaternion UnitQuaternion::from_stored(double w, double x, double y, double z) {
  const UnitQuaternion q = from_components(w, x, y, z);
  if (std::abs(w * w + x * x + y * y + z * z - 1.0) > 1e-12) return q;
  UnitQuaternion exact = q;
  const bool same_sign = std::abs(q.w_ - w) < 1e-12 && std::abs(q.x_ - x) < 1e-12 &&
                         std::abs(q.y_ - y) < 1e-12 && std::abs(q.z_ - z) < 1e-12;
  if (same_sign) {
    exact.w_ = w + 0.0;
    exact.x_ = x + 0.0;
    exact.y_ = y + 0.0;
    exact.z_ = z + 0.0;
  }
  return exact;
}

UnitQuaternion UnitQuaternion::from_axis_angle(const Vec3& axis, double angle) {
  const Vec3 a = axis.normalized();
  const double s = std::sin(0.5 * angle);
  return UnitQuaternion(std::cos(0.5 * angle), a.x() * s, a.y() * s, a.z() * s, true);
}

UnitQuaternion UnitQuaternion::from_rotation_vector(const Vec3& rotvec) {
  const double angle = rotvec.norm();
  if (angle < 1e-300) return UnitQuaternion();
  return from_axis_angle(rotvec / angle, angle);
}

UnitQuaternion UnitQuaternion::from_matrix(const Mat3& m) {
  const Eigen::Quaterniond q(m);
  return UnitQuaternion(q.w(), q.x(), q.y(), q.z(), true);
}

Vec3 UnitQuaternion::rotate(const Vec3& v) const {
  // v + 2w (u x v) + 2 u x (u x v)
  const Vec3 u(x_, y_, z_);
  const Vec3 t = 2.0 * u.cross(v);
  return v + w_ * t + u.cross(t);
}

Mat3 UnitQuaternion::matrix() const {
  return Eigen::Quaterniond(w_, x_, y_, z_).toRotationMatrix();
}

UnitQuaternion UnitQuaternion::inverse() const { return UnitQuaternion(w_, -x_, -y_, -z_, true); }

Vec3 UnitQuaternion::rotation_vector() const {
  const Vec3 u(x_, y_, z_);
  const double s = u.norm();
  if (s < 1e-300) return Vec3::Zero();
  const double angle = 2.0 * std::atan2(s, w_);
  return u * (angle / s);
}

UnitQuaternion operator*(const UnitQuaternion& a, const UnitQuaternion& b) {
  return UnitQuaternion(a.w_ * b.w_ - a.x_ * b.x_ - a.y_ * b.y_ - a.z_ * b.z_,
                        a.w_ * b.x_ + a.x_ * b.w_ + a.y_ * b.z_ - a.z_ * b.y_,
                        a.w_ * b.y_ - a.x_ * b.z_ + a.y_ * b.w_ + a.z_ * b.x_,
                        a.w_ * b.z_ + a.x_ * b.y_ - a.y_ * b.x_ + a.z_ * b.w_, true);
}

double quat_angle(const UnitQuaternion& a, const UnitQuaternion& b) {
  // Half the angle between the 4-vectors (on the same hemisphere) is a
  // quarter of the rotation angle; exactly 0 for equal inputs.
  const auto ca = a.coeffs(), cb = b.coeffs();
  double dot = 0.0;
  for (int i = 0; i < 4; ++i) dot += ca[i] * cb[i];
  const double sign = dot < 0.0 ? -1.0 : 1.0;
  double diff = 0.0, sum = 0.0;
  for (int i = 0; i < 4; ++i) {
    diff += (ca[i] - sign * cb[i]) * (ca[i] - sign * cb[i]);
    sum += (ca[i] + sign * cb[i]) * (ca[i] + sign * cb[i]);
  }
  return 4.0 * std::atan2(std::sqrt(diff), std::sqrt(sum));
}

UnitQuaternion slerp(const UnitQuaternion& a, const UnitQuaternion& b, double t) {
  if (t <= 0.0) return a;
  if (t >= 1.0) return b;
  // Canonical form of the relative rotation has w >= 0, i.e. the short arc.
  const Vec3 rv = (a.inverse() * b).rotation_vector();
  return a * UnitQuaternion::from_rotation_vector(t * rv);
}

RigidTransform RigidTransform::inverse() const {
  const UnitQuaternion inv = orientation.inverse();
  return {-inv.rotate(position), inv};
}

RigidTransform operator*(const RigidTransform& a, const RigidTransform& b) {
  return {a.apply(b.position), a.orientation * b.orientation};
}

// ---------------------------------------------------------------------------

double closest_segment_point(const Vec3& a, const Vec3& b, const Vec3& p) {
  const Vec3 d = b - a;
  const double len2 = d.squaredNorm();
  if (len2 <= 1e-300) return 0.0;
  return std::clamp((p - a).dot(d) / len2, 0.0, 1.0);
}

SegmentClosest closest_segment_segment(const Vec3& p0, const Vec3& p1, const Vec3& q0,
                                       const Vec3& q1) {
  constexpr double eps = 1e-300;
  const Vec3 d1 = p1 - p0;
  const Vec3 d2 = q1 - q0;
  const Vec3 r = p0 - q0;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);
  double s = 0.0, t = 0.0;
  if (a <= eps && e <= eps) {
    // both degenerate
  } else if (a <= eps) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= eps) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      s = denom > 1e-14 * a * e ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return {s, t, p0 + s * d1, q0 + t * d2};
}

namespace {

Vec3 any_perpendicular(const Vec3& v) {
  if (v.squaredNorm() < 1e-300) return Vec3::UnitX();
  const Vec3 u = std::abs(v.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  return v.cross(u).normalized();
}

// Two swept spheres with centres ca (radius ra) and cb (radius rb); `axis_a`
// picks a separating direction when the centres coincide.
SurfaceDistance sphere_pair(const Vec3& ca, double ra, const Vec3& cb, double rb,
                            const Vec3& axis_a) {
  const Vec3 diff = ca - cb;
  const double d = diff.norm();
  const Vec3 n = d > 1e-12 ? Vec3(diff / d) : any_perpendicular(axis_a);
  return {d - ra - rb, ca - ra * n, cb + rb * n, n};
}

}  // namespace

SurfaceDistance capsule_distance(const Capsule& a, const Capsule& b) {
  const Vec3 a0 = a.end_a(), a1 = a.end_b();
  const SegmentClosest c = closest_segment_segment(a0, a1, b.end_a(), b.end_b());
  return sphere_pair(c.point_a, a.radius, c.point_b, b.radius, a1 - a0);
}

SurfaceDistance capsule_sphere_distance(const Capsule& c, const Sphere& s) {
  const Vec3 a0 = c.end_a(), a1 = c.end_b();
  const double t = closest_segment_point(a0, a1, s.center);
  return sphere_pair(a0 + t * (a1 - a0), c.radius, s.center, s.radius, a1 - a0);
}

SurfaceDistance capsule_halfspace_distance(const Capsule& c, const HalfSpace& h) {
  const Vec3 a0 = c.end_a(), a1 = c.end_b();
  const Vec3 low = a1.z() < a0.z() ? a1 : a0;
  const Vec3 n = Vec3::UnitZ();
  return {low.z() - c.radius - h.height, low - c.radius * n,
          Vec3(low.x(), low.y(), h.height), n};
}

double box_signed_distance(const Box& b, const Vec3& p, Vec3* normal) {
  const Vec3 pl = b.frame.inverse().apply(p);
  const Vec3 q = pl.cwiseAbs() - b.half_extents;
  const Vec3 outside = q.cwiseMax(0.0);
  const double out_norm = outside.norm();
  const double inside = std::min(q.maxCoeff(), 0.0);
  if (normal) {
    Vec3 nl = Vec3::Zero();
    auto sgn = [](double v) { return v < 0.0 ? -1.0 : 1.0; };
    if (out_norm > 0.0) {
      for (int i = 0; i < 3; ++i) nl[i] = outside[i] * sgn(pl[i]);
      nl /= out_norm;
    } else {
      int axis = 0;
      for (int i = 1; i < 3; ++i)
        if (q[i] > q[axis]) axis = i;
      nl[axis] = sgn(pl[axis]);
    }
    *normal = b.frame.rotate(nl);
  }
  return out_norm + inside;
}

SurfaceDistance capsule_box_distance(const Capsule& c, const Box& b) {
  const Vec3 a0 = c.end_a(), a1 = c.end_b();
  const Vec3 d = a1 - a0;
  // The box sdf is convex, so its restriction to the segment is unimodal.
  auto f = [&](double t) { return box_signed_distance(b, a0 + t * d); };
  constexpr double inv_phi = 0.6180339887498949;
  double lo = 0.0, hi = 1.0;
  double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 80; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    }
  }
  double t = 0.5 * (lo + hi);
  double best = f(t);
  for (double te : {0.0, 1.0}) {
    const double fe = f(te);
    if (fe < best) {
      best = fe;
      t = te;
    }
  }
  const Vec3 p = a0 + t * d;
  Vec3 n;
  const double sd = box_signed_distance(b, p, &n);
  return {sd - c.radius, p - c.radius * n, p - sd * n, n};
}

// ---------------------------------------------------------------------------

double clog(double z, double z0) {
  if (!(z > 0.0) || !(z0 > 0.0)) throw std::domain_error("clog: requires z > 0 and z0 > 0");
  if (z >= z0) return 0.0;
  const double dz = z - z0;
  return -(dz * dz / z) * std::log(z / z0);
}

double clog_derivative(double z, double z0) {
  if (!(z > 0.0) || !(z0 > 0.0)) throw std::domain_error("clog: requires z > 0 and z0 > 0");
  if (z >= z0) return 0.0;
  const double dz = z - z0;
  const double u = dz * dz / z;
  const double du = 2.0 * dz / z - dz * dz / (z * z);
  return -(du * std::log(z / z0) + u / z);
}

BarrierValue clamped_clog(double z, double z0) {
  const double floor = std::min(kBarrierFloor, 0.5 * z0);
  if (z >= floor) return {clog(z, z0), clog_derivative(z, z0)};
  const double v = clog(floor, z0);
  const double s = clog_derivative(floor, z0);
  return {v + s * (z - floor), s};
}

}  // namespace chopsticks
