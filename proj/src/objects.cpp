#include "chopsticks/objects.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace chopsticks {

std::string_view shape_name(Shape s) {
  switch (s) {
    case Shape::sphere:
      return "sphere";
    case Shape::capsule:
      return "capsule";
    case Shape::box:
      return "box";
  }
  return "?";
}

Shape parse_shape(std::string_view name) {
  if (name == "sphere") return Shape::sphere;
  if (name == "capsule") return Shape::capsule;
  if (name == "box") return Shape::box;
  throw std::invalid_argument("unknown shape '" + std::string(name) + "'");
}

RigidObject make_sphere(double radius, const RigidTransform& pose) {
  return {"", Shape::sphere, Vec3(radius, 0, 0), pose, {}, {}};
}

RigidObject make_capsule(double radius, double length, const RigidTransform& pose) {
  return {"", Shape::capsule, Vec3(radius, length, 0), pose, {}, {}};
}

RigidObject make_box(const Vec3& sides, const RigidTransform& pose) {
  return {"", Shape::box, sides, pose, {}, {}};
}

std::vector<std::string> size_range_warnings(const RigidObject& o) {
  std::vector<std::string> out;
  auto check = [&](const char* what, double v, double lo, double hi) {
    if (v < lo - 1e-12 || v > hi + 1e-12) {
      std::ostringstream os;
      os << shape_name(o.shape) << " " << what << " " << v * 100.0 << " cm outside the tested range ["
         << lo * 100.0 << ", " << hi * 100.0 << "] cm";
      out.push_back(os.str());
    }
  };
  switch (o.shape) {
    case Shape::sphere:
      check("radius", o.size.x(), 0.005, 0.01);
      break;
    case Shape::capsule:
      check("radius", o.size.x(), 0.005, 0.01);
      check("length", o.size.y(), 0.02, 0.04);
      break;
    case Shape::box:
      for (int i = 0; i < 3; ++i) check("side", o.size[i], 0.01, 0.02);
      break;
  }
  return out;
}

namespace {

Capsule object_capsule(const RigidObject& o) { return {0.5 * o.size.y(), o.size.x(), o.pose}; }

Box object_box(const RigidObject& o) { return {o.pose, 0.5 * o.size}; }

}  // namespace

double object_signed_distance(const RigidObject& o, const Vec3& p, Vec3* normal) {
  switch (o.shape) {
    case Shape::sphere: {
      const Vec3 d = p - o.pose.position;
      const double n = d.norm();
      if (normal) *normal = n > 1e-15 ? Vec3(d / n) : Vec3::UnitZ();
      return n - o.size.x();
    }
    case Shape::capsule: {
      const Capsule c = object_capsule(o);
      const Vec3 a = c.end_a(), b = c.end_b();
      const Vec3 q = a + closest_segment_point(a, b, p) * (b - a);
      const Vec3 d = p - q;
      const double n = d.norm();
      if (normal) {
        if (n > 1e-15) {
          *normal = d / n;
        } else {
          const Vec3 ax = (b - a).normalized();
          *normal = ax.cross(std::abs(ax.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY()).normalized();
        }
      }
      return n - o.size.x();
    }
    case Shape::box:
      return box_signed_distance(object_box(o), p, normal);
  }
  return 0.0;
}

double width_along(const RigidObject& o, const Vec3& direction) {
  const Vec3 d = o.pose.orientation.inverse().rotate(direction.normalized());
  switch (o.shape) {
    case Shape::sphere:
      return 2.0 * o.size.x();
    case Shape::capsule: {
      const double r = o.size.x(), hl = 0.5 * o.size.y();
      const double radial = std::hypot(d.x(), d.y());
      if (radial > 1e-15) {
        const double t = r / radial;
        if (t * std::abs(d.z()) <= hl) return 2.0 * t;
      }
      // Exit through a hemispherical cap.
      const double dz = std::abs(d.z());
      const double t = hl * dz + std::sqrt(std::max(0.0, hl * hl * dz * dz - hl * hl + r * r));
      return 2.0 * t;
    }
    case Shape::box: {
      const Vec3 h = 0.5 * o.size;
      double t = std::numeric_limits<double>::infinity();
      for (int i = 0; i < 3; ++i)
        if (std::abs(d[i]) > 1e-15) t = std::min(t, h[i] / std::abs(d[i]));
      return 2.0 * t;
    }
  }
  return 0.0;
}

double lowest_z(const RigidObject& o) {
  switch (o.shape) {
    case Shape::sphere:
      return o.pose.position.z() - o.size.x();
    case Shape::capsule: {
      const Capsule c = object_capsule(o);
      return std::min(c.end_a().z(), c.end_b().z()) - o.size.x();
    }
    case Shape::box: {
      const Mat3 r = o.pose.orientation.matrix();
      const Vec3 h = 0.5 * o.size;
      double ext = 0.0;
      for (int i = 0; i < 3; ++i) ext += std::abs(r(2, i)) * h[i];
      return o.pose.position.z() - ext;
    }
  }
  return 0.0;
}

SurfaceDistance capsule_object_distance(const Capsule& c, const RigidObject& o) {
  switch (o.shape) {
    case Shape::sphere:
      return capsule_sphere_distance(c, {o.pose.position, o.size.x()});
    case Shape::capsule:
      return capsule_distance(c, object_capsule(o));
    case Shape::box:
      return capsule_box_distance(c, object_box(o));
  }
  return {};
}

namespace {

// Largest separation over the 15 separating-axis candidates of two boxes.
double box_box_separation(const Box& a, const Box& b) {
  const Mat3 ra = a.frame.orientation.matrix(), rb = b.frame.orientation.matrix();
  const Vec3 t = b.frame.position - a.frame.position;
  std::vector<Vec3> axes;
  for (int i = 0; i < 3; ++i) axes.push_back(ra.col(i));
  for (int i = 0; i < 3; ++i) axes.push_back(rb.col(i));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const Vec3 c = ra.col(i).cross(rb.col(j));
      if (c.norm() > 1e-9) axes.push_back(c.normalized());
    }
  double best = -std::numeric_limits<double>::infinity();
  for (const Vec3& ax : axes) {
    double pa = 0.0, pb = 0.0;
    for (int i = 0; i < 3; ++i) {
      pa += std::abs(ra.col(i).dot(ax)) * a.half_extents[i];
      pb += std::abs(rb.col(i).dot(ax)) * b.half_extents[i];
    }
    best = std::max(best, std::abs(t.dot(ax)) - pa - pb);
  }
  return best;
}

}  // namespace

double object_object_distance(const RigidObject& a, const RigidObject& b) {
  if (a.shape == Shape::box && b.shape == Shape::box)
    return box_box_separation(object_box(a), object_box(b));
  if (b.shape == Shape::box) return object_object_distance(b, a);
  // b is a sphere or capsule: treat it as a (possibly zero-length) capsule.
  const Capsule cb = b.shape == Shape::sphere ? Capsule{0.0, b.size.x(), b.pose} : object_capsule(b);
  return capsule_object_distance(cb, a).distance;
}

}  // namespace chopsticks
