#include "chopsticks/arm_ik.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "chopsticks/errors.hpp"

namespace chopsticks {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap(double a) {
  while (a > kPi) a -= 2.0 * kPi;
  while (a <= -kPi) a += 2.0 * kPi;
  return a;
}

// R = Rz(a) Ry(b) Rx(c); both solution branches.
std::array<std::array<double, 3>, 2> zyx_euler(const Mat3& r) {
  const double b = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
  double a, c;
  if (std::abs(std::cos(b)) > 1e-12) {
    a = std::atan2(r(1, 0), r(0, 0));
    c = std::atan2(r(2, 1), r(2, 2));
  } else {
    // Gimbal lock: only a - c (or a + c) is determined; put it all in a.
    a = std::atan2(-r(0, 1), r(1, 1));
    c = 0.0;
  }
  return {{{a, b, c}, {wrap(a + kPi), wrap(kPi - b), wrap(c + kPi)}}};
}

bool within(const Joint& j, const std::array<double, 3>& v) {
  for (int k = 0; k < 3; ++k)
    if (v[k] < j.lower[k] || v[k] > j.upper[k]) return false;
  return true;
}

// Reference directions spanning the plane normal to n.
void swivel_basis(const Vec3& n, Vec3& u, Vec3& v) {
  Vec3 down = -Vec3::UnitZ();
  u = down - down.dot(n) * n;
  if (u.norm() < 1e-9) {
    const Vec3 fwd = Vec3::UnitX();
    u = fwd - fwd.dot(n) * n;
  }
  u.normalize();
  v = n.cross(u);
}

Mat3 rot(const Vec3& axis, double a) { return Eigen::AngleAxisd(a, axis).toRotationMatrix(); }

Mat3 zyx_matrix(double a, double b, double c) {
  return rot(Vec3::UnitZ(), a) * rot(Vec3::UnitY(), b) * rot(Vec3::UnitX(), c);
}

}  // namespace

ArmAngles arm_angles(const HandModel& m, const JointAngles& q) {
  ArmAngles a;
  const int s = m.joints[m.arm.shoulder].first_dof, e = m.joints[m.arm.elbow].first_dof,
            w = m.joints[m.arm.wrist].first_dof;
  a = {q[s], q[s + 1], q[s + 2], q[e], q[w], q[w + 1], q[w + 2]};
  return a;
}

void set_arm_angles(const HandModel& m, const ArmAngles& a, JointAngles& q) {
  const int s = m.joints[m.arm.shoulder].first_dof, e = m.joints[m.arm.elbow].first_dof,
            w = m.joints[m.arm.wrist].first_dof;
  q[s] = a[0];
  q[s + 1] = a[1];
  q[s + 2] = a[2];
  q[e] = a[3];
  q[w] = a[4];
  q[w + 1] = a[5];
  q[w + 2] = a[6];
}

RigidTransform arm_forward(const HandModel& m, const ArmAngles& a) {
  const Joint& sh = m.joints[m.arm.shoulder];
  const Joint& el = m.joints[m.arm.elbow];
  const Joint& wr = m.joints[m.arm.wrist];
  auto z = [](double v) { return UnitQuaternion::from_axis_angle(Vec3::UnitZ(), v); };
  auto y = [](double v) { return UnitQuaternion::from_axis_angle(Vec3::UnitY(), v); };
  auto x = [](double v) { return UnitQuaternion::from_axis_angle(Vec3::UnitX(), v); };
  RigidTransform f = sh.origin;
  f.orientation = f.orientation * z(a[0]) * y(a[1]) * x(a[2]);
  f = f * el.origin;
  f.orientation = f.orientation * z(a[3]);
  f = f * wr.origin;
  f.orientation = f.orientation * z(a[4]) * y(a[5]) * x(a[6]);
  return f;
}

std::optional<ArmAngles> arm_ik_at_swivel(const RigidTransform& target, const HandModel& m,
                                          double swivel) {
  const Joint& sh = m.joints[m.arm.shoulder];
  const Joint& el = m.joints[m.arm.elbow];
  const Joint& wr = m.joints[m.arm.wrist];
  const double l1 = m.arm.upper_length, l2 = m.arm.forearm_length;
  const Vec3 ps = sh.origin.position;
  const Vec3 to_wrist = target.position - ps;
  const double d = to_wrist.norm();
  if (d > l1 + l2 + 1e-12 || d < std::abs(l1 - l2) - 1e-12 || d < 1e-12) return std::nullopt;

  const double cos_e = std::clamp((d * d - l1 * l1 - l2 * l2) / (2.0 * l1 * l2), -1.0, 1.0);
  const double e = std::acos(cos_e);
  const double cos_a = std::clamp((l1 * l1 + d * d - l2 * l2) / (2.0 * l1 * d), -1.0, 1.0);
  const double sin_a = std::sqrt(std::max(0.0, 1.0 - cos_a * cos_a));
  const Vec3 n = to_wrist / d;
  Vec3 u, v;
  swivel_basis(n, u, v);
  const Vec3 ev = std::cos(swivel) * u + std::sin(swivel) * v;
  const Vec3 xs = cos_a * n + sin_a * ev;
  const Vec3 ys = sin_a * n - cos_a * ev;
  Mat3 rs;
  rs.col(0) = xs;
  rs.col(1) = ys;
  rs.col(2) = xs.cross(ys);
  const Mat3 r_local = sh.origin.orientation.matrix().transpose() * rs;

  for (const auto& s : zyx_euler(r_local)) {
    if (!within(sh, s)) continue;
    if (e < el.lower[0] || e > el.upper[0]) return std::nullopt;
    const Mat3 r_elbow = sh.origin.orientation.matrix() * zyx_matrix(s[0], s[1], s[2]) *
                         rot(Vec3::UnitZ(), e) * wr.origin.orientation.matrix();
    const Mat3 r_wrist = r_elbow.transpose() * target.orientation.matrix();
    for (const auto& w : zyx_euler(r_wrist)) {
      if (!within(wr, w)) continue;
      return ArmAngles{s[0], s[1], s[2], e, w[0], w[1], w[2]};
    }
  }
  return std::nullopt;
}

ArmIkSolution arm_ik(const RigidTransform& target, const HandModel& m, double hint) {
  const double l1 = m.arm.upper_length, l2 = m.arm.forearm_length;
  const double d = (target.position - m.joints[m.arm.shoulder].origin.position).norm();
  if (d > l1 + l2 + 1e-12 || d < std::abs(l1 - l2) - 1e-12) {
    std::ostringstream os;
    os << "wrist target " << d << " m from the shoulder, arm reaches [" << std::abs(l1 - l2)
       << ", " << l1 + l2 << "] m";
    throw Unreachable(os.str());
  }
  constexpr double step = 0.01;
  const int n_steps = static_cast<int>(std::ceil(kPi / step));
  for (int k = 0; k <= n_steps; ++k) {
    for (int sign : {1, -1}) {
      if (k == 0 && sign < 0) continue;
      const double psi = hint + sign * k * step;
      if (auto q = arm_ik_at_swivel(target, m, psi)) return {*q, wrap(psi)};
    }
  }
  throw Unreachable("no swivel angle gives arm joint angles within limits");
}

std::optional<std::vector<ArmIkSolution>> arm_ik_sequence(
    const std::vector<RigidTransform>& targets, const HandModel& m, double hint,
    double max_step) {
  const int n = static_cast<int>(targets.size());
  if (n == 0) return std::vector<ArmIkSolution>{};
  constexpr int grid = 628;
  const double step = 2.0 * kPi / grid;
  const int window = static_cast<int>(std::floor(max_step / step));
  auto angle = [&](int j) { return -kPi + j * step; };
  auto circ = [&](int a, int b) {
    const int d = std::abs(a - b) % grid;
    return std::min(d, grid - d);
  };

  std::vector<std::vector<std::optional<ArmAngles>>> sol(n);
  for (int k = 0; k < n; ++k) {
    sol[k].resize(grid);
    for (int j = 0; j < grid; ++j) sol[k][j] = arm_ik_at_swivel(targets[k], m, angle(j));
  }
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> cost(grid, inf), next(grid);
  std::vector<std::vector<int>> from(n, std::vector<int>(grid, -1));
  for (int j = 0; j < grid; ++j)
    if (sol[0][j]) cost[j] = std::abs(wrap(angle(j) - hint));
  for (int k = 1; k < n; ++k) {
    std::fill(next.begin(), next.end(), inf);
    for (int j = 0; j < grid; ++j) {
      if (!sol[k][j]) continue;
      for (int d = -window; d <= window; ++d) {
        const int i = ((j + d) % grid + grid) % grid;
        const double c = cost[i] + circ(i, j) * step;
        if (c < next[j]) {
          next[j] = c;
          from[k][j] = i;
        }
      }
    }
    cost.swap(next);
  }
  int j = static_cast<int>(std::min_element(cost.begin(), cost.end()) - cost.begin());
  if (!std::isfinite(cost[j])) return std::nullopt;
  std::vector<ArmIkSolution> out(n);
  for (int k = n - 1; k >= 0; --k) {
    out[k] = {*sol[k][j], angle(j)};
    j = from[k][j];
  }
  return out;
}

double swivel_of(const HandModel& m, const ArmAngles& a) {
  const Joint& sh = m.joints[m.arm.shoulder];
  const double l1 = m.arm.upper_length, l2 = m.arm.forearm_length;
  const Mat3 rs = sh.origin.orientation.matrix() * zyx_matrix(a[0], a[1], a[2]);
  const Vec3 xs = rs.col(0), ys = rs.col(1);
  const Vec3 wrist = arm_forward(m, a).position;
  const Vec3 n = (wrist - sh.origin.position).normalized();
  const double d = (wrist - sh.origin.position).norm();
  const double cos_a = std::clamp((l1 * l1 + d * d - l2 * l2) / (2.0 * l1 * d), -1.0, 1.0);
  const double sin_a = std::sqrt(std::max(0.0, 1.0 - cos_a * cos_a));
  const Vec3 ev = sin_a * xs - cos_a * ys;
  Vec3 u, v;
  swivel_basis(n, u, v);
  return std::atan2(ev.dot(v), ev.dot(u));
}

}  // namespace chopsticks
