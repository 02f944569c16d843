#include <cmath>
#include <numbers>

#include "chopsticks/errors.hpp"
#include "chopsticks/hand_model.hpp"

namespace chopsticks {

namespace {

constexpr double kPi = std::numbers::pi;

struct FingerDims {
  const char* name;
  Vec3 mcp;  // knuckle position in the palm frame
  double proximal, middle, distal, radius;
};

struct HandParams {
  std::string name;
  double hand_scale = 1.0;    // palm, knuckle placement and radii
  double finger_scale = 1.0;  // phalanx lengths on top of hand_scale
  std::vector<FingerDims> fingers;
  GripFrame grip;
};

UnitQuaternion rz(double a) { return UnitQuaternion::from_axis_angle(Vec3::UnitZ(), a); }
UnitQuaternion ry(double a) { return UnitQuaternion::from_axis_angle(Vec3::UnitY(), a); }
UnitQuaternion rx(double a) { return UnitQuaternion::from_axis_angle(Vec3::UnitX(), a); }

int add_joint(HandModel& m, std::string name, int parent, RigidTransform origin,
              std::vector<Vec3> axes, std::vector<std::pair<double, double>> limits,
              std::vector<double> rest = {}) {
  Joint j;
  j.name = std::move(name);
  j.parent = parent;
  j.origin = origin;
  j.axes = std::move(axes);
  for (auto [lo, hi] : limits) {
    j.lower.push_back(lo);
    j.upper.push_back(hi);
  }
  j.rest = rest.empty() ? std::vector<double>(j.axes.size(), 0.0) : std::move(rest);
  m.joints.push_back(std::move(j));
  return static_cast<int>(m.joints.size()) - 1;
}

int add_link(HandModel& m, std::string name, int body, Vec3 from, Vec3 to, double radius) {
  m.links.push_back({std::move(name), body, from, to, radius});
  return static_cast<int>(m.links.size()) - 1;
}

const Vec3 kX = Vec3::UnitX(), kY = Vec3::UnitY(), kZ = Vec3::UnitZ();

// Right arm; world z is up and the table top is z = 0.
void add_arm(HandModel& m) {
  constexpr double upper = 0.30, forearm = 0.28;
  const RigidTransform mount{Vec3(-0.40, -0.15, 0.35), rx(-kPi / 2)};
  const int sh = add_joint(m, "shoulder", -1, mount, {kZ, kY, kX},
                           {{-1.6, 1.6}, {-1.3, 1.3}, {-2.0, 2.0}});
  const int el = add_joint(m, "elbow", sh, {upper * kX, {}}, {kZ}, {{0.0, 2.6}}, {0.5});
  // Palm dorsum up and thumb toward +y when the arm is at zero.
  const int wr = add_joint(m, "wrist", el, {forearm * kX, rx(kPi / 2)}, {kZ, kY, kX},
                           {{-1.2, 1.2}, {-1.2, 1.2}, {-2.0, 2.0}});
  add_link(m, "upper_arm", sh, Vec3::Zero(), upper * kX, 0.045);
  add_link(m, "forearm", el, Vec3::Zero(), forearm * kX, 0.035);
  m.arm = {sh, el, wr, upper, forearm};
}

HandModel build(const HandParams& p) {
  HandModel m;
  m.name = p.name;
  add_arm(m);
  const int palm = m.arm.wrist;
  const double s = p.hand_scale;
  const double fs = p.hand_scale * p.finger_scale;

  // Thumb: 3-DoF carpometacarpal, 2-DoF metacarpophalangeal, 1-DoF interphalangeal.
  const Vec3 cmc = s * Vec3(0.020, 0.022, -0.012);
  const UnitQuaternion thumb_dir = rz(0.75) * ry(0.35) * rx(-0.9);
  const int t0 = add_joint(m, "thumb_cmc", palm, {cmc, thumb_dir}, {kZ, kY, kX},
                           {{-0.6, 0.6}, {-0.6, 0.9}, {-0.7, 0.7}});
  const double t_meta = 0.044 * fs, t_prox = 0.033 * fs, t_dist = 0.027 * fs;
  const double t_r = 0.0095 * s;
  add_link(m, "thumb_metacarpal", t0, Vec3::Zero(), t_meta * kX, t_r);
  const int t1 = add_joint(m, "thumb_mcp", t0, {t_meta * kX, {}}, {kY, kZ},
                           {{-0.3, 1.3}, {-0.4, 0.4}});
  add_link(m, "thumb_proximal", t1, Vec3::Zero(), t_prox * kX, t_r);
  const int t2 = add_joint(m, "thumb_ip", t1, {t_prox * kX, {}}, {kY}, {{-0.3, 1.5}});
  const int thumb_tip = add_link(m, "thumb_distal", t2, Vec3::Zero(), t_dist * kX, t_r);
  m.fingers.push_back({"thumb", thumb_tip});

  for (const FingerDims& f : p.fingers) {
    const std::string n = f.name;
    const Vec3 mcp = s * f.mcp;
    // Metacarpal bone from the carpus to the knuckle.
    const Vec3 base = s * Vec3(0.010, 0.5 * f.mcp.y(), 0.0);
    const Vec3 bone = mcp - base;
    const double yaw = std::atan2(bone.y(), bone.x());
    const int b0 = add_joint(m, n + "_metacarpal", palm, {base, rz(yaw)}, {kY, kZ},
                             {{-0.2, 0.3}, {-0.15, 0.15}});
    add_link(m, n + "_metacarpal", b0, Vec3::Zero(), bone.norm() * kX, f.radius * s);
    const int b1 = add_joint(m, n + "_mcp", b0, {bone.norm() * kX, rz(-yaw)}, {kZ, kY},
                             {{-0.6, 0.6}, {-0.3, 1.6}});
    const double lp = f.proximal * fs, lm = f.middle * fs, ld = f.distal * fs;
    add_link(m, n + "_proximal", b1, Vec3::Zero(), lp * kX, f.radius * s);
    const int b2 = add_joint(m, n + "_pip", b1, {lp * kX, {}}, {kY}, {{0.0, 1.9}});
    add_link(m, n + "_middle", b2, Vec3::Zero(), lm * kX, f.radius * s);
    const int b3 = add_joint(m, n + "_dip", b2, {lm * kX, {}}, {kY}, {{0.0, 1.5}});
    const int tip = add_link(m, n + "_distal", b3, Vec3::Zero(), ld * kX, f.radius * s);
    m.fingers.push_back({n, tip});
  }

  add_link(m, "palm_radial", palm, s * Vec3(0.005, 0.016, 0.0), s * Vec3(0.080, 0.020, 0.0),
           0.012 * s);
  add_link(m, "palm_ulnar", palm, s * Vec3(0.005, -0.016, 0.0), s * Vec3(0.072, -0.026, 0.0),
           0.012 * s);
  // Web between thumb and index finger.
  add_link(m, "union_valley", palm, cmc, s * Vec3(0.070, 0.026, -0.004), 0.008 * s);

  m.palm_center = s * Vec3(0.045, 0.0, -0.012);
  m.grip = p.grip;
  m.finalize();
  return m;
}

std::vector<FingerDims> human_fingers() {
  return {{"index", {0.088, 0.024, 0.0}, 0.042, 0.025, 0.021, 0.0085},
          {"middle", {0.092, 0.003, 0.0}, 0.046, 0.028, 0.022, 0.0085},
          {"ring", {0.087, -0.016, 0.0}, 0.043, 0.027, 0.021, 0.0080},
          {"pinky", {0.078, -0.033, 0.0}, 0.034, 0.020, 0.019, 0.0075}};
}

GripFrame grip_from(Vec3 lower_tip, UnitQuaternion orientation, double opening) {
  return {{lower_tip, orientation}, opening};
}

// Lower-stick frame from the stick midpoint and a rotation vector. The sticks
// rest across the radial side of the palm, tips pointing forward and down.
GripFrame grip_at(Vec3 mid, Vec3 rotation) {
  const UnitQuaternion o = UnitQuaternion::from_rotation_vector(rotation);
  return grip_from(mid - 0.13 * o.rotate(kZ), o, 0.10);
}

}  // namespace

std::vector<std::string> preset_names() { return {"standard", "long-finger", "large", "tri-finger"}; }

HandModel make_preset(std::string_view name) {
  HandParams p;
  p.name = std::string(name);
  p.fingers = human_fingers();
  p.grip = grip_at({0.058365, -0.013216, -0.087949}, {-1.039001, -0.184343, 2.003548});
  if (name == "standard") {
  } else if (name == "long-finger") {
    p.finger_scale = 2.0;
    p.grip = grip_at({-0.010628, -0.010888, -0.133266}, {-0.695476, -0.614988, 2.409854});
  } else if (name == "large") {
    p.hand_scale = 2.0;
    p.grip = grip_at({0.068787, -0.015614, -0.142481}, {-1.154873, -1.232245, 1.961550});
  } else if (name == "tri-finger") {
    // Two opposing fingers placed at the index and ring knuckles.
    auto f = human_fingers();
    p.fingers = {f[0], f[2]};
    p.fingers[0].name = "finger_a";
    p.fingers[1].name = "finger_b";
  } else {
    throw std::invalid_argument("unknown hand preset '" + std::string(name) + "'");
  }
  return build(p);
}

}  // namespace chopsticks
