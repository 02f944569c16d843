#include "chopsticks/hand_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "chopsticks/errors.hpp"
#include "chopsticks/rng.hpp"
#include "chopsticks/json_util.hpp"

namespace chopsticks {

using nlohmann::json;

int HandModel::hand_dof_count() const {
  return static_cast<int>(std::count(hand_mask_.begin(), hand_mask_.end(), true));
}

int HandModel::joint_index(std::string_view n) const {
  for (size_t i = 0; i < joints.size(); ++i)
    if (joints[i].name == n) return static_cast<int>(i);
  return -1;
}

int HandModel::link_index(std::string_view n) const {
  for (size_t i = 0; i < links.size(); ++i)
    if (links[i].name == n) return static_cast<int>(i);
  return -1;
}

JointAngles HandModel::rest_pose() const {
  JointAngles q(dof_count_);
  for (const Joint& j : joints)
    for (int k = 0; k < j.dof_count(); ++k) q[j.first_dof + k] = j.rest[k];
  return q;
}

JointAngles HandModel::lower_limits() const {
  JointAngles q(dof_count_);
  for (const Joint& j : joints)
    for (int k = 0; k < j.dof_count(); ++k) q[j.first_dof + k] = j.lower[k];
  return q;
}

JointAngles HandModel::upper_limits() const {
  JointAngles q(dof_count_);
  for (const Joint& j : joints)
    for (int k = 0; k < j.dof_count(); ++k) q[j.first_dof + k] = j.upper[k];
  return q;
}

JointAngles HandModel::clamp(const JointAngles& q) const {
  if (q.size() != dof_count_) throw DimensionMismatch("joint vector length does not match model");
  return q.cwiseMax(lower_limits()).cwiseMin(upper_limits());
}

namespace {

void fail(const std::string& msg) { throw FormatError("morphology: " + msg); }

bool near_unit(const Vec3& v) { return std::abs(v.norm() - 1.0) < 1e-9; }

}  // namespace

void HandModel::finalize() {
  if (joints.empty()) fail("no joints");
  std::set<std::string> names;
  int dof = 0;
  for (size_t i = 0; i < joints.size(); ++i) {
    Joint& j = joints[i];
    if (j.name.empty()) fail("joint " + std::to_string(i) + " has no name");
    if (!names.insert(j.name).second) fail("duplicate joint name '" + j.name + "'");
    if (i == 0) {
      if (j.parent != -1) fail("first joint '" + j.name + "' must be the root");
    } else if (j.parent < 0 || j.parent >= static_cast<int>(i)) {
      fail("joint '" + j.name + "' must follow its parent (tree is out of order or cyclic)");
    }
    const size_t n = j.axes.size();
    if (j.lower.size() != n || j.upper.size() != n)
      fail("joint '" + j.name + "' needs one limit pair per axis");
    if (j.rest.empty()) j.rest.assign(n, 0.0);
    if (j.rest.size() != n) fail("joint '" + j.name + "' needs one rest value per axis");
    for (size_t k = 0; k < n; ++k) {
      if (!near_unit(j.axes[k])) fail("joint '" + j.name + "' has a non-unit axis");
      if (!(j.lower[k] <= j.upper[k])) fail("joint '" + j.name + "' has lower > upper limit");
      if (j.rest[k] < j.lower[k] || j.rest[k] > j.upper[k])
        fail("joint '" + j.name + "' rest value outside its limits");
    }
    j.first_dof = dof;
    dof += static_cast<int>(n);
  }
  dof_count_ = dof;

  std::set<std::string> link_names;
  for (const Link& l : links) {
    if (!link_names.insert(l.name).second) fail("duplicate link name '" + l.name + "'");
    if (l.body < 0 || l.body >= static_cast<int>(joints.size()))
      fail("link '" + l.name + "' is attached to an unknown body");
    if (!(l.radius > 0.0)) fail("link '" + l.name + "' must have positive radius");
    if (!(l.rest_length() > 0.0)) fail("link '" + l.name + "' must have positive length");
  }
  if (fingers.size() < 2) fail("at least two fingers are required");
  for (const Finger& f : fingers)
    if (f.tip_link < 0 || f.tip_link >= static_cast<int>(links.size()))
      fail("finger '" + f.name + "' names an unknown fingertip link");

  const int n_joints = static_cast<int>(joints.size());
  auto check_arm_joint = [&](int idx, const char* role, int axes) {
    if (idx < 0 || idx >= n_joints) fail(std::string("arm ") + role + " joint missing");
    if (joints[idx].dof_count() != axes)
      fail(std::string("arm ") + role + " joint must have " + std::to_string(axes) + " axes");
  };
  check_arm_joint(arm.shoulder, "shoulder", 3);
  check_arm_joint(arm.elbow, "elbow", 1);
  check_arm_joint(arm.wrist, "wrist", 3);
  if (arm.shoulder != 0) fail("the shoulder must be the root joint");
  if (joints[arm.elbow].parent != arm.shoulder) fail("elbow must be a child of the shoulder");
  if (joints[arm.wrist].parent != arm.elbow) fail("wrist must be a child of the elbow");
  if (!(arm.upper_length > 0.0) || !(arm.forearm_length > 0.0))
    fail("arm segment lengths must be positive");
  const Vec3 ex = Vec3::UnitX(), ey = Vec3::UnitY(), ez = Vec3::UnitZ();
  const Joint& sh = joints[arm.shoulder];
  const Joint& el = joints[arm.elbow];
  const Joint& wr = joints[arm.wrist];
  if (!sh.axes[0].isApprox(ez) || !sh.axes[1].isApprox(ey) || !sh.axes[2].isApprox(ex) ||
      !wr.axes[0].isApprox(ez) || !wr.axes[1].isApprox(ey) || !wr.axes[2].isApprox(ex))
    fail("shoulder and wrist axes must be z, y, x");
  if (!el.axes[0].isApprox(ez)) fail("elbow axis must be z");
  if ((el.origin.position - arm.upper_length * ex).norm() > 1e-12 ||
      !(el.origin.orientation == UnitQuaternion()))
    fail("elbow origin must sit at the end of the upper arm along x");
  if ((wr.origin.position - arm.forearm_length * ex).norm() > 1e-12)
    fail("wrist origin must sit at the end of the forearm along x");

  ancestors_.assign(n_joints, {});
  for (int b = 0; b < n_joints; ++b) {
    if (joints[b].parent >= 0) ancestors_[b] = ancestors_[joints[b].parent];
    ancestors_[b].push_back(b);
  }
  hand_mask_.assign(dof_count_, false);
  dof_body_.assign(dof_count_, 0);
  for (int b = 0; b < n_joints; ++b) {
    const auto& anc = ancestors_[b];
    const bool in_hand =
        b != arm.wrist && std::find(anc.begin(), anc.end(), arm.wrist) != anc.end();
    for (int k = 0; k < joints[b].dof_count(); ++k) {
      hand_mask_[joints[b].first_dof + k] = in_hand;
      dof_body_[joints[b].first_dof + k] = b;
    }
  }
}

std::uint64_t HandModel::hash() const { return fnv1a(morphology_to_string(*this)); }

// ---------------------------------------------------------------------------

Capsule link_capsule(const Link& l, const RigidTransform& body_frame) {
  const Vec3 a = body_frame.apply(l.from);
  const Vec3 b = body_frame.apply(l.to);
  const Vec3 d = b - a;
  const double len = d.norm();
  const UnitQuaternion rot = UnitQuaternion::from_matrix(
      Eigen::Quaterniond::FromTwoVectors(Vec3::UnitZ(), d / len).toRotationMatrix());
  return {0.5 * len, l.radius, {0.5 * (a + b), rot}};
}

Kinematics forward_kinematics(const HandModel& model, const JointAngles& q) {
  if (q.size() != model.dof_count())
    throw DimensionMismatch("joint vector has " + std::to_string(q.size()) + " entries, model has " +
                            std::to_string(model.dof_count()));
  Kinematics k;
  const size_t n = model.joints.size();
  k.bodies.resize(n);
  k.dof_axis.resize(model.dof_count());
  k.dof_point.resize(model.dof_count());
  for (size_t b = 0; b < n; ++b) {
    const Joint& j = model.joints[b];
    RigidTransform f = j.parent < 0 ? j.origin : k.bodies[j.parent] * j.origin;
    for (int a = 0; a < j.dof_count(); ++a) {
      const int d = j.first_dof + a;
      k.dof_axis[d] = f.rotate(j.axes[a]);
      k.dof_point[d] = f.position;
      f.orientation = f.orientation * UnitQuaternion::from_axis_angle(j.axes[a], q[d]);
    }
    k.bodies[b] = f;
  }
  k.links.reserve(model.links.size());
  for (const Link& l : model.links) k.links.push_back(link_capsule(l, k.bodies[l.body]));
  return k;
}

Eigen::Matrix3Xd point_jacobian(const HandModel& model, const Kinematics& fk, int body,
                                const Vec3& world_point) {
  Eigen::Matrix3Xd jac = Eigen::Matrix3Xd::Zero(3, model.dof_count());
  for (int b : model.ancestors(body)) {
    const Joint& j = model.joints[b];
    for (int a = 0; a < j.dof_count(); ++a) {
      const int d = j.first_dof + a;
      jac.col(d) = fk.dof_axis[d].cross(world_point - fk.dof_point[d]);
    }
  }
  return jac;
}

FingertipPoint fingertip_closest_point(const HandModel& model, const Kinematics& fk, int finger,
                                       const Vec3& target) {
  if (finger < 0 || finger >= model.finger_count())
    throw std::out_of_range("finger index out of range");
  const Capsule& c = fk.links[model.fingers[finger].tip_link];
  const Vec3 a = c.end_a(), b = c.end_b();
  const Vec3 axis_pt = a + closest_segment_point(a, b, target) * (b - a);
  const Vec3 diff = target - axis_pt;
  const double len = diff.norm();
  Vec3 dir;
  if (len > 1e-12) {
    dir = diff / len;
  } else {
    const Vec3 ax = (b - a).normalized();
    dir = ax.cross(std::abs(ax.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY()).normalized();
  }
  const Vec3 p = axis_pt + c.radius * dir;
  return {p, std::abs(len - c.radius), axis_pt};
}

FingertipPoint fingertip_closest_point(const HandModel& model, const JointAngles& q, int finger,
                                       const Vec3& target) {
  return fingertip_closest_point(model, forward_kinematics(model, q), finger, target);
}

// ---------------------------------------------------------------------------

TorqueResult pd_torque(const PDGains& g, const JointAngles& q_target, const JointAngles& q,
                       const JointAngles& qdot) {
  const auto n = q.size();
  if (q_target.size() != n || qdot.size() != n || g.kp.size() != n || g.kd.size() != n ||
      g.torque_limit.size() != n)
    throw DimensionMismatch("pd_torque: inconsistent vector lengths");
  TorqueResult r;
  r.tau = g.kp.cwiseProduct(q_target - q) - g.kd.cwiseProduct(qdot);
  r.saturated.assign(n, false);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lim = g.torque_limit[i];
    if (std::abs(r.tau[i]) > lim) {
      r.tau[i] = std::copysign(lim, r.tau[i]);
      r.saturated[i] = true;
      r.any_saturated = true;
    }
  }
  return r;
}

PDGains default_gains(const HandModel& model) {
  const int n = model.dof_count();
  PDGains g{Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (int d = 0; d < n; ++d) {
    const int body = model.dof_body(d);
    double kp = 3.0, limit = 1.0;
    if (body == model.arm.shoulder || body == model.arm.elbow) {
      kp = 50.0;
      limit = 40.0;
    } else if (body == model.arm.wrist) {
      kp = 10.0;
      limit = 10.0;
    }
    g.kp[d] = kp;
    g.kd[d] = 0.1 * kp;
    g.torque_limit[d] = limit;
  }
  return g;
}

PDGains load_gains(const std::filesystem::path& file, const HandModel& model) {
  const json j = detail::read_json_file(file);
  PDGains g = default_gains(model);
  auto group_of = [&](int d) -> std::string {
    const int body = model.dof_body(d);
    if (body == model.arm.shoulder || body == model.arm.elbow) return "arm";
    if (body == model.arm.wrist) return "wrist";
    return "hand";
  };
  for (int d = 0; d < model.dof_count(); ++d) {
    const std::string grp = group_of(d);
    if (!j.contains(grp)) continue;
    const json& e = j.at(grp);
    if (e.contains("kp")) g.kp[d] = e.at("kp").get<double>();
    g.kd[d] = e.contains("kd") ? e.at("kd").get<double>() : 0.1 * g.kp[d];
    if (e.contains("torque_limit")) g.torque_limit[d] = e.at("torque_limit").get<double>();
    if (g.kp[d] < 0.0 || g.kd[d] < 0.0) throw FormatError("gains must be nonnegative");
  }
  return g;
}

// ---------------------------------------------------------------------------
// Morphology text.

std::string morphology_to_string(const HandModel& m) {
  json j;
  j["format"] = kMorphologyFormat;
  j["name"] = m.name;
  json joints = json::array();
  for (const Joint& jt : m.joints) {
    json e;
    e["name"] = jt.name;
    e["parent"] = jt.parent < 0 ? json(nullptr) : json(m.joints[jt.parent].name);
    e["origin"] = detail::to_json(jt.origin);
    json axes = json::array(), limits = json::array();
    for (size_t k = 0; k < jt.axes.size(); ++k) {
      axes.push_back(detail::to_json(jt.axes[k]));
      limits.push_back({jt.lower[k], jt.upper[k]});
    }
    e["axes"] = axes;
    e["limits"] = limits;
    e["rest"] = jt.rest;
    joints.push_back(e);
  }
  j["joints"] = joints;
  json links = json::array();
  for (const Link& l : m.links)
    links.push_back({{"name", l.name},
                     {"body", m.joints[l.body].name},
                     {"from", detail::to_json(l.from)},
                     {"to", detail::to_json(l.to)},
                     {"radius", l.radius}});
  j["links"] = links;
  json fingers = json::array();
  for (const Finger& f : m.fingers)
    fingers.push_back({{"name", f.name}, {"tip_link", m.links[f.tip_link].name}});
  j["fingers"] = fingers;
  j["arm"] = {{"shoulder", m.joints[m.arm.shoulder].name},
              {"elbow", m.joints[m.arm.elbow].name},
              {"wrist", m.joints[m.arm.wrist].name},
              {"upper_length", m.arm.upper_length},
              {"forearm_length", m.arm.forearm_length}};
  j["palm_center"] = detail::to_json(m.palm_center);
  j["grip"] = {{"lower_tip", detail::to_json(m.grip.lower_tip_in_palm)},
               {"opening", m.grip.opening}};
  return j.dump(2) + "\n";
}

HandModel parse_morphology(std::string_view text) {
  const json j = detail::parse_json(text, "morphology");
  HandModel m;
  try {
    const std::string fmt = j.at("format").get<std::string>();
    if (fmt != kMorphologyFormat)
      fail("unsupported format '" + fmt + "', expected " + std::string(kMorphologyFormat));
    m.name = j.value("name", std::string("custom"));
    for (const json& e : j.at("joints")) {
      Joint jt;
      jt.name = e.at("name").get<std::string>();
      if (e.at("parent").is_null()) {
        jt.parent = -1;
      } else {
        const std::string p = e.at("parent").get<std::string>();
        jt.parent = m.joint_index(p);
        if (jt.parent < 0)
          fail("joint '" + jt.name + "' appears before its parent '" + p +
               "' (tree is out of order or cyclic)");
      }
      jt.origin = detail::transform_from_json(e.at("origin"));
      for (const json& a : e.at("axes")) jt.axes.push_back(detail::vec3_from_json(a));
      for (const json& l : e.at("limits")) {
        if (!l.is_array() || l.size() != 2) fail("joint '" + jt.name + "' limit must be [lo, hi]");
        jt.lower.push_back(l[0].get<double>());
        jt.upper.push_back(l[1].get<double>());
      }
      if (e.contains("rest")) jt.rest = e.at("rest").get<std::vector<double>>();
      m.joints.push_back(std::move(jt));
    }
    for (const json& e : j.at("links")) {
      Link l;
      l.name = e.at("name").get<std::string>();
      l.body = m.joint_index(e.at("body").get<std::string>());
      if (l.body < 0) fail("link '" + l.name + "' is attached to an unknown body");
      l.from = detail::vec3_from_json(e.at("from"));
      l.to = detail::vec3_from_json(e.at("to"));
      l.radius = e.at("radius").get<double>();
      m.links.push_back(std::move(l));
    }
    for (const json& e : j.at("fingers")) {
      Finger f;
      f.name = e.at("name").get<std::string>();
      const std::string tip = e.at("tip_link").get<std::string>();
      f.tip_link = m.link_index(tip);
      if (f.tip_link < 0) fail("finger '" + f.name + "' names unknown link '" + tip + "'");
      m.fingers.push_back(std::move(f));
    }
    const json& a = j.at("arm");
    m.arm.shoulder = m.joint_index(a.at("shoulder").get<std::string>());
    m.arm.elbow = m.joint_index(a.at("elbow").get<std::string>());
    m.arm.wrist = m.joint_index(a.at("wrist").get<std::string>());
    m.arm.upper_length = a.at("upper_length").get<double>();
    m.arm.forearm_length = a.at("forearm_length").get<double>();
    m.palm_center = detail::vec3_from_json(j.at("palm_center"));
    m.grip.lower_tip_in_palm = detail::transform_from_json(j.at("grip").at("lower_tip"));
    m.grip.opening = j.at("grip").at("opening").get<double>();
  } catch (const json::exception& e) {
    fail(e.what());
  }
  m.finalize();
  return m;
}

HandModel load_morphology(const std::filesystem::path& file) {
  return parse_morphology(detail::read_text_file(file));
}

HandModel resolve_hand(std::string_view preset_or_path) {
  const auto names = preset_names();
  if (std::find(names.begin(), names.end(), preset_or_path) != names.end())
    return make_preset(preset_or_path);
  return load_morphology(std::filesystem::path(preset_or_path));
}

}  // namespace chopsticks
