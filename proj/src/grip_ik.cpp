#include "chopsticks/grip_ik.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "chopsticks/errors.hpp"

namespace chopsticks {

RigidTransform GripPose::chopsticks_in_palm() const {
  return lower_tip_in_palm * RigidTransform{Vec3(0.0, 0.0, holding_offset), {}};
}

GripScene grip_scene(const HandModel& model, const RigidTransform& palm,
                     const ChopstickGeometry& g) {
  const RigidTransform c = palm * model.grip.lower_tip_in_palm;
  return {chopstick_pair({c.position, c.orientation, model.grip.opening}, g),
          palm.apply(model.palm_center)};
}

namespace {

void check_style(const GrippingStyle& style, const HandModel& model) {
  if (style.finger_count() != model.finger_count())
    throw DimensionMismatch("style has " + std::to_string(style.finger_count()) +
                            " entries, hand has " + std::to_string(model.finger_count()) +
                            " fingers");
  if (style.contact_count() == 0)
    throw std::invalid_argument("style has no contacting finger");
}

int stick_of(int assignment) { return assignment == 1 ? 0 : 1; }

}  // namespace

std::vector<Vec3> contact_points(const ContactProposal& x, const GrippingStyle& style,
                                 const ChopstickPair& pair, const Vec3& palm_center,
                                 const ChopstickGeometry& g) {
  const auto fingers = style.contacting_fingers();
  if (x.x.size() != fingers.size())
    throw DimensionMismatch("contact proposal needs one entry per contacting finger");
  std::vector<Vec3> out;
  out.reserve(fingers.size());
  for (size_t k = 0; k < fingers.size(); ++k) {
    const double xi = x.x[k];
    if (!(xi >= 0.0 && xi <= 1.0)) throw std::invalid_argument("contact location outside [0, 1]");
    const StickState& s = pair.stick[stick_of(style.c[fingers[k]])];
    const Vec3 axis = (s.rear - s.tip).normalized();
    const Vec3 on_axis = s.tip + xi * g.length * axis;
    Vec3 side = palm_center - on_axis;
    side -= side.dot(axis) * axis;
    const double n = side.norm();
    if (n < 1e-12) side = axis.cross(std::abs(axis.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY());
    out.push_back(on_axis + g.radius * side.normalized());
  }
  return out;
}

IkTerms ik_objective(const JointAngles& q, const std::vector<Vec3>& contacts,
                     const GrippingStyle& style, const HandModel& model, const ChopstickPair& pair,
                     const ChopstickGeometry& g) {
  check_style(style, model);
  const auto fingers = style.contacting_fingers();
  if (contacts.size() != fingers.size())
    throw DimensionMismatch("one contact point per contacting finger required");
  const Kinematics fk = forward_kinematics(model, q);
  IkTerms t;
  t.gradient = Eigen::VectorXd::Zero(model.dof_count());
  for (size_t k = 0; k < fingers.size(); ++k) {
    const int finger = fingers[k];
    const int tip_link = model.fingers[finger].tip_link;
    const int body = model.links[tip_link].body;
    const Capsule& tip = fk.links[tip_link];

    // Attraction: (rho - r)^2 with rho the distance from the target to the
    // fingertip segment; the segment parameter is held fixed when
    // differentiating (envelope of the inner minimization).
    const FingertipPoint fp = fingertip_closest_point(model, fk, finger, contacts[k]);
    const Vec3 diff = contacts[k] - fp.axis_point;
    const double rho = diff.norm();
    const double e = rho - tip.radius;
    t.value += e * e;
    t.residuals.push_back(std::abs(e));
    if (rho > 1e-12) {
      const Eigen::Matrix3Xd jac = point_jacobian(model, fk, body, fp.axis_point);
      t.gradient += -2.0 * e * (jac.transpose() * (diff / rho));
    }

    // Penetration barrier against the assigned stick.
    const Capsule stick = pair.capsule(stick_of(style.c[finger]), g);
    const SurfaceDistance sd = capsule_distance(tip, stick);
    t.clearances.push_back(sd.distance);
    const BarrierValue b = clamped_clog(kContactBarrier + sd.distance, kContactBarrier);
    t.value += b.value;
    if (b.slope != 0.0) {
      const Vec3 axis_pt = sd.point_a + tip.radius * sd.normal;
      const Eigen::Matrix3Xd jac = point_jacobian(model, fk, body, axis_pt);
      t.gradient += b.slope * (jac.transpose() * sd.normal);
    }
  }
  return t;
}

namespace {

// Bounds that pin every non-hand DoF at its value in q.
void hand_only_bounds(const HandModel& model, const JointAngles& q, Eigen::VectorXd& lo,
                      Eigen::VectorXd& hi) {
  lo = model.lower_limits();
  hi = model.upper_limits();
  const auto& mask = model.hand_dof_mask();
  for (int d = 0; d < model.dof_count(); ++d)
    if (!mask[d]) lo[d] = hi[d] = q[d];
}

std::vector<Vec3> to_frame(const RigidTransform& f, const std::vector<Vec3>& pts) {
  const RigidTransform inv = f.inverse();
  std::vector<Vec3> out;
  for (const Vec3& p : pts) out.push_back(inv.apply(p));
  return out;
}

}  // namespace

GripPose solve_grip_ik(const ContactProposal& x, const GrippingStyle& style,
                       const HandModel& model, const ChopstickGeometry& g,
                       const GripIkOptions& options) {
  check_style(style, model);
  const JointAngles q0 = model.rest_pose();
  const RigidTransform palm = forward_kinematics(model, q0).bodies[model.hand_root()];
  const GripScene scene = grip_scene(model, palm, g);
  const std::vector<Vec3> contacts = contact_points(x, style, scene.pair, scene.palm_center, g);

  Eigen::VectorXd lo, hi;
  hand_only_bounds(model, q0, lo, hi);
  const Objective f = [&](const Eigen::VectorXd& q, Eigen::VectorXd& grad) {
    IkTerms t = ik_objective(q, contacts, style, model, scene.pair, g);
    grad = std::move(t.gradient);
    return t.value;
  };
  const LbfgsResult res = minimize_lbfgs_box(f, q0, lo, hi, options.solver);
  const IkTerms t = ik_objective(res.x, contacts, style, model, scene.pair, g);

  GripPose pose;
  pose.q = res.x;
  pose.style = style;
  pose.contacts = x;
  const RigidTransform lower_tip = palm * model.grip.lower_tip_in_palm;
  pose.anchors = to_frame(lower_tip, contacts);
  pose.lower_tip_in_palm = model.grip.lower_tip_in_palm;
  pose.opening = model.grip.opening;
  pose.residuals = t.residuals;
  pose.iterations = res.iterations;
  double worst_res = 0.0;
  for (double r : t.residuals) worst_res = std::max(worst_res, r);
  for (double c : t.clearances) pose.max_penetration = std::max(pose.max_penetration, -c);

  if (worst_res >= options.residual_tolerance ||
      pose.max_penetration >= options.penetration_tolerance) {
    std::ostringstream os;
    os << "grip IK for style (" << format_style(style) << ") did not reach its contacts: worst "
       << "residual " << worst_res << " m, penetration " << pose.max_penetration << " m after "
       << res.iterations << " iterations";
    throw InfeasibleContact(os.str(), t.residuals, pose.max_penetration);
  }
  return pose;
}

GripPose track_contacts(const JointAngles& q0, const GripPose& grip, const HandModel& model,
                        const ChopstickPair& pair, const ChopstickGeometry& g,
                        const LbfgsOptions& solver) {
  check_style(grip.style, model);
  const auto fingers = grip.style.contacting_fingers();
  // Anchors ride on their own stick: re-express upper-stick anchors in the
  // upper stick frame at the grip opening, then place them on `pair`.
  const RigidTransform upper_rel{upper_tip_local(grip.opening, g),
                                 upper_rotation_local(grip.opening, g)};
  const RigidTransform upper_rel_inv = upper_rel.inverse();
  std::vector<Vec3> contacts;
  for (size_t k = 0; k < fingers.size(); ++k) {
    const int s = stick_of(grip.style.c[fingers[k]]);
    const StickState& st = pair.stick[s];
    const RigidTransform tip_frame{st.tip, st.pose.orientation};
    const Vec3 local = s == 0 ? upper_rel_inv.apply(grip.anchors[k]) : grip.anchors[k];
    contacts.push_back(tip_frame.apply(local));
  }
  Eigen::VectorXd lo, hi;
  hand_only_bounds(model, q0, lo, hi);
  const Objective f = [&](const Eigen::VectorXd& q, Eigen::VectorXd& grad) {
    IkTerms t = ik_objective(q, contacts, grip.style, model, pair, g);
    grad = std::move(t.gradient);
    return t.value;
  };
  const LbfgsResult res = minimize_lbfgs_box(f, q0, lo, hi, solver);
  const IkTerms t = ik_objective(res.x, contacts, grip.style, model, pair, g);
  GripPose out = grip;
  out.q = res.x;
  out.residuals = t.residuals;
  out.iterations = res.iterations;
  out.max_penetration = 0.0;
  for (double c : t.clearances) out.max_penetration = std::max(out.max_penetration, -c);
  return out;
}

}  // namespace chopsticks
