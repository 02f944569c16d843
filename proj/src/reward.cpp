#include "chopsticks/reward.hpp"

#include <algorithm>
#include <cmath>

#include "chopsticks/errors.hpp"

namespace chopsticks {

RewardBreakdown reward(const TrajectoryFrame& sim, const TrajectoryFrame& ref,
                       const GrippingStyle& style, const RewardWeights& w) {
  if (sim.q.size() != ref.q.size()) throw DimensionMismatch("hand state sizes differ");
  RewardBreakdown r;
  r.hand = -w.hand * (sim.q - ref.q).norm();
  for (int i = 0; i < 2; ++i) {
    r.chop -= w.chop_position * (sim.sticks[i].pose.position - ref.sticks[i].pose.position).norm();
    r.chop -= w.chop_angle * quat_angle(sim.sticks[i].pose.orientation, ref.sticks[i].pose.orientation);
  }
  if (ref.has_object) {
    r.object = -w.object_position * (sim.object.pose.position - ref.object.pose.position).norm() -
               w.object_angle * quat_angle(sim.object.pose.orientation, ref.object.pose.orientation);
  }
  double gaps = 0.0;
  for (int f : style.contacting_fingers())
    if (f < static_cast<int>(sim.contact_gaps.size())) gaps += sim.contact_gaps[f];
  r.contact = -w.contact * gaps;
  r.total = std::exp(r.hand + r.chop + r.object + r.contact);
  return r;
}

TrajectoryScore score_trajectory(const std::vector<TrajectoryFrame>& sim, const TaskTrajectory& ref,
                                 const GrippingStyle& style, const RewardWeights& w) {
  if (sim.size() != ref.frames.size())
    throw DimensionMismatch("simulated and reference trajectories differ in length (" +
                            std::to_string(sim.size()) + " vs " +
                            std::to_string(ref.frames.size()) + ")");
  TrajectoryScore s;
  RewardBreakdown acc{0.0, 0.0, 0.0, 0.0, 0.0};
  for (size_t k = 0; k < sim.size(); ++k) {
    const RewardBreakdown r = reward(sim[k], ref.frames[k], style, w);
    s.per_frame.push_back(r.total);
    acc.hand += r.hand;
    acc.chop += r.chop;
    acc.object += r.object;
    acc.contact += r.contact;
    acc.total += r.total;
  }
  if (!sim.empty()) {
    const double n = static_cast<double>(sim.size());
    s.mean_terms = {acc.hand / n, acc.chop / n, acc.object / n, acc.contact / n, acc.total / n};
    s.average = acc.total / n;
  } else {
    s.mean_terms = {};
    s.average = 0.0;
  }
  return s;
}

int state_dimension(int n, int fingers) {
  return 2 * n + 26 + 13 + 6 + 2 * fingers + 2 + kLookaheadFrames * (2 * n + 15 + 13);
}

namespace {

struct Writer {
  Eigen::VectorXd v;
  int k = 0;
  void put(double x) { v[k++] = x; }
  void put(const Vec3& x) {
    for (int i = 0; i < 3; ++i) put(x[i]);
  }
  void put(const UnitQuaternion& q) {
    for (double c : q.coeffs()) put(c);
  }
  void put(const Eigen::VectorXd& x) {
    for (Eigen::Index i = 0; i < x.size(); ++i) put(x[i]);
  }
};

void put_body(Writer& out, const BodyState& b, const RigidTransform& palm_inv) {
  out.put(palm_inv.apply(b.pose.position));
  out.put(palm_inv.orientation * b.pose.orientation);
  out.put(palm_inv.rotate(b.velocity));
  out.put(palm_inv.rotate(b.angular_velocity));
}

void put_hand(Writer& out, const TrajectoryFrame& f) {
  out.put(f.q);
  out.put(f.qdot.size() == f.q.size() ? f.qdot : Eigen::VectorXd::Zero(f.q.size()).eval());
}

}  // namespace

Eigen::VectorXd assemble_state(const TrajectoryFrame& sim, const TaskTrajectory& ref, double t) {
  const int n = static_cast<int>(sim.q.size());
  const int fingers = static_cast<int>(sim.contact_gaps.size());
  Writer out{Eigen::VectorXd::Zero(state_dimension(n, fingers))};
  const RigidTransform palm_inv = sim.hand_root.inverse();

  put_hand(out, sim);
  for (const BodyState& s : sim.sticks) put_body(out, s, palm_inv);
  put_body(out, sim.object, palm_inv);
  for (Shape s : {Shape::sphere, Shape::capsule, Shape::box})
    out.put(ref.object_shape == s ? 1.0 : 0.0);
  out.put(ref.object_size);
  for (double d : sim.contact_gaps) out.put(d);
  for (int i = 0; i < fingers; ++i)
    out.put(i < static_cast<int>(sim.finger_forces.size()) ? sim.finger_forces[i] : 0.0);
  out.put(sim.stick_forces[0]);
  out.put(sim.stick_forces[1]);

  const int last = static_cast<int>(ref.frames.size()) - 1;
  for (int k = 1; k <= kLookaheadFrames; ++k) {
    const double tk = t + k * kLookaheadStep;
    const int idx = std::clamp(static_cast<int>(std::llround(tk / ref.dt)), 0, std::max(last, 0));
    if (last < 0) throw DimensionMismatch("reference trajectory is empty");
    const TrajectoryFrame& f = ref.frames[idx];
    if (f.q.size() != n) throw DimensionMismatch("reference hand state size differs");
    put_hand(out, f);
    out.put(palm_inv.apply(f.chop.position));
    out.put(palm_inv.orientation * f.chop.orientation);
    out.put(f.chop.opening);
    out.put(palm_inv.rotate(f.chop_velocity));
    out.put(palm_inv.rotate(f.chop_angular_velocity));
    out.put(f.opening_rate);
    put_body(out, f.object, palm_inv);
  }
  return out.v;
}

}  // namespace chopsticks
