#include "chopsticks/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "chopsticks/errors.hpp"
#include "chopsticks/rng.hpp"

namespace chopsticks {

Vec3 bezier_position(double t, const Vec3& p0, const Vec3& q1, const Vec3& q2, const Vec3& p3) {
  const double u = 1.0 - t;
  return u * u * u * p0 + 3.0 * u * u * t * q1 + 3.0 * u * t * t * q2 + t * t * t * p3;
}

Vec3 bezier_derivative(double t, const Vec3& p0, const Vec3& q1, const Vec3& q2, const Vec3& p3) {
  const double u = 1.0 - t;
  return 3.0 * u * u * (q1 - p0) + 6.0 * u * t * (q2 - q1) + 3.0 * t * t * (p3 - q2);
}

double PhasePlan::opening(double time) const {
  if (opening_knots.empty()) return start.opening;
  if (time <= opening_knots.front().first) return opening_knots.front().second;
  for (size_t i = 1; i < opening_knots.size(); ++i) {
    const auto& [t1, v1] = opening_knots[i];
    if (time <= t1) {
      const auto& [t0, v0] = opening_knots[i - 1];
      return t1 > t0 ? v0 + (v1 - v0) * (time - t0) / (t1 - t0) : v1;
    }
  }
  return opening_knots.back().second;
}

ChopstickConfig PhasePlan::at(double s) const {
  return {bezier_position(s, start.position, q1, q2, end.position),
          slerp(start.orientation, end.orientation, s), opening(s * duration())};
}

Vec3 PhasePlan::velocity(double s) const {
  if (samples == 0) return Vec3::Zero();
  return bezier_derivative(s, start.position, q1, q2, end.position) / duration();
}

PhasePlan make_phase(Phase phase, const ChopstickConfig& start, const ChopstickConfig& end,
                     const PlanOptions& options) {
  PhasePlan p;
  p.phase = phase;
  p.start = start;
  p.end = end;
  p.dt = options.dt;
  const Vec3 d = end.position - start.position;
  p.q1 = start.position + d / 3.0;
  p.q2 = start.position + 2.0 * d / 3.0;
  const double seconds = std::max(d.norm() / options.speed,
                                  quat_angle(start.orientation, end.orientation) /
                                      options.angular_speed);
  if (seconds > 0.0) p.samples = std::max<int>(1, static_cast<int>(std::llround(seconds / options.dt)));
  p.opening_knots = {{0.0, start.opening}, {p.duration(), end.opening}};
  return p;
}

std::vector<SampleBarrier> sample_barriers(const PhasePlan& plan, const Environment& env,
                                           const PlanOptions& options, Exec exec) {
  const int n = plan.samples + 1;
  std::vector<SampleBarrier> out(n);
  for_each_index(exec, n, [&](int k) {
    const double s = plan.samples > 0 ? static_cast<double>(k) / plan.samples : 0.0;
    const ChopstickPair pair = chopstick_pair(plan.at(s), options.geometry);
    SampleBarrier& b = out[k];
    b.clearance = std::numeric_limits<double>::infinity();
    auto add = [&](const SurfaceDistance& sd) {
      const BarrierValue v = clamped_clog(sd.distance, options.barrier);
      b.value += v.value;
      b.gradient += v.slope * sd.normal;
      b.clearance = std::min(b.clearance, sd.distance);
    };
    for (int i = 0; i < 2; ++i) {
      const Capsule c = pair.capsule(i, options.geometry);
      add(capsule_halfspace_distance(c, {env.table_height}));
      for (const RigidObject& o : env.objects) add(capsule_object_distance(c, o));
    }
  });
  return out;
}

PathTerms path_objective(const PhasePlan& plan, const Environment& env, const PlanOptions& options,
                         Exec exec) {
  PathTerms t;
  t.gradient = Eigen::VectorXd::Zero(6);
  const int k_max = plan.samples;
  const Vec3& p0 = plan.start.position;
  const Vec3& p3 = plan.end.position;

  if (k_max > 0) {
    for (int k = 0; k <= k_max; ++k) {
      const double s = static_cast<double>(k) / k_max;
      const double w = (k == 0 || k == k_max ? 0.5 : 1.0) / k_max;
      const Vec3 md = bezier_derivative(s, p0, plan.q1, plan.q2, p3);
      const double speed = md.norm();
      t.length += w * speed;
      if (speed > 0.0) {
        const Vec3 u = md / speed;
        const double u1 = 1.0 - s;
        t.gradient.head<3>() += w * (3.0 * u1 * u1 - 6.0 * u1 * s) * u;
        t.gradient.tail<3>() += w * (6.0 * u1 * s - 3.0 * s * s) * u;
      }
    }
  }

  const std::vector<SampleBarrier> b = sample_barriers(plan, env, options, exec);
  t.min_clearance = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= k_max; ++k) {
    const double s = k_max > 0 ? static_cast<double>(k) / k_max : 0.0;
    const double u1 = 1.0 - s;
    t.barrier += b[k].value;
    t.gradient.head<3>() += options.barrier_weight * 3.0 * u1 * u1 * s * b[k].gradient;
    t.gradient.tail<3>() += options.barrier_weight * 3.0 * u1 * s * s * b[k].gradient;
    t.min_clearance = std::min(t.min_clearance, b[k].clearance);
  }
  t.value = t.length + options.barrier_weight * t.barrier;
  return t;
}

double plan_clearance(const PhasePlan& plan, const Environment& env, const PlanOptions& options) {
  double c = std::numeric_limits<double>::infinity();
  for (const SampleBarrier& b : sample_barriers(plan, env, options, Exec::serial))
    c = std::min(c, b.clearance);
  return c;
}

double arc_length(const PhasePlan& plan, int resolution) {
  double len = 0.0;
  Vec3 prev = plan.start.position;
  for (int i = 1; i <= resolution; ++i) {
    const Vec3 p = bezier_position(static_cast<double>(i) / resolution, plan.start.position,
                                   plan.q1, plan.q2, plan.end.position);
    len += (p - prev).norm();
    prev = p;
  }
  return len;
}

PhasePlan optimize_phase(PhasePlan plan, const Environment& env, const PlanOptions& options,
                         std::uint64_t stream_index) {
  if (plan.samples == 0) return plan;
  const Vec3 d = plan.end.position - plan.start.position;
  const Vec3 third = plan.start.position + d / 3.0;
  const Vec3 two_thirds = plan.start.position + 2.0 * d / 3.0;
  const double sigma = 0.25 * std::max(d.norm(), 0.04);

  const int starts = std::max(options.starts, 1);
  std::vector<Eigen::VectorXd> x0(starts, Eigen::VectorXd(6));
  for (int i = 0; i < starts; ++i) {
    Vec3 a = third, b = plan.q2_fixed ? plan.q2 : two_thirds;
    if (i > 0) {
      Rng rng(options.seed, "phase-start", stream_index * 64 + static_cast<std::uint64_t>(i));
      for (int j = 0; j < 3; ++j) a[j] += sigma * rng.normal();
      for (int j = 0; j < 3; ++j) {
        const double n = rng.normal();
        if (!plan.q2_fixed) b[j] += sigma * n;
      }
    }
    x0[i] << a, b;
  }
  const double inf = std::numeric_limits<double>::infinity();
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(6, -inf), hi = Eigen::VectorXd::Constant(6, inf);
  if (plan.q2_fixed) lo.tail<3>() = hi.tail<3>() = plan.q2;

  std::vector<PhasePlan> results(starts, plan);
  std::vector<PathTerms> terms(starts);
  for_each_index(options.exec, starts, [&](int i) {
    PhasePlan trial = plan;
    const Objective f = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
      trial.q1 = x.head<3>();
      trial.q2 = x.tail<3>();
      PathTerms t = path_objective(trial, env, options, Exec::serial);
      grad = std::move(t.gradient);
      return t.value;
    };
    const LbfgsResult r = minimize_lbfgs_box(f, x0[i], lo, hi, options.solver);
    trial.q1 = r.x.head<3>();
    trial.q2 = r.x.tail<3>();
    terms[i] = path_objective(trial, env, options, Exec::serial);
    results[i] = trial;
  });

  int best = -1;
  double worst_penetration = inf;
  for (int i = 0; i < starts; ++i) {
    worst_penetration = std::min(worst_penetration, std::max(0.0, -terms[i].min_clearance));
    if (terms[i].min_clearance < 0.0) continue;
    if (best < 0 || terms[i].value < terms[best].value) best = i;
  }
  if (best < 0)
    throw PlanningFailure(std::string(phase_name(plan.phase)) +
                              ": no collision-free path among " + std::to_string(starts) +
                              " starts (smallest penetration " +
                              std::to_string(worst_penetration) + " m)",
                          worst_penetration);
  return results[best];
}

// ---------------------------------------------------------------------------

Vec3 throw_release_point(const Vec3& target, const ThrowOptions& o) {
  const Vec3& c = o.workspace.center;
  Eigen::Vector2d dir(target.x() - c.x(), target.y() - c.y());
  if (dir.norm() < 1e-12) dir = Eigen::Vector2d(1.0, 0.0);
  const double scale = std::max(std::abs(dir.x()) / o.workspace.half_extents.x(),
                                std::abs(dir.y()) / o.workspace.half_extents.y());
  dir /= scale;
  return {c.x() + dir.x(), c.y() + dir.y(), o.table_height + o.release_height};
}

Vec3 throw_velocity(const Vec3& release, const Vec3& target, const ThrowOptions& o) {
  const double t = o.flight_time;
  if (!(t > 0.0)) throw ThrowInfeasible("flight time must be positive");
  const Vec3 d = target - release;
  const Vec3 v(d.x() / t, d.y() / t, (d.z() + 0.5 * o.gravity * t * t) / t);
  if (v.norm() > o.max_speed)
    throw ThrowInfeasible("release speed " + std::to_string(v.norm()) + " m/s exceeds the " +
                          std::to_string(o.max_speed) + " m/s cap");
  return v;
}

RigidTransform grip_frame(const ChopstickConfig& c, const ChopstickGeometry& g) {
  return {c.frame().apply(0.5 * upper_tip_local(c.opening, g)), c.orientation};
}

ThrowPlan plan_throw(const ChopstickConfig& grasp, const RigidTransform& object_in_grip,
                     const Vec3& target, const ThrowOptions& throw_options,
                     const PlanOptions& options) {
  ThrowPlan t;
  t.release_point = throw_release_point(target, throw_options);
  t.release_velocity = throw_velocity(t.release_point, target, throw_options);
  const UnitQuaternion& o = grasp.orientation;
  const Vec3 mid = t.release_point - o.rotate(object_in_grip.position);
  t.release_config = {mid - o.rotate(0.5 * upper_tip_local(grasp.opening, options.geometry)), o,
                      grasp.opening};
  t.relocate = make_phase(Phase::relocate, grasp, t.release_config, options);
  t.relocate.samples = std::max(t.relocate.samples, 1);
  t.relocate.opening_knots = {{0.0, grasp.opening}};
  // Bezier end tangent is 3 (P3 - q2) per unit parameter.
  t.relocate.q2 = t.release_config.position - t.release_velocity * t.relocate.duration() / 3.0;
  t.relocate.q2_fixed = true;
  return t;
}

// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void rethrow_tagged(Phase p, const PlanningFailure& e) {
  const std::string tag = std::string(phase_name(p)) + ": ";
  const std::string what = e.what();
  throw PlanningFailure(what.rfind(tag, 0) == 0 ? what : tag + what, e.worst_penetration());
}

[[noreturn]] void rethrow_tagged(Phase p, const Unreachable& e) {
  throw Unreachable(std::string(phase_name(p)) + ": " + e.what());
}

Phase phase_of_frame(const TaskPlan& plan, int frame) {
  Phase p = plan.phases.front().phase;
  for (size_t i = 0; i < plan.phases.size(); ++i)
    if (plan.phase_first_frame[i] <= frame) p = plan.phases[i].phase;
  return p;
}

// Arm angles for every frame with a smoothly varying swivel; falls back to
// per-frame solves chained through the previous swivel.
void solve_arm(TaskTrajectory& traj, const TaskPlan& plan, const HandModel& model, double hint) {
  std::vector<RigidTransform> roots;
  for (const TrajectoryFrame& f : traj.frames) roots.push_back(f.hand_root);
  if (auto seq = arm_ik_sequence(roots, model, hint)) {
    for (size_t k = 0; k < roots.size(); ++k) {
      set_arm_angles(model, (*seq)[k].q, traj.frames[k].q);
      traj.frames[k].swivel = (*seq)[k].swivel;
    }
    return;
  }
  double swivel = hint;
  for (size_t k = 0; k < roots.size(); ++k) {
    try {
      const ArmIkSolution arm = arm_ik(roots[k], model, swivel);
      swivel = arm.swivel;
      set_arm_angles(model, arm.q, traj.frames[k].q);
      traj.frames[k].swivel = arm.swivel;
    } catch (const Unreachable& e) {
      rethrow_tagged(phase_of_frame(plan, static_cast<int>(k)), e);
    }
  }
  warn("arm swivel could not be kept within 0.1 rad per frame");
}

PhasePlan optimize_tagged(const PhasePlan& plan, const Environment& env,
                          const PlanOptions& options, std::uint64_t stream) {
  try {
    return optimize_phase(plan, env, options, stream);
  } catch (const PlanningFailure& e) {
    rethrow_tagged(plan.phase, e);
  }
}

}  // namespace

ChopstickConfig transported_grasp(const ChopstickConfig& grasp, const RigidTransform& object_pose,
                                  const RigidTransform& goal, const ChopstickGeometry& g) {
  const RigidTransform object_in_grip = grip_frame(grasp, g).inverse() * object_pose;
  const RigidTransform goal_frame = goal * object_in_grip.inverse();
  return {goal_frame.position - goal_frame.orientation.rotate(0.5 * upper_tip_local(grasp.opening, g)),
          goal_frame.orientation, grasp.opening};
}

TaskPlan assemble_task(const TaskRequest& req, const HandModel& model, const PlanOptions& options,
                       const ThrowOptions& throw_options) {
  const ChopstickGeometry& g = options.geometry;
  const RigidTransform object_in_grip = grip_frame(req.grasp, g).inverse() * req.object.pose;
  const double grasp_opening = req.grasp.opening;
  const double open_wide = std::min(g.max_opening, grasp_opening + options.approach_margin);
  TaskPlan out;

  // Approach: open up, travel, close onto the object at the end.
  PhasePlan approach = make_phase(Phase::approach, req.start, req.grasp, options);
  {
    const double d = approach.duration();
    const double ramp = std::min(options.closing_ramp, 0.5 * d);
    approach.opening_knots = {{0.0, req.start.opening},
                              {ramp, open_wide},
                              {d - ramp, open_wide},
                              {d, grasp_opening}};
    if (d == 0.0) approach.opening_knots = {{0.0, grasp_opening}};
  }
  approach = optimize_tagged(approach, req.environment, options, 0);

  PhasePlan relocate, release;
  if (req.mode == TaskMode::move) {
    const ChopstickConfig goal = transported_grasp(req.grasp, req.object.pose, req.goal, g);
    relocate = make_phase(Phase::relocate, req.grasp, goal, options);
    relocate.opening_knots = {{0.0, grasp_opening}};
    relocate = optimize_tagged(relocate, req.environment, options, 1);

    release = make_phase(Phase::release, goal, goal, options);
    release.samples = static_cast<int>(std::llround(options.release_ramp / options.dt));
    release.opening_knots = {{0.0, grasp_opening}, {release.duration(), 0.0}};
  } else {
    const ThrowPlan tp = plan_throw(req.grasp, object_in_grip, req.target, throw_options, options);
    relocate = optimize_tagged(tp.relocate, req.environment, options, 1);
    out.release_velocity = tp.release_velocity;

    release = make_phase(Phase::release, tp.release_config, tp.release_config, options);
    release.samples = static_cast<int>(std::llround(throw_options.flight_time / options.dt));
    release.opening_knots = {{0.0, grasp_opening},
                             {std::min(0.1, release.duration()), open_wide}};
  }
  out.phases = {approach, relocate, release};

  TaskTrajectory& traj = out.trajectory;
  traj.dt = options.dt;
  traj.morphology_hash = model.hash();
  traj.style = req.grip.style;
  traj.grip_q = req.grip.q;
  traj.object_id = req.object.id;
  traj.object_shape = req.object.shape;
  traj.object_size = req.object.size;

  RigidTransform held = req.object.pose;
  const Vec3 gravity(0.0, 0.0, -throw_options.gravity);
  for (size_t p = 0; p < out.phases.size(); ++p) {
    const PhasePlan& plan = out.phases[p];
    out.phase_first_frame.push_back(static_cast<int>(traj.frames.size()));
    const bool last = p + 1 == out.phases.size();
    // The relocate phase's final sample is the first release frame, so the
    // held pose comes from the end of its path.
    if (plan.phase == Phase::release)
      held = grip_frame(out.phases[p - 1].at(1.0), g) * object_in_grip;
    const int count = plan.samples + (last ? 1 : 0);
    for (int k = 0; k < count; ++k) {
      const double s = plan.samples > 0 ? static_cast<double>(k) / plan.samples : 0.0;
      TrajectoryFrame f;
      f.phase = plan.phase;
      f.chop = plan.at(s);
      const ChopstickPair pair = chopstick_pair(f.chop, g);
      f.sticks[0].pose = pair.stick[0].pose;
      f.sticks[1].pose = pair.stick[1].pose;
      f.hand_root = hand_root_for(f.chop, req.grip);
      f.q = req.grip.q;
      f.has_object = true;
      f.object.pose = req.object.pose;
      if (plan.phase == Phase::relocate) {
        held = grip_frame(f.chop, g) * object_in_grip;
        f.object.pose = held;
      } else if (plan.phase == Phase::release) {
        f.object.pose = held;
        if (req.mode == TaskMode::throw_object) {
          const double t = k * options.dt;
          f.object.pose.position +=
              out.release_velocity * t + 0.5 * gravity * t * t;
        }
      }
      f.contact_gaps.assign(model.finger_count(), 0.0);
      f.finger_forces.assign(model.finger_count(), 0.0);
      traj.frames.push_back(std::move(f));
    }
  }
  solve_arm(traj, out, model, req.swivel_hint);
  fill_velocities(traj);
  return out;
}

namespace {

Vec3 angular_velocity(const UnitQuaternion& a, const UnitQuaternion& b, double dt) {
  return (b * a.inverse()).rotation_vector() / dt;
}

}  // namespace

void fill_velocities(TaskTrajectory& t) {
  const int n = static_cast<int>(t.frames.size());
  for (int k = 0; k < n; ++k) {
    const int a = std::max(k - 1, 0), b = std::min(k + 1, n - 1);
    TrajectoryFrame& f = t.frames[k];
    if (a == b) {
      f.chop_velocity = f.chop_angular_velocity = Vec3::Zero();
      f.opening_rate = 0.0;
      f.qdot = Eigen::VectorXd::Zero(f.q.size());
      continue;
    }
    const TrajectoryFrame& fa = t.frames[a];
    const TrajectoryFrame& fb = t.frames[b];
    const double h = (b - a) * t.dt;
    f.chop_velocity = (fb.chop.position - fa.chop.position) / h;
    f.chop_angular_velocity = angular_velocity(fa.chop.orientation, fb.chop.orientation, h);
    f.opening_rate = (fb.chop.opening - fa.chop.opening) / h;
    for (int i = 0; i < 2; ++i) {
      f.sticks[i].velocity = (fb.sticks[i].pose.position - fa.sticks[i].pose.position) / h;
      f.sticks[i].angular_velocity =
          angular_velocity(fa.sticks[i].pose.orientation, fb.sticks[i].pose.orientation, h);
    }
    f.object.velocity = (fb.object.pose.position - fa.object.pose.position) / h;
    f.object.angular_velocity =
        angular_velocity(fa.object.pose.orientation, fb.object.pose.orientation, h);
    f.qdot = (fb.q - fa.q) / h;
  }
}

}  // namespace chopsticks
