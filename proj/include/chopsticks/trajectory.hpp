#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "chopsticks/frames.hpp"
#include "chopsticks/grasp.hpp"
#include "chopsticks/kernels.hpp"
#include "chopsticks/lbfgs.hpp"

namespace chopsticks {

// Cubic Bezier through P0 and P3 with inner control points q1, q2.
Vec3 bezier_position(double t, const Vec3& p0, const Vec3& q1, const Vec3& q2, const Vec3& p3);
// d/dt of bezier_position.
Vec3 bezier_derivative(double t, const Vec3& p0, const Vec3& q1, const Vec3& q2, const Vec3& p3);

struct PlanOptions {
  double speed = 0.25;          // lower-tip speed, m/s
  double angular_speed = 1.0;   // rad/s, for phases that mostly rotate
  double dt = 0.01;
  double barrier = 0.001;       // clearance below which the barrier is active
  double barrier_weight = 1.0;  // per 10 ms sample
  double closing_ramp = 0.2;    // approach: close onto the object
  double release_ramp = 0.3;    // release: open to zero
  double approach_margin = 0.15;  // extra opening while approaching
  int starts = 5;
  LbfgsOptions solver{200, 1e-9, 10};
  std::uint64_t seed = 0;
  Exec exec = Exec::parallel;
  ChopstickGeometry geometry;
};

/// One phase of a task: the lower-tip path is a cubic Bezier from start to
/// end with free inner points q1, q2; the orientation is slerped start to
/// end; the opening follows piecewise-linear knots in time.
struct PhasePlan {
  Phase phase = Phase::approach;
  ChopstickConfig start, end;
  Vec3 q1 = Vec3::Zero(), q2 = Vec3::Zero();
  bool q2_fixed = false;  // end tangent pinned (throw release velocity)
  int samples = 0;        // 10 ms intervals; duration = samples * dt
  double dt = 0.01;
  std::vector<std::pair<double, double>> opening_knots;  // (time, opening)

  double duration() const { return samples * dt; }
  double opening(double time) const;
  // Configuration at path parameter s in [0, 1].
  ChopstickConfig at(double s) const;
  // Lower-tip velocity (m/s) at s.
  Vec3 velocity(double s) const;
};

// Plan with straight-line control points at thirds and a duration of
// max(displacement / speed, rotation / angular_speed) rounded to whole
// samples (at least one sample unless start equals end).
PhasePlan make_phase(Phase phase, const ChopstickConfig& start, const ChopstickConfig& end,
                     const PlanOptions& options);

struct PathTerms {
  double value = 0.0;
  double length = 0.0;
  double barrier = 0.0;
  double min_clearance = 0.0;
  Eigen::VectorXd gradient;  // d value / d (q1, q2)
};

// Discretized arc length of the path plus the clearance barrier summed over
// every 10 ms sample, stick and obstacle.
PathTerms path_objective(const PhasePlan& plan, const Environment& env, const PlanOptions& options,
                         Exec exec = Exec::serial);

// Per-sample clearance barrier: value, gradient with respect to the lower
// tip position and minimum clearance, one entry per sample 0..samples.
struct SampleBarrier {
  double value = 0.0;
  Vec3 gradient = Vec3::Zero();
  double clearance = 0.0;
};
std::vector<SampleBarrier> sample_barriers(const PhasePlan& plan, const Environment& env,
                                           const PlanOptions& options, Exec exec);

// Multi-start L-BFGS over q1, q2 (q1 only when q2 is pinned). Throws
// PlanningFailure when no start ends collision-free.
PhasePlan optimize_phase(PhasePlan plan, const Environment& env, const PlanOptions& options,
                         std::uint64_t stream_index = 0);

// Lowest stick clearance over the samples of a plan.
double plan_clearance(const PhasePlan& plan, const Environment& env, const PlanOptions& options);

// Arc length of the lower-tip path, measured on a fine grid.
double arc_length(const PhasePlan& plan, int resolution = 2000);

// ---------------------------------------------------------------------------
// Throwing.

struct ThrowOptions {
  Workspace workspace;
  double table_height = 0.0;
  double release_height = 0.3;  // above the table
  double flight_time = 0.3;
  double gravity = 9.81;
  double max_speed = 5.0;
};

// Release point on the workspace footprint boundary, along the ray from its
// center toward the target, at release height.
Vec3 throw_release_point(const Vec3& target, const ThrowOptions& options);

// Velocity that carries a projectile from `release` to `target` in
// `flight_time`. Throws ThrowInfeasible above max_speed.
Vec3 throw_velocity(const Vec3& release, const Vec3& target, const ThrowOptions& options);

struct ThrowPlan {
  Vec3 release_point;     // object center at release
  Vec3 release_velocity;
  ChopstickConfig release_config;
  PhasePlan relocate;     // ends at release_config with the release velocity
};

// `grasp` is the configuration holding the object, `object_in_grip` the
// object pose relative to the tip-midpoint frame.
ThrowPlan plan_throw(const ChopstickConfig& grasp, const RigidTransform& object_in_grip,
                     const Vec3& target, const ThrowOptions& throw_options,
                     const PlanOptions& options);

// ---------------------------------------------------------------------------
// Whole tasks.

// Frame {tip midpoint, lower-stick orientation}, to which a grasped object
// is rigidly attached.
RigidTransform grip_frame(const ChopstickConfig& c, const ChopstickGeometry& g = {});

enum class TaskMode { move, throw_object };

struct TaskRequest {
  RigidObject object;        // at its start pose
  ChopstickConfig start;     // chopsticks before the approach
  ChopstickConfig grasp;
  TaskMode mode = TaskMode::move;
  RigidTransform goal;       // object goal pose (move)
  Vec3 target = Vec3::Zero();  // landing point (throw)
  GripPose grip;
  Environment environment;   // obstacles other than the object
  double swivel_hint = 0.0;
};

struct TaskPlan {
  TaskTrajectory trajectory;
  std::vector<PhasePlan> phases;
  std::vector<int> phase_first_frame;
  Vec3 release_velocity = Vec3::Zero();  // throw only
};

// Grasp configuration carried along with the object from object_pose to goal.
ChopstickConfig transported_grasp(const ChopstickConfig& grasp, const RigidTransform& object_pose,
                                  const RigidTransform& goal, const ChopstickGeometry& g = {});

// Approach, relocate and release phases sampled every 10 ms, with the hand
// root and arm solved per frame. PlanningFailure and Unreachable carry the
// phase name in their message.
TaskPlan assemble_task(const TaskRequest& request, const HandModel& model,
                       const PlanOptions& options = {}, const ThrowOptions& throw_options = {});

// Fills velocities by central differences (one-sided at the ends).
void fill_velocities(TaskTrajectory& t);

}  // namespace chopsticks
