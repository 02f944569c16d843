#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "chopsticks/chopsticks.hpp"
#include "chopsticks/hand_model.hpp"
#include "chopsticks/objects.hpp"
#include "chopsticks/styles.hpp"

namespace chopsticks {

enum class Phase { approach, relocate, release };

std::string_view phase_name(Phase p);
Phase parse_phase(std::string_view s);  // throws std::invalid_argument

struct BodyState {
  RigidTransform pose;
  Vec3 velocity = Vec3::Zero();
  Vec3 angular_velocity = Vec3::Zero();
};

/// One 10 ms sample of a hand/chopsticks/object motion. Used both for
/// planned reference trajectories and for tracked ("simulated") replays.
struct TrajectoryFrame {
  Phase phase = Phase::approach;
  ChopstickConfig chop;
  Vec3 chop_velocity = Vec3::Zero();          // of the lower tip
  Vec3 chop_angular_velocity = Vec3::Zero();
  double opening_rate = 0.0;
  BodyState sticks[2];  // capsule centers; 0 = upper stick, 1 = lower stick
  RigidTransform hand_root;
  JointAngles q, qdot;  // hand + arm
  double swivel = 0.0;
  bool has_object = false;
  BodyState object;
  std::vector<double> contact_gaps;   // per finger, 0 for non-contacting fingers
  std::vector<double> finger_forces;  // per finger, zero without dynamics
  double stick_forces[2] = {0.0, 0.0};
};

struct TaskTrajectory {
  double dt = 0.01;
  std::uint64_t morphology_hash = 0;
  GrippingStyle style;
  JointAngles grip_q;
  std::string object_id;
  Shape object_shape = Shape::sphere;
  Vec3 object_size = Vec3::Zero();
  std::vector<TrajectoryFrame> frames;

  double duration() const { return dt * static_cast<double>(frames.size()); }
};

}  // namespace chopsticks
