#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "chopsticks/geometry.hpp"

namespace chopsticks {

using JointAngles = Eigen::VectorXd;

// Generalized hand-and-arm state (q, q dot). qdot may be empty.
struct JointState {
  JointAngles q;
  JointAngles qdot;
};

/// One body of the kinematic tree. The body frame is
/// parent_frame * origin * R(axes[0], q0) * R(axes[1], q1) * ...
/// with every axis a single revolute DoF, composed intrinsically in order.
struct Joint {
  std::string name;
  int parent = -1;  // -1: the fixed world mount (only the shoulder)
  RigidTransform origin;
  std::vector<Vec3> axes;
  std::vector<double> lower, upper;
  std::vector<double> rest;  // T-pose values
  int first_dof = 0;

  int dof_count() const { return static_cast<int>(axes.size()); }
};

/// Capsule geometry rigidly attached to a body, spanning from -> to.
struct Link {
  std::string name;
  int body = 0;
  Vec3 from = Vec3::Zero();
  Vec3 to = Vec3::Zero();
  double radius = 0.0;

  double rest_length() const { return (to - from).norm(); }
};

struct Finger {
  std::string name;
  int tip_link = 0;
};

struct ArmSpec {
  int shoulder = 0, elbow = 0, wrist = 0;  // joint indices
  double upper_length = 0.0;
  double forearm_length = 0.0;
};

/// Where the chopsticks sit in the hand when gripped: the lower-stick tip
/// frame expressed in the hand-root (wrist body) frame, and the opening at
/// which grip poses are solved.
struct GripFrame {
  RigidTransform lower_tip_in_palm;
  double opening = 0.0;
};

/// Immutable articulated hand + 7-DoF arm. Joints are stored so that every
/// parent precedes its children.
class HandModel {
 public:
  std::string name;
  std::vector<Joint> joints;
  std::vector<Link> links;
  std::vector<Finger> fingers;
  ArmSpec arm;
  Vec3 palm_center = Vec3::Zero();  // hand-root frame
  GripFrame grip;

  int dof_count() const { return dof_count_; }
  int hand_dof_count() const;
  int finger_count() const { return static_cast<int>(fingers.size()); }
  int hand_root() const { return arm.wrist; }
  int joint_index(std::string_view name) const;  // -1 when missing
  int link_index(std::string_view name) const;

  JointAngles rest_pose() const;
  JointAngles lower_limits() const;
  JointAngles upper_limits() const;
  JointAngles clamp(const JointAngles& q) const;
  // true for DoFs belonging to the hand (descendants of the hand root).
  const std::vector<bool>& hand_dof_mask() const { return hand_mask_; }
  // Index of the body that owns DoF k.
  int dof_body(int k) const { return dof_body_[k]; }
  // Bodies on the path root -> b, inclusive.
  const std::vector<int>& ancestors(int body) const { return ancestors_[body]; }

  // Recomputes DoF offsets and the cached tree tables; throws FormatError
  // when the model is structurally invalid.
  void finalize();

  // FNV-1a of the canonical morphology text.
  std::uint64_t hash() const;

 private:
  int dof_count_ = 0;
  std::vector<bool> hand_mask_;
  std::vector<int> dof_body_;
  std::vector<std::vector<int>> ancestors_;
};

struct Kinematics {
  std::vector<RigidTransform> bodies;  // world frame of each body
  std::vector<Vec3> dof_axis;          // world axis of each DoF
  std::vector<Vec3> dof_point;         // a world point on each DoF axis
  std::vector<Capsule> links;          // world capsule of each link
};

Kinematics forward_kinematics(const HandModel& model, const JointAngles& q);

// d(point)/dq for a point rigidly attached to `body` (3 x dof, zero columns
// for DoFs that do not move the body).
Eigen::Matrix3Xd point_jacobian(const HandModel& model, const Kinematics& fk, int body,
                                const Vec3& world_point);

// Capsule for link `l` in a world transform `body_frame`.
Capsule link_capsule(const Link& l, const RigidTransform& body_frame);

struct FingertipPoint {
  Vec3 point;       // on the fingertip capsule surface
  double distance;  // |point - target|
  Vec3 axis_point;  // closest point on the fingertip segment
};

FingertipPoint fingertip_closest_point(const HandModel& model, const Kinematics& fk,
                                       int finger, const Vec3& target);
FingertipPoint fingertip_closest_point(const HandModel& model, const JointAngles& q,
                                       int finger, const Vec3& target);

// ---------------------------------------------------------------------------
// PD servo.

struct PDGains {
  Eigen::VectorXd kp, kd, torque_limit;
};

struct TorqueResult {
  Eigen::VectorXd tau;
  std::vector<bool> saturated;
  bool any_saturated = false;
};

// tau = kp (q_target - q) - kd qdot, clamped to +-torque_limit.
TorqueResult pd_torque(const PDGains& gains, const JointAngles& q_target, const JointAngles& q,
                       const JointAngles& qdot);

// kp = 3 on hand DoFs, 50 on shoulder/elbow, 10 on the wrist; kd = 0.1 kp.
PDGains default_gains(const HandModel& model);
PDGains load_gains(const std::filesystem::path& file, const HandModel& model);

// ---------------------------------------------------------------------------
// Morphology files ("morphology/1").

inline constexpr std::string_view kMorphologyFormat = "morphology/1";

HandModel load_morphology(const std::filesystem::path& file);
HandModel parse_morphology(std::string_view text);
std::string morphology_to_string(const HandModel& model);

// Preset names: standard, long-finger, large, tri-finger.
HandModel make_preset(std::string_view name);
std::vector<std::string> preset_names();

// A preset name or a path to a morphology file.
HandModel resolve_hand(std::string_view preset_or_path);

}  // namespace chopsticks
