#pragma once

#include <vector>

#include "chopsticks/chopsticks.hpp"
#include "chopsticks/hand_model.hpp"
#include "chopsticks/lbfgs.hpp"
#include "chopsticks/styles.hpp"

namespace chopsticks {

inline constexpr double kContactBarrier = 0.001;
inline constexpr double kHoldingOffsetLimit = 0.05;

/// Normalized contact location along the assigned stick, one entry per
/// contacting finger (0 = tip, 1 = rear).
struct ContactProposal {
  std::vector<double> x;
};

/// A solved grip. `q` is the full hand+arm vector with the arm at its rest
/// values; only the hand DoFs matter when the grip is reused elsewhere.
struct GripPose {
  JointAngles q;
  GrippingStyle style;
  ContactProposal contacts;
  std::vector<Vec3> anchors;  // per contacting finger, lower-tip frame
  double holding_offset = 0.0;
  RigidTransform lower_tip_in_palm;  // at zero holding offset
  double opening = 0.0;
  std::vector<double> residuals;  // fingertip-to-contact distance per contacting finger
  double max_penetration = 0.0;
  int iterations = 0;

  // Lower-tip frame in the hand-root frame, including the holding offset.
  RigidTransform chopsticks_in_palm() const;
};

struct GripScene {
  ChopstickPair pair;
  Vec3 palm_center;
};

// Sticks placed in the hand at the model's rest grip for hand-root pose
// `palm` (world).
GripScene grip_scene(const HandModel& model, const RigidTransform& palm,
                     const ChopstickGeometry& g = {});

// p_i(x): for each contacting finger, the point on its stick axis at fraction
// x_i of the length, pushed out to the stick surface toward the palm center.
std::vector<Vec3> contact_points(const ContactProposal& x, const GrippingStyle& style,
                                 const ChopstickPair& pair, const Vec3& palm_center,
                                 const ChopstickGeometry& g = {});

struct IkTerms {
  double value = 0.0;
  Eigen::VectorXd gradient;
  std::vector<double> residuals;
  std::vector<double> clearances;
};

// Sum over contacting fingers of |f_i(q) - p_i|^2 + clog(z0 + clearance_i, z0),
// with the barrier floored as in clamped_clog. The gradient covers every DoF
// (arm columns included).
IkTerms ik_objective(const JointAngles& q, const std::vector<Vec3>& contacts,
                     const GrippingStyle& style, const HandModel& model,
                     const ChopstickPair& pair, const ChopstickGeometry& g = {});

struct GripIkOptions {
  LbfgsOptions solver;
  double residual_tolerance = 0.001;
  double penetration_tolerance = 0.001;
};

// Minimizes ik_objective over the hand DoFs from the rest pose, with the
// arm held at rest. Throws InfeasibleContact when the converged pose misses a
// contact by 1 mm or penetrates a stick by 1 mm.
GripPose solve_grip_ik(const ContactProposal& x, const GrippingStyle& style,
                       const HandModel& model, const ChopstickGeometry& g = {},
                       const GripIkOptions& options = {});

// Contact-maintenance solve against an arbitrary stick pair, warm-started
// from q0 and moving only the hand DoFs. Returns the pose without
// feasibility checks; residuals/penetration are reported for the caller.
GripPose track_contacts(const JointAngles& q0, const GripPose& grip, const HandModel& model,
                        const ChopstickPair& pair, const ChopstickGeometry& g = {},
                        const LbfgsOptions& solver = {});

}  // namespace chopsticks
