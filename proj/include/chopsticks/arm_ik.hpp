#pragma once

#include <array>
#include <optional>
#include <vector>

#include "chopsticks/hand_model.hpp"

namespace chopsticks {

using ArmAngles = std::array<double, 7>;  // shoulder z,y,x; elbow; wrist z,y,x

struct ArmIkSolution {
  ArmAngles q{};
  double swivel = 0.0;
};

// Swivel angle convention: the elbow lies at angle `swivel` around the
// shoulder->wrist axis, measured from the direction of world -z projected
// onto the plane normal to that axis (0 = elbow hanging down).

// Closed-form 7-DoF arm IK for a hand-root (wrist body) world transform.
// Tries the hinted swivel first and otherwise the feasible swivel nearest to
// it. Throws Unreachable when the wrist is outside the annulus
// [|L1 - L2|, L1 + L2] or no swivel yields joint angles within limits.
ArmIkSolution arm_ik(const RigidTransform& hand_root, const HandModel& model,
                     double swivel_hint = 0.0);

// Arm solutions for consecutive targets whose swivel changes by at most
// `max_step` between neighbours, moving the swivel as little as possible in
// total (starting from `swivel_hint`). Swivels come from a 0.01 rad grid.
// nullopt when no such sequence exists on that grid.
std::optional<std::vector<ArmIkSolution>> arm_ik_sequence(
    const std::vector<RigidTransform>& targets, const HandModel& model, double swivel_hint,
    double max_step = 0.1);

// Joint angles for a fixed swivel; nullopt when they violate a limit or the
// wrist is out of reach.
std::optional<ArmAngles> arm_ik_at_swivel(const RigidTransform& hand_root, const HandModel& model,
                                          double swivel);

// Swivel of an arm configuration.
double swivel_of(const HandModel& model, const ArmAngles& q);

ArmAngles arm_angles(const HandModel& model, const JointAngles& q);
void set_arm_angles(const HandModel& model, const ArmAngles& arm, JointAngles& q);

// Hand-root transform produced by arm angles (hand DoFs are irrelevant).
RigidTransform arm_forward(const HandModel& model, const ArmAngles& q);

}  // namespace chopsticks
