#pragma once

#include "chopsticks/geometry.hpp"

namespace chopsticks {

/// Stick dimensions and the hinge that relates the two sticks. The upper
/// stick rotates about an axis through a pivot `pivot_to_tip` from the tips,
/// offset from the lower stick axis by `pivot_gap`; at zero opening both tips
/// meet.
struct ChopstickGeometry {
  double length = 0.26;
  double radius = 0.004;
  double pivot_to_tip = 0.2;
  double pivot_gap = 0.02;
  double max_opening = 0.3;
};

/// Parallel-gripper view: the lower-stick tip pose (local z runs from tip to
/// rear, local x points toward the upper stick) plus the opening angle about
/// local y.
struct ChopstickConfig {
  Vec3 position = Vec3::Zero();
  UnitQuaternion orientation;
  double opening = 0.0;

  RigidTransform frame() const { return {position, orientation}; }
};

struct StickState {
  RigidTransform pose;  // capsule center, local z along the stick toward the rear
  Vec3 tip = Vec3::Zero();
  Vec3 rear = Vec3::Zero();
};

/// Both sticks in world coordinates. Index 0 is the upper stick (stick 1),
/// index 1 the lower stick (stick 2).
struct ChopstickPair {
  StickState stick[2];
  Capsule capsule(int i, const ChopstickGeometry& g) const {
    return {0.5 * g.length, g.radius, stick[i].pose};
  }
  Vec3 tip_midpoint() const { return 0.5 * (stick[0].tip + stick[1].tip); }
};

ChopstickPair chopstick_pair(const ChopstickConfig& c, const ChopstickGeometry& g = {});

// Tip-to-tip distance 2 l sin(opening / 2).
double tip_separation(double opening, const ChopstickGeometry& g = {});
// Inverse of tip_separation; throws ObjectTooWide beyond max_opening.
double opening_for_separation(double separation, const ChopstickGeometry& g = {});
// Unit vector from the lower tip to the upper tip, in the lower-tip frame.
Vec3 tip_direction_local(double opening, const ChopstickGeometry& g = {});
// Upper tip in the lower-tip frame.
Vec3 upper_tip_local(double opening, const ChopstickGeometry& g = {});
// Orientation of the upper stick relative to the lower-tip frame.
UnitQuaternion upper_rotation_local(double opening, const ChopstickGeometry& g = {});

}  // namespace chopsticks
