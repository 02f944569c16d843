#pragma once

#include <vector>

#include <Eigen/Core>

#include "chopsticks/frames.hpp"

namespace chopsticks {

struct RewardBreakdown {
  double hand = 0.0;
  double chop = 0.0;
  double object = 0.0;
  double contact = 0.0;
  double total = 1.0;  // exp(hand + chop + object + contact)
};

struct RewardWeights {
  double hand = 10.0;
  double chop_position = 40.0;
  double chop_angle = 10.0;
  double object_position = 40.0;
  double object_angle = 10.0;
  double contact = 10.0;
};

// Tracking reward of a simulated frame against its reference. The object
// term is skipped when the reference carries no object; the contact term
// sums the simulated fingertip gaps of the fingers the style uses.
RewardBreakdown reward(const TrajectoryFrame& sim, const TrajectoryFrame& ref,
                       const GrippingStyle& style, const RewardWeights& w = {});

struct TrajectoryScore {
  double average = 0.0;
  RewardBreakdown mean_terms;  // per-term averages (total = average)
  std::vector<double> per_frame;
};

// Mean per-frame reward; throws DimensionMismatch on unequal lengths.
TrajectoryScore score_trajectory(const std::vector<TrajectoryFrame>& sim, const TaskTrajectory& ref,
                                 const GrippingStyle& style, const RewardWeights& w = {});

inline constexpr int kLookaheadFrames = 6;
inline constexpr double kLookaheadStep = 0.05;

// Controller observation: current simulated hand, stick and object state,
// object type, fingertip gaps and contact forces, then six reference frames
// 0.05 s apart (hand state, 7-DoF chopsticks state and rates, object
// state). Positions and orientations of sticks and objects are expressed in
// the simulated palm frame; reference frames past the end repeat the last
// one.
Eigen::VectorXd assemble_state(const TrajectoryFrame& sim, const TaskTrajectory& ref,
                               double t);

// 2n + 26 + 13 + 6 + 2N + 2 + 6 (2n + 15 + 13) for n DoFs and N fingers.
int state_dimension(int dof_count, int finger_count);

}  // namespace chopsticks
