#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "chopsticks/gp.hpp"
#include "chopsticks/grip_ik.hpp"
#include "chopsticks/kernels.hpp"
#include "chopsticks/reward.hpp"

namespace chopsticks {

struct ManeuverSegment {
  std::string name;
  RigidTransform hand_root;  // world pose the hand points in
};

/// Open-close maneuvers: each segment holds a pointing direction while the
/// opening follows max_opening (1 - cos 2 pi t) / 2 over one period.
struct ManeuverSpec {
  std::vector<ManeuverSegment> segments;
  double segment_duration = 1.0;
  double dt = 0.01;
  double max_opening = 0.15;

  double opening(double t_in_segment) const;
  int steps_per_segment() const;
};

// Forward, 30 degrees left and 30 degrees down from a palm-down pose in
// front of the shoulder.
ManeuverSpec default_maneuvers();

struct KinematicEvalOptions {
  RewardWeights weights;
  double divergence_residual = 0.005;
  LbfgsOptions solver{100, 1e-9, 10};
};

// Mean per-step reward of tracking the maneuvers while keeping the pose's
// contacts. Steps after a divergence (or after an unreachable segment)
// score 0.
double evaluate_grip_kinematic(const GripPose& pose, const HandModel& model,
                               const ManeuverSpec& maneuvers = default_maneuvers(),
                               const KinematicEvalOptions& options = {});

using GripEvaluator = std::function<double(const GripPose&)>;

GripEvaluator kinematic_evaluator(const HandModel& model,
                                  ManeuverSpec maneuvers = default_maneuvers(),
                                  KinematicEvalOptions options = {});

// Same style and anchors, hand joints at their rest values.
GripPose tpose_grip(const GripPose& pose, const HandModel& model);

// ---------------------------------------------------------------------------
// GP-UCB over [0,1]^d.

struct BoOptions {
  int max_iterations = 10;
  std::uint64_t seed = 0;
  int random_candidates = 2000;
  int local_starts = 5;
  Exec exec = Exec::parallel;
};

struct BoIteration {
  int iteration = 0;  // 1-based
  Eigen::VectorXd x;
  double score = 0.0;
  bool feasible = true;
  double best_score = 0.0;
};

struct BoResult {
  Eigen::VectorXd best_x;
  double best_score = 0.0;
  int best_iteration = 0;
  std::vector<BoIteration> history;
};

// An objective returns nullopt for infeasible inputs; those are recorded
// with score 0 and never become the incumbent.
using BoObjective = std::function<std::optional<double>(const Eigen::VectorXd&)>;

// The first proposal is the center of the box. Throws NoFeasibleGrip when
// every evaluation is infeasible.
BoResult bo_maximize(const BoObjective& f, int dim, const BoOptions& options = {});

// Uniform random search with the same budget, for comparison.
BoResult random_search(const BoObjective& f, int dim, int evaluations, std::uint64_t seed);

// Sum of three Gaussian bumps on [0,1]^2 with its global maximum away from
// the center.
double synthetic_objective(const Eigen::VectorXd& x);

// Next proposal: maximizes the UCB acquisition by seeded random sampling
// followed by pattern search from the best samples.
Eigen::VectorXd propose_next(const GaussianProcess& gp, int dim, double beta,
                             std::uint64_t seed, int iteration, const BoOptions& options);

struct GripOptimization {
  GripPose pose;
  double score = 0.0;
  BoResult trace;
};

GripOptimization optimize_grip(const GrippingStyle& style, const HandModel& model,
                               const BoOptions& options = {},
                               const GripEvaluator& evaluator = {});

// "iter=3 x=0.5,0.41 score=0.62 feasible=1 best=0.71"
std::string format_iteration(const BoIteration& it);

}  // namespace chopsticks
