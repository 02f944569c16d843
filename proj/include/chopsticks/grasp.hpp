#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "chopsticks/arm_ik.hpp"
#include "chopsticks/chopsticks.hpp"
#include "chopsticks/grip_ik.hpp"
#include "chopsticks/objects.hpp"

namespace chopsticks {

struct Workspace {
  Vec3 center = Vec3(0.0, 0.0, 0.125);
  Vec3 half_extents = Vec3(0.25, 0.25, 0.125);

  bool contains(const Vec3& p) const {
    return ((p - center).cwiseAbs() - half_extents).maxCoeff() <= 0.0;
  }
};

struct QualityWeights {
  double center = 100.0;   // per metre of midpoint offset
  double alignment = 5.0;  // per unit of (1 - |n . d|) summed over both contacts
};

struct GraspCandidate {
  ChopstickConfig config;
  int grid_index = -1;
  double quality = 0.0;
  double reachable = 0.0;
  double continuity = 1.0;
  double total = 0.0;
  std::optional<ArmIkSolution> arm;
};

// Euler-angle grid of N orientations o = Rz(yaw) Ry(tilt) Rz(roll): yaw over
// [-pi, pi), tilt of the sticks from vertical over [15, 75] degrees, roll
// about the stick over [-pi/2, pi/2). N = 2000 gives 20 x 10 x 10; N = 1 the
// identity. Other N factor as (N / k^2) x k x k with the largest k whose
// square divides N and k^3 <= N / 2 (k = 1 degenerates to a yaw sweep).
std::vector<UnitQuaternion> discretize_orientations(int n);

struct EulerRanges {
  double yaw_lo, yaw_hi, tilt_lo, tilt_hi, roll_lo, roll_hi;
};
EulerRanges orientation_ranges();
UnitQuaternion euler_orientation(double yaw, double tilt, double roll);

// Places the sticks so the tip line passes through the object center with
// its midpoint there, and opens them to the object's width along the tip
// line. Throws ObjectTooWide.
ChopstickConfig complete_config(const UnitQuaternion& orientation, const RigidObject& object,
                                const ChopstickGeometry& g = {});

double grasp_quality(const ChopstickConfig& config, const RigidObject& object,
                     const QualityWeights& w = {}, const ChopstickGeometry& g = {});

// complete_config followed by grasp_quality; 0 when the object is too wide.
double orientation_quality(const UnitQuaternion& o, const RigidObject& object,
                           const QualityWeights& w = {}, const ChopstickGeometry& g = {});

struct PsoOptions {
  int swarms = 10;
  int particles = 20;
  int iterations = 50;
  double inertia = 0.72;
  double cognitive = 1.49;
  double social = 1.49;
  std::uint64_t seed = 0;
  int grid_size = 2000;
};

struct PsoResult {
  UnitQuaternion refined;   // swarm best before snapping
  double refined_quality = 0.0;
  int grid_index = -1;      // nearest grid orientation
  ChopstickConfig config;   // at the snapped orientation (opening 0 if too wide)
  double quality = 0.0;     // at the snapped orientation
};

std::vector<PsoResult> pso_refine(const RigidObject& object, const PsoOptions& options = {},
                                  const QualityWeights& w = {}, const ChopstickGeometry& g = {});

int nearest_orientation(const std::vector<UnitQuaternion>& grid, const UnitQuaternion& o);

double continuity_score(const UnitQuaternion& candidate, const UnitQuaternion& current);

// Static obstacles besides the grasped object.
struct Environment {
  double table_height = 0.0;
  std::vector<RigidObject> objects;
};

// Smallest clearance between either stick and the table or any object.
double chopsticks_clearance(const ChopstickPair& pair, const Environment& env,
                            const ChopstickGeometry& g = {});

// Hand-root transform that puts the chopsticks at `config` for this grip.
RigidTransform hand_root_for(const ChopstickConfig& config, const GripPose& grip);

struct ReachOptions {
  Workspace workspace;
  double swivel_hint = 0.0;
};

// IK-based reachability: the tip midpoint must lie in the workspace and
// the arm must reach the implied hand-root transform within joint limits.
std::optional<ArmIkSolution> reach(const ChopstickConfig& config, const GripPose& grip,
                                   const HandModel& model, const ReachOptions& options = {},
                                   const ChopstickGeometry& g = {});

struct RankOptions {
  int grid_size = 2000;
  int top_n = 10;
  PsoOptions pso;
  QualityWeights weights;
  ReachOptions reach;
  Environment environment;  // excluding the object being grasped
  ChopstickGeometry geometry;
  // Extra condition on reachable candidates (for example, that the arm can
  // also hold the grasp at the object's goal). Rejected ones count as
  // unreachable.
  std::function<bool(const ChopstickConfig&, const ArmIkSolution&)> accept;
};

struct RankResult {
  std::vector<GraspCandidate> ranked;  // total score non-increasing
  GraspCandidate best;
  int batches = 1;  // quality batches examined before a reachable one
};

// Orders candidates by quality (near-ties within 1e-9 broken by continuity,
// then grid index) and returns the top `top_n` indices.
std::vector<int> top_by_quality(const std::vector<double>& quality,
                                const std::vector<double>& continuity, int top_n, int skip = 0);

// Stable ordering by total score, ties by grid index.
void sort_by_total(std::vector<GraspCandidate>& c);

RankResult rank_grasps(const RigidObject& object, const GripPose& grip, const HandModel& model,
                       const UnitQuaternion& current, const RankOptions& options = {});

}  // namespace chopsticks

#include "chopsticks/kernels.hpp"

namespace chopsticks {

// orientation_quality over a whole grid.
std::vector<double> score_orientations(const std::vector<UnitQuaternion>& grid,
                                       const RigidObject& object, const QualityWeights& w,
                                       const ChopstickGeometry& g, Exec exec);

// 1 where reach() succeeds, 0 otherwise.
std::vector<unsigned char> reachable_mask(const std::vector<ChopstickConfig>& configs,
                                          const GripPose& grip, const HandModel& model,
                                          const ReachOptions& options,
                                          const ChopstickGeometry& g, Exec exec);

}  // namespace chopsticks
