#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chopsticks/grasp.hpp"
#include "chopsticks/grip_bo.hpp"
#include "chopsticks/reward.hpp"
#include "chopsticks/trajectory.hpp"

namespace chopsticks {

// ---------------------------------------------------------------------------
// Tunable constants, loadable from a JSON file. Missing keys keep defaults.
//
// {
//   "reward":  {"hand", "chop_position", "chop_angle", "object_position",
//               "object_angle", "contact"},
//   "grasp":   {"grid_size", "top_n", "center_weight", "alignment_weight",
//               "swarms", "particles", "iterations"},
//   "plan":    {"speed", "angular_speed", "barrier", "barrier_weight",
//               "closing_ramp", "release_ramp", "approach_margin", "starts"},
//   "throw":   {"release_height", "flight_time", "max_speed"},
//   "grip":    {"iterations", "residual_tolerance", "penetration_tolerance"},
//   "workspace": {"center": [x,y,z], "half_extents": [x,y,z]}
// }
struct Config {
  RewardWeights reward;
  QualityWeights quality;
  int grid_size = 2000;
  int top_n = 10;
  PsoOptions pso;
  PlanOptions plan;
  ThrowOptions throw_options;
  int grip_iterations = 10;
  GripIkOptions grip_ik;
  Workspace workspace;
};

Config parse_config(const nlohmann::json& j);
Config load_config(const std::filesystem::path& file);

// ---------------------------------------------------------------------------
// Grip pose files ("grip-pose/1", JSON).

nlohmann::json grip_pose_to_json(const GripPose& pose, const HandModel& model,
                                 std::optional<double> score = std::nullopt);
GripPose grip_pose_from_json(const nlohmann::json& j, const HandModel& model);
void save_grip_pose(const std::filesystem::path& file, const GripPose& pose,
                    const HandModel& model, std::optional<double> score = std::nullopt);
GripPose load_grip_pose(const std::filesystem::path& file, const HandModel& model);

// ---------------------------------------------------------------------------
// Scenes and tasks ("scene/1", "task/1", JSON).

struct SceneSpec {
  double table_height = 0.0;
  Workspace workspace;
  std::vector<RigidObject> objects;

  const RigidObject* find(const std::string& id) const;
};

struct TaskItem {
  std::string object_id;
  TaskMode mode = TaskMode::move;
  RigidTransform goal;          // move
  Vec3 target = Vec3::Zero();   // throw
};

struct TaskSpec {
  std::vector<TaskItem> items;
  double noise_sigma = 0.0;  // m, added to the grasp position
};

SceneSpec parse_scene(std::string_view text);
SceneSpec load_scene(const std::filesystem::path& file);
std::string scene_to_string(const SceneSpec& s);
TaskSpec parse_task(std::string_view text, const SceneSpec& scene);
TaskSpec load_task(const std::filesystem::path& file, const SceneSpec& scene);
std::string task_to_string(const TaskSpec& t);

struct Diagnostic {
  enum class Level { warning, error };
  Level level = Level::warning;
  std::string message;
};

// Size-range and workspace warnings; duplicate ids, overlaps and objects
// below the table are errors.
std::vector<Diagnostic> validate_scene(const SceneSpec& scene);
bool has_errors(const std::vector<Diagnostic>& d);

// Eight objects resting on the table with random goals, all inside the
// workspace.
std::pair<SceneSpec, TaskSpec> demo_scene(std::uint64_t seed);

// ---------------------------------------------------------------------------
// End-to-end run.

// Where the hand starts: palm down in front of the shoulder.
RigidTransform home_hand_root();

// Hand joints tracking the contacts of `grip` along a planned trajectory;
// returns the "simulated" frames whose contact gaps are the tracking
// residuals.
std::vector<TrajectoryFrame> track_trajectory(const TaskTrajectory& ref, const GripPose& grip,
                                              const HandModel& model);

struct PhaseReport {
  Phase phase;
  int first_frame = 0;
  int frames = 0;
  double duration = 0.0;
  double path_length = 0.0;
};

struct ObjectReport {
  std::string object_id;
  std::string label;  // "plan", "noisy" or "replan"
  TaskMode mode = TaskMode::move;
  bool ok = false;
  std::string error;
  ChopstickConfig grasp;
  double quality = 0.0, continuity = 0.0, total = 0.0;
  int grasp_batches = 0;
  Vec3 noise = Vec3::Zero();
  std::vector<PhaseReport> phases;
  TrajectoryScore score;
  std::string trajectory_file, sim_file;
  double plan_seconds = 0.0;
};

struct PipelineOptions {
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "out";
  bool timings = false;
  std::optional<double> grip_score;  // recorded in the report when known
};

struct PipelineReport {
  std::string hand;
  GrippingStyle style;
  std::optional<double> grip_score;
  std::vector<ObjectReport> objects;
  bool ok = true;
};

// Plans every task item in order, writing <index>-<id>.traj and
// <index>-<id>.sim.traj (plus .replan variants under noise) and
// report.json into out_dir. Planner failures are recorded and the run
// continues with the next object.
PipelineReport run_pipeline(const SceneSpec& scene, const TaskSpec& task, const HandModel& model,
                            const GripPose& grip, const Config& config,
                            const PipelineOptions& options);

nlohmann::ordered_json report_to_json(const PipelineReport& r, bool timings);

}  // namespace chopsticks
