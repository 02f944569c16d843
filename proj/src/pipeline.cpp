#include "chopsticks/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <limits>

#include "chopsticks/arm_ik.hpp"
#include "chopsticks/errors.hpp"
#include "chopsticks/json_util.hpp"
#include "chopsticks/rng.hpp"
#include "chopsticks/trajectory_io.hpp"

namespace chopsticks {

using nlohmann::ordered_json;

RigidTransform home_hand_root() { return {Vec3(-0.02, -0.12, 0.30), UnitQuaternion()}; }

std::vector<TrajectoryFrame> track_trajectory(const TaskTrajectory& ref, const GripPose& grip,
                                              const HandModel& model) {
  if (grip.q.size() != model.dof_count())
    throw DimensionMismatch("grip pose does not match the hand model");
  // The hand joints only see the sticks relative to the palm, which the
  // planner keeps fixed; the opening is the one thing that moves them.
  const RigidTransform palm = forward_kinematics(model, grip.q).bodies[model.hand_root()];
  const RigidTransform lower = palm * grip.chopsticks_in_palm();
  const std::vector<int> contacting = grip.style.contacting_fingers();
  const LbfgsOptions solver{100, 1e-9, 10};

  TaskTrajectory sim = ref;
  JointAngles q = grip.q;
  for (TrajectoryFrame& f : sim.frames) {
    const ChopstickPair pair = chopstick_pair({lower.position, lower.orientation, f.chop.opening});
    const GripPose tracked = track_contacts(q, grip, model, pair, {}, solver);
    if (tracked.q.allFinite()) q = tracked.q;
    JointAngles full = q;
    if (f.q.size() == full.size()) set_arm_angles(model, arm_angles(model, f.q), full);
    f.q = full;
    f.contact_gaps.assign(model.finger_count(), 0.0);
    for (size_t j = 0; j < contacting.size() && j < tracked.residuals.size(); ++j)
      f.contact_gaps[contacting[j]] = tracked.residuals[j];
  }
  fill_velocities(sim);
  return std::move(sim.frames);
}

namespace {

// Samples along the straight approach that must be reachable.
constexpr int kApproachChecks = 20;

std::string file_stem(size_t index, const std::string& id) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02zu-", index + 1);
  return buf + id;
}

// Objects the starting sticks already touch, such as the one just set down,
// are not obstacles for the next approach.
Environment clear_of_start(const Environment& env, const ChopstickConfig& start,
                           const ChopstickGeometry& g) {
  const ChopstickPair pair = chopstick_pair(start, g);
  Environment out;
  out.table_height = env.table_height;
  for (const RigidObject& o : env.objects) {
    Environment single;
    single.table_height = -std::numeric_limits<double>::infinity();
    single.objects.push_back(o);
    if (chopsticks_clearance(pair, single, g) >= 0.0) out.objects.push_back(o);
  }
  return out;
}

std::vector<PhaseReport> phase_reports(const TaskPlan& plan) {
  std::vector<PhaseReport> out;
  const int total = static_cast<int>(plan.trajectory.frames.size());
  for (size_t i = 0; i < plan.phases.size(); ++i) {
    PhaseReport r;
    r.phase = plan.phases[i].phase;
    r.first_frame = plan.phase_first_frame[i];
    const int next = i + 1 < plan.phases.size() ? plan.phase_first_frame[i + 1] : total;
    r.frames = next - r.first_frame;
    r.duration = plan.phases[i].duration();
    r.path_length = arc_length(plan.phases[i]);
    out.push_back(r);
  }
  return out;
}

}  // namespace

PipelineReport run_pipeline(const SceneSpec& scene, const TaskSpec& task, const HandModel& model,
                            const GripPose& grip, const Config& config,
                            const PipelineOptions& options) {
  PipelineReport report;
  report.hand = model.name;
  report.style = grip.style;
  report.grip_score = options.grip_score;

  ThrowOptions throw_options = config.throw_options;
  throw_options.workspace = scene.workspace;
  throw_options.table_height = scene.table_height;
  const ChopstickGeometry& g = config.plan.geometry;

  std::vector<RigidObject> objects = scene.objects;
  const RigidTransform start_frame = home_hand_root() * grip.chopsticks_in_palm();
  ChopstickConfig current{start_frame.position, start_frame.orientation, 0.0};
  double swivel = 0.0;
  try {
    swivel = arm_ik(home_hand_root(), model).swivel;
  } catch (const Unreachable&) {
  }

  for (size_t idx = 0; idx < task.items.size(); ++idx) {
    const TaskItem& item = task.items[idx];
    size_t oi = 0;
    while (oi < objects.size() && objects[oi].id != item.object_id) ++oi;
    if (oi == objects.size())
      throw FormatError("task refers to unknown object \"" + item.object_id + "\"");
    const RigidObject& object = objects[oi];

    Environment env;
    env.table_height = scene.table_height;
    for (size_t k = 0; k < objects.size(); ++k)
      if (k != oi) env.objects.push_back(objects[k]);

    RankOptions rank;
    rank.grid_size = config.grid_size;
    rank.top_n = config.top_n;
    rank.pso = config.pso;
    rank.pso.seed = derive_seed(options.seed, "pso", idx);
    rank.pso.grid_size = config.grid_size;
    rank.weights = config.quality;
    rank.reach.workspace = scene.workspace;
    rank.reach.swivel_hint = swivel;
    rank.environment = env;
    rank.geometry = g;
    // The arm must follow the straight approach from the current sticks,
    // and for moves also hold the grasp at the goal.
    rank.accept = [&](const ChopstickConfig& c, const ArmIkSolution& arm) {
      const PhasePlan straight = make_phase(Phase::approach, current, c, config.plan);
      ReachOptions along = rank.reach;
      along.workspace.half_extents = Vec3::Constant(1e9);
      for (int k = 1; k < kApproachChecks; ++k) {
        const auto a = reach(straight.at(static_cast<double>(k) / kApproachChecks), grip, model, along, g);
        if (!a) return false;
        along.swivel_hint = a->swivel;
      }
      if (item.mode != TaskMode::move) return true;
      ReachOptions at_goal = rank.reach;
      at_goal.swivel_hint = arm.swivel;
      return reach(transported_grasp(c, object.pose, item.goal, g), grip, model, at_goal, g)
          .has_value();
    };

    PlanOptions plan_options = config.plan;
    plan_options.seed = derive_seed(options.seed, "plan", idx);

    std::vector<std::string> labels;
    if (task.noise_sigma > 0.0) labels = {"noisy", "replan"};
    else labels = {"plan"};

    std::optional<RankResult> ranked;
    std::string rank_error;
    double rank_seconds = 0.0;
    {
      const auto t0 = std::chrono::steady_clock::now();
      try {
        ranked = rank_grasps(object, grip, model, current.orientation, rank);
      } catch (const std::exception& e) {
        ranked.reset();
        rank_error = e.what();
      }
      rank_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }

    std::optional<TaskPlan> final_plan;
    for (const std::string& label : labels) {
      ObjectReport r;
      r.object_id = item.object_id;
      r.label = label;
      r.mode = item.mode;
      const auto t0 = std::chrono::steady_clock::now();
      if (!ranked) {
        r.error = rank_error;
      } else {
        const GraspCandidate& best = ranked->best;
        r.grasp = best.config;
        r.quality = best.quality;
        r.continuity = best.continuity;
        r.total = best.total;
        r.grasp_batches = ranked->batches;
        if (label == "noisy") {
          Rng rng(options.seed, "noise", idx);
          for (int k = 0; k < 3; ++k) r.noise[k] = task.noise_sigma * rng.normal();
          r.grasp.position += r.noise;
        }
        try {
          TaskRequest req;
          req.object = object;
          req.start = current;
          req.grasp = r.grasp;
          req.mode = item.mode;
          req.goal = item.goal;
          req.target = item.target;
          req.grip = grip;
          req.environment = clear_of_start(env, current, g);
          req.swivel_hint = best.arm ? best.arm->swivel : swivel;
          TaskPlan plan = assemble_task(req, model, plan_options, throw_options);
          plan.trajectory.object_id = object.id;
          const std::vector<TrajectoryFrame> sim_frames =
              track_trajectory(plan.trajectory, grip, model);
          // The reference carries the finger motion that realizes the
          // planned opening.
          for (size_t k = 0; k < sim_frames.size(); ++k) {
            plan.trajectory.frames[k].q = sim_frames[k].q;
            plan.trajectory.frames[k].qdot = sim_frames[k].qdot;
          }
          r.score = score_trajectory(sim_frames, plan.trajectory, grip.style, config.reward);
          r.phases = phase_reports(plan);

          const std::string stem =
              file_stem(idx, object.id) + (label == "replan" ? ".replan" : "");
          r.trajectory_file = stem + ".traj";
          r.sim_file = stem + ".sim.traj";
          TaskTrajectory sim = plan.trajectory;
          sim.frames = sim_frames;
          save_trajectory(options.out_dir / r.trajectory_file, plan.trajectory);
          save_trajectory(options.out_dir / r.sim_file, sim);
          r.ok = true;
          final_plan = std::move(plan);
        } catch (const std::runtime_error& e) {
          r.error = e.what();
          final_plan.reset();
        }
      }
      r.plan_seconds =
          rank_seconds + std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      report.objects.push_back(std::move(r));
    }

    if (!report.objects.back().ok) {
      report.ok = false;
      continue;
    }
    const TrajectoryFrame& last = final_plan->trajectory.frames.back();
    current = last.chop;
    swivel = last.swivel;
    RigidObject& moved = objects[oi];
    moved.pose = last.object.pose;
    moved.velocity = Vec3::Zero();
    moved.angular_velocity = Vec3::Zero();
  }

  std::filesystem::create_directories(options.out_dir);
  detail::write_text_file(options.out_dir / "report.json",
                          report_to_json(report, options.timings).dump(2) + "\n");
  return report;
}

ordered_json report_to_json(const PipelineReport& r, bool timings) {
  ordered_json j;
  j["format"] = "report/1";
  j["hand"] = r.hand;
  j["style"] = format_style(r.style);
  if (r.grip_score) j["grip_score"] = *r.grip_score;
  j["ok"] = r.ok;
  ordered_json objs = ordered_json::array();
  for (const ObjectReport& o : r.objects) {
    ordered_json e;
    e["object"] = o.object_id;
    e["label"] = o.label;
    e["mode"] = o.mode == TaskMode::move ? "move" : "throw";
    e["ok"] = o.ok;
    if (!o.ok) {
      e["error"] = o.error;
      objs.push_back(e);
      continue;
    }
    e["grasp"] = {{"position", detail::to_json(o.grasp.position)},
                  {"orientation", detail::to_json(o.grasp.orientation)},
                  {"opening", o.grasp.opening}};
    e["quality"] = o.quality;
    e["continuity"] = o.continuity;
    e["total"] = o.total;
    e["grasp_batches"] = o.grasp_batches;
    if (o.label == "noisy") e["noise"] = detail::to_json(o.noise);
    ordered_json phases = ordered_json::array();
    for (const PhaseReport& p : o.phases)
      phases.push_back({{"phase", std::string(phase_name(p.phase))},
                        {"first_frame", p.first_frame},
                        {"frames", p.frames},
                        {"duration", p.duration},
                        {"path_length", p.path_length}});
    e["phases"] = phases;
    e["score"] = {{"total", o.score.average},
                  {"hand", o.score.mean_terms.hand},
                  {"chop", o.score.mean_terms.chop},
                  {"object", o.score.mean_terms.object},
                  {"contact", o.score.mean_terms.contact}};
    e["trajectory"] = o.trajectory_file;
    e["sim"] = o.sim_file;
    if (timings) e["plan_seconds"] = o.plan_seconds;
    objs.push_back(e);
  }
  j["objects"] = objs;
  return j;
}

}  // namespace chopsticks
