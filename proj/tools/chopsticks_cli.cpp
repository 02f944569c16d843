// Command-line front end. Every global option can also be set through a
// CHOPSTICKS_<NAME> environment variable (CHOPSTICKS_SEED, CHOPSTICKS_HAND,
// CHOPSTICKS_CONFIG, CHOPSTICKS_OUT_DIR).

#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "chopsticks/errors.hpp"
#include "chopsticks/json_util.hpp"
#include "chopsticks/pipeline.hpp"
#include "chopsticks/rng.hpp"
#include "chopsticks/trajectory_io.hpp"

using namespace chopsticks;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  std::string hand = "standard";
  std::string config;
  std::string out_dir = "out";
};

// How the grip is chosen by commands that need one.
struct GripChoice {
  std::string style = "1,1,1,2,0";
  std::string contacts;
  std::string pose_file;
  bool optimize = false;
  int iterations = 0;  // 0: from the config
};

void add_grip_options(CLI::App* cmd, GripChoice& g) {
  cmd->add_option("--style", g.style, "Gripping style, thumb first (1 upper, 2 lower, 0 none)");
  cmd->add_option("--contacts", g.contacts, "Contact locations in [0,1], comma separated");
  cmd->add_option("--pose", g.pose_file, "Grip pose file from 'grip ik' or 'grip optimize'");
  cmd->add_flag("--optimize", g.optimize, "Optimize the contact locations first");
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("bad number '") + item + "' in " + what);
    }
  }
  return out;
}

Vec3 parse_point(const std::string& text, const char* what) {
  const std::vector<double> v = parse_list(text, what);
  if (v.size() != 3) throw std::invalid_argument(std::string(what) + " needs three values");
  return Vec3(v[0], v[1], v[2]);
}

Config load_globals_config(const Globals& g) {
  return g.config.empty() ? Config{} : load_config(g.config);
}

void print_pose(const GripPose& p) {
  std::printf("style %s\n", format_style(p.style).c_str());
  std::printf("contacts");
  for (double x : p.contacts.x) std::printf(" %.4f", x);
  std::printf("\nresiduals");
  for (double r : p.residuals) std::printf(" %.3e", r);
  std::printf("\nmax_penetration %.3e\niterations %d\n", p.max_penetration, p.iterations);
}

struct ResolvedGrip {
  GripPose pose;
  std::optional<double> score;
};

ResolvedGrip resolve_grip(const GripChoice& choice, const HandModel& model, const Config& config,
                          std::uint64_t seed) {
  if (!choice.pose_file.empty()) {
    ResolvedGrip r{load_grip_pose(choice.pose_file, model), std::nullopt};
    const nlohmann::json j = detail::read_json_file(choice.pose_file);
    if (j.contains("score")) r.score = j.at("score").get<double>();
    return r;
  }
  const GrippingStyle style = parse_style(choice.style);
  if (style.finger_count() != model.finger_count())
    throw DimensionMismatch("style has " + std::to_string(style.finger_count()) +
                            " fingers, hand '" + model.name + "' has " +
                            std::to_string(model.finger_count()));
  const StyleCheck check = is_valid_style(style);
  if (!check.valid) throw std::invalid_argument("invalid style: " + check.message);
  if (choice.optimize) {
    BoOptions bo;
    bo.seed = derive_seed(seed, "grip-bo");
    bo.max_iterations = choice.iterations > 0 ? choice.iterations : config.grip_iterations;
    const GripOptimization opt = optimize_grip(style, model, bo);
    for (const BoIteration& it : opt.trace.history) std::printf("%s\n", format_iteration(it).c_str());
    return {opt.pose, opt.score};
  }
  ContactProposal x{std::vector<double>(style.contact_count(), 0.5)};
  if (!choice.contacts.empty()) x.x = parse_list(choice.contacts, "--contacts");
  if (static_cast<int>(x.x.size()) != style.contact_count())
    throw DimensionMismatch("style needs " + std::to_string(style.contact_count()) +
                            " contact locations");
  return {solve_grip_ik(x, style, model, {}, config.grip_ik), std::nullopt};
}

int cmd_styles(const Globals& g, bool all, int fingers) {
  const int n = fingers > 0 ? fingers : resolve_hand(g.hand).finger_count();
  for (const GrippingStyle& s : all ? enumerate_all_styles(n) : enumerate_valid_styles(n)) {
    std::string line = format_style(s);
    if (all) {
      const StyleCheck c = is_valid_style(s);
      line += c.valid ? "  valid" : "  " + c.message;
    } else if (auto name = style_name(s)) {
      line += "  " + *name;
    }
    std::printf("%s\n", line.c_str());
  }
  return 0;
}

int cmd_grip(const Globals& g, const GripChoice& choice, const std::string& out) {
  const HandModel model = resolve_hand(g.hand);
  const Config config = load_globals_config(g);
  const ResolvedGrip r = resolve_grip(choice, model, config, g.seed);
  print_pose(r.pose);
  if (r.score) std::printf("score %.6f\n", *r.score);
  const std::filesystem::path file = out.empty() ? std::filesystem::path(g.out_dir) / "grip.json"
                                                 : std::filesystem::path(out);
  save_grip_pose(file, r.pose, model, r.score);
  std::printf("wrote %s\n", file.string().c_str());
  return 0;
}

int cmd_grasp_rank(const Globals& g, const GripChoice& choice, const std::string& scene_file,
                   const std::string& object_id) {
  const HandModel model = resolve_hand(g.hand);
  const Config config = load_globals_config(g);
  const SceneSpec scene = load_scene(scene_file);
  const RigidObject* object = scene.find(object_id);
  if (!object) throw std::invalid_argument("no object '" + object_id + "' in the scene");
  const GripPose grip = resolve_grip(choice, model, config, g.seed).pose;

  RankOptions rank;
  rank.grid_size = config.grid_size;
  rank.top_n = config.top_n;
  rank.pso = config.pso;
  rank.pso.seed = derive_seed(g.seed, "pso", 0);
  rank.weights = config.quality;
  rank.reach.workspace = scene.workspace;
  rank.environment.table_height = scene.table_height;
  for (const RigidObject& o : scene.objects)
    if (o.id != object_id) rank.environment.objects.push_back(o);
  const RigidTransform home = home_hand_root() * grip.chopsticks_in_palm();
  const RankResult r = rank_grasps(*object, grip, model, home.orientation, rank);
  std::printf("batches %d\n", r.batches);
  std::printf("%-6s %-10s %-10s %-10s %-10s %s\n", "grid", "quality", "reach", "continuity",
              "total", "tip position");
  for (const GraspCandidate& c : r.ranked)
    std::printf("%-6d %-10.6f %-10.0f %-10.6f %-10.6f %.4f %.4f %.4f\n", c.grid_index, c.quality,
                c.reachable, c.continuity, c.total, c.config.position.x(), c.config.position.y(),
                c.config.position.z());
  return 0;
}

int print_report(const PipelineReport& r) {
  for (const ObjectReport& o : r.objects) {
    if (o.ok)
      std::printf("%-12s %-6s ok     score %.6f  frames %d  -> %s\n", o.object_id.c_str(),
                  o.label.c_str(), o.score.average,
                  o.phases.empty() ? 0 : o.phases.back().first_frame + o.phases.back().frames,
                  o.trajectory_file.c_str());
    else
      std::printf("%-12s %-6s FAILED %s\n", o.object_id.c_str(), o.label.c_str(), o.error.c_str());
  }
  return r.ok ? 0 : 1;
}

int cmd_plan(const Globals& g, const GripChoice& choice, const std::string& scene_file,
             const std::string& task_file, bool timings, std::optional<double> noise) {
  const HandModel model = resolve_hand(g.hand);
  const Config config = load_globals_config(g);
  const SceneSpec scene = load_scene(scene_file);
  const std::vector<Diagnostic> diags = validate_scene(scene);
  for (const Diagnostic& d : diags)
    std::fprintf(stderr, "%s: %s\n", d.level == Diagnostic::Level::error ? "error" : "warning",
                 d.message.c_str());
  if (has_errors(diags)) return 1;
  TaskSpec task = load_task(task_file, scene);
  if (noise) {
    if (!(*noise >= 0.0)) throw std::invalid_argument("--noise must be >= 0");
    task.noise_sigma = *noise;
  }
  const ResolvedGrip grip = resolve_grip(choice, model, config, g.seed);
  PipelineOptions opt;
  opt.seed = g.seed;
  opt.out_dir = g.out_dir;
  opt.timings = timings;
  opt.grip_score = grip.score;
  const PipelineReport report = run_pipeline(scene, task, model, grip.pose, config, opt);
  const int code = print_report(report);
  std::printf("wrote %s\n", (std::filesystem::path(g.out_dir) / "report.json").string().c_str());
  return code;
}

int cmd_throw(const Globals& g, const GripChoice& choice, const std::string& scene_file,
              const std::string& object_id, const std::string& target) {
  const SceneSpec scene = load_scene(scene_file);
  if (!scene.find(object_id)) throw std::invalid_argument("no object '" + object_id + "' in the scene");
  TaskSpec task;
  TaskItem item;
  item.object_id = object_id;
  item.mode = TaskMode::throw_object;
  item.target = parse_point(target, "--target");
  task.items.push_back(item);

  const HandModel model = resolve_hand(g.hand);
  const Config config = load_globals_config(g);
  ThrowOptions t = config.throw_options;
  t.workspace = scene.workspace;
  t.table_height = scene.table_height;
  const Vec3 release = throw_release_point(item.target, t);
  const Vec3 v = throw_velocity(release, item.target, t);
  std::printf("release point %.4f %.4f %.4f\nrelease velocity %.4f %.4f %.4f\n", release.x(),
              release.y(), release.z(), v.x(), v.y(), v.z());

  const ResolvedGrip grip = resolve_grip(choice, model, config, g.seed);
  PipelineOptions opt;
  opt.seed = g.seed;
  opt.out_dir = g.out_dir;
  opt.grip_score = grip.score;
  return print_report(run_pipeline(scene, task, model, grip.pose, config, opt));
}

int cmd_score(const Globals& g, const std::string& ref_file, const std::string& sim_file,
              const std::string& style_text) {
  const Config config = load_globals_config(g);
  const TaskTrajectory ref = load_trajectory(ref_file);
  const TaskTrajectory sim = load_trajectory(sim_file);
  const GrippingStyle style = style_text.empty() ? ref.style : parse_style(style_text);
  const TrajectoryScore s = score_trajectory(sim.frames, ref, style, config.reward);
  std::printf("frames %zu\n", ref.frames.size());
  std::printf("hand %s\nchop %s\nobject %s\ncontact %s\ntotal %s\n",
              detail::shortest(s.mean_terms.hand).c_str(), detail::shortest(s.mean_terms.chop).c_str(),
              detail::shortest(s.mean_terms.object).c_str(),
              detail::shortest(s.mean_terms.contact).c_str(), detail::shortest(s.average).c_str());
  return 0;
}

int cmd_validate(const std::string& scene_file, const std::string& task_file) {
  const SceneSpec scene = load_scene(scene_file);
  const std::vector<Diagnostic> diags = validate_scene(scene);
  for (const Diagnostic& d : diags)
    std::printf("%s: %s\n", d.level == Diagnostic::Level::error ? "error" : "warning",
                d.message.c_str());
  if (!task_file.empty()) {
    const TaskSpec task = load_task(task_file, scene);
    std::printf("task: %zu items\n", task.items.size());
  }
  if (diags.empty()) std::printf("ok\n");
  return has_errors(diags) ? 1 : 0;
}

int cmd_demo(const Globals& g) {
  const auto [scene, task] = demo_scene(g.seed);
  const std::filesystem::path dir = g.out_dir;
  detail::write_text_file(dir / "scene.json", scene_to_string(scene));
  detail::write_text_file(dir / "task.json", task_to_string(task));
  std::printf("wrote %s and %s\n", (dir / "scene.json").string().c_str(),
              (dir / "task.json").string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chopsticks grasp-and-move planner for simulated hands"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "chopsticks 1.0");

  Globals g;
  app.add_option("--seed", g.seed, "Root seed for every random choice")
      ->envname("CHOPSTICKS_SEED")
      ->capture_default_str();
  app.add_option("--hand", g.hand, "Hand preset (standard, long-finger, large, tri-finger) or file")
      ->envname("CHOPSTICKS_HAND")
      ->capture_default_str();
  app.add_option("--config", g.config, "JSON file overriding weights and tolerances")
      ->envname("CHOPSTICKS_CONFIG");
  app.add_option("--out-dir", g.out_dir, "Directory for written files")
      ->envname("CHOPSTICKS_OUT_DIR")
      ->capture_default_str();
  app.fallthrough();

  GripChoice choice;
  std::function<int()> run;

  auto* styles = app.add_subcommand("styles", "Gripping styles for the hand");
  styles->require_subcommand(1);
  bool all_styles = false;
  auto* styles_list = styles->add_subcommand("list", "List valid styles");
  int fingers = 0;
  styles_list->add_flag("--all", all_styles, "List all 3^N tuples with the rejection reason");
  styles_list->add_option("--fingers", fingers, "Finger count (default: the hand's)")
      ->check(CLI::Range(2, 8));
  styles_list->callback([&] { run = [&] { return cmd_styles(g, all_styles, fingers); }; });

  auto* grip = app.add_subcommand("grip", "Solve or optimize a grip pose");
  grip->require_subcommand(1);
  std::string grip_out;
  auto* grip_ik = grip->add_subcommand("ik", "Grip IK for fixed contact locations");
  add_grip_options(grip_ik, choice);
  grip_ik->add_option("-o,--out,--output", grip_out, "Pose file (default <out-dir>/grip.json)");
  grip_ik->callback([&] { run = [&] { return cmd_grip(g, choice, grip_out); }; });
  auto* grip_opt = grip->add_subcommand("optimize", "Bayesian optimization of contact locations");
  grip_opt->add_option("--style", choice.style, "Gripping style");
  grip_opt->add_option("--iterations", choice.iterations, "Optimization iterations");
  grip_opt->add_option("-o,--out,--output", grip_out, "Pose file (default <out-dir>/grip.json)");
  grip_opt->callback([&] {
    choice.optimize = true;
    run = [&] { return cmd_grip(g, choice, grip_out); };
  });

  std::string scene_file, task_file, object_id, target, ref_file, sim_file, style_text;
  auto* grasp = app.add_subcommand("grasp", "Grasp candidates");
  grasp->require_subcommand(1);
  auto* rank = grasp->add_subcommand("rank", "Rank grasp configurations for one object");
  rank->add_option("--scene", scene_file, "Scene file")->required();
  rank->add_option("--object", object_id, "Object id")->required();
  add_grip_options(rank, choice);
  rank->callback([&] { run = [&] { return cmd_grasp_rank(g, choice, scene_file, object_id); }; });

  bool timings = false;
  std::optional<double> noise;
  auto* plan = app.add_subcommand("plan", "Plan every task item and write trajectories");
  plan->add_option("--scene", scene_file, "Scene file")->required();
  plan->add_option("--task", task_file, "Task file")->required();
  plan->add_option("--noise", noise, "Override the task's grasp-position noise sigma (m)");
  plan->add_flag("--timings", timings, "Record planning times in the report");
  add_grip_options(plan, choice);
  plan->callback([&] {
    run = [&] { return cmd_plan(g, choice, scene_file, task_file, timings, noise); };
  });

  auto* throw_plan = app.add_subcommand("throw-plan", "Plan a throw of one object to a target");
  throw_plan->add_option("--scene", scene_file, "Scene file")->required();
  throw_plan->add_option("--object", object_id, "Object id")->required();
  throw_plan->add_option("--target", target, "Landing point x,y,z")->required();
  add_grip_options(throw_plan, choice);
  throw_plan->callback([&] {
    run = [&] { return cmd_throw(g, choice, scene_file, object_id, target); };
  });

  auto* score = app.add_subcommand("score", "Tracking reward of a simulated trajectory");
  score->add_option("--ref", ref_file, "Reference trajectory")->required();
  score->add_option("--sim", sim_file, "Simulated trajectory")->required();
  score->add_option("--style", style_text, "Style (default: the reference's)");
  score->callback([&] { run = [&] { return cmd_score(g, ref_file, sim_file, style_text); }; });

  auto* validate = app.add_subcommand("validate", "Check a scene (and task) file");
  validate->add_option("--scene", scene_file, "Scene file")->required();
  validate->add_option("--task", task_file, "Task file");
  validate->callback([&] { run = [&] { return cmd_validate(scene_file, task_file); }; });

  auto* traj = app.add_subcommand("traj", "Trajectory file utilities");
  traj->require_subcommand(1);
  auto* csv = traj->add_subcommand("csv", "Print a trajectory as CSV");
  std::string traj_file;
  csv->add_option("file", traj_file, "Trajectory file")->required();
  csv->callback([&] {
    run = [&] {
      std::fputs(trajectory_csv(load_trajectory(traj_file)).c_str(), stdout);
      return 0;
    };
  });

  auto* demo = app.add_subcommand("demo", "Write the eight-object demo scene and task");
  demo->callback([&] { run = [&] { return cmd_demo(g); }; });

  auto* hand = app.add_subcommand("hand", "Hand morphology files");
  hand->require_subcommand(1);
  auto* hand_export = hand->add_subcommand("export", "Print the hand as a morphology file");
  hand_export->callback([&] {
    run = [&] {
      std::fputs(morphology_to_string(resolve_hand(g.hand)).c_str(), stdout);
      return 0;
    };
  });

  CLI11_PARSE(app, argc, argv);

  try {
    return run ? run() : 0;
  } catch (const std::exception& e) {
    std::fflush(stdout);
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
