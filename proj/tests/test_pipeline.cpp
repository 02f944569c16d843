#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "chopsticks/errors.hpp"
#include "chopsticks/pipeline.hpp"
#include "chopsticks/trajectory_io.hpp"
#include "support.hpp"

using namespace chopsticks;
using nlohmann::json;

namespace {

const HandModel& standard() {
  static const HandModel m = make_preset("standard");
  return m;
}

const GripPose& standard_grip() {
  static const GripPose p = solve_grip_ik({std::vector<double>(4, 0.5)}, parse_style("1,1,1,2,0"), standard());
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("chopsticks_pipeline_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

template <class F>
void expect_format_error(F&& f, const std::string& fragment) {
  try {
    f();
    ADD_FAILURE() << "expected FormatError containing '" << fragment << "'";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

SceneSpec one_sphere(double radius) {
  SceneSpec s;
  RigidObject o = make_sphere(radius);
  o.id = "ball";
  o.pose.position = Vec3(0.02, -0.06, radius);
  s.objects.push_back(o);
  return s;
}

// Two-object slice of the demo scene with a coarse grasp grid.
struct SmallRun {
  SceneSpec scene;
  TaskSpec task;
  Config config;

  SmallRun() {
    auto [s, t] = demo_scene(0);
    scene = s;
    scene.objects.resize(2);
    task.items.assign(t.items.begin(), t.items.begin() + 2);
    config.grid_size = 200;
  }

  PipelineReport run(const std::filesystem::path& out) const {
    PipelineOptions o;
    o.out_dir = out;
    o.seed = 4;
    return run_pipeline(scene, task, standard(), standard_grip(), config, o);
  }
};

}  // namespace

TEST(ConfigParse, DefaultsAndOverrides) {
  const Config d = parse_config(json::object());
  EXPECT_EQ(d.grid_size, 2000);
  EXPECT_EQ(d.top_n, 10);
  const Config c = parse_config(json::parse(
      R"({"grasp": {"grid_size": 50}, "plan": {"speed": 0.5},
          "workspace": {"center": [0, 0, 0.2]}})"));
  EXPECT_EQ(c.grid_size, 50);
  EXPECT_EQ(c.plan.speed, 0.5);
  EXPECT_EQ(c.workspace.center, Vec3(0, 0, 0.2));
  EXPECT_EQ(c.throw_options.workspace.center, Vec3(0, 0, 0.2));
}

TEST(ConfigParse, Errors) {
  expect_format_error([] { parse_config(json::array()); }, "JSON object");
  expect_format_error([] { parse_config(json::parse(R"({"grasp": {"top_n": "ten"}})")); }, "top_n");
  expect_format_error([] { parse_config(json::parse(R"({"plan": 3})")); }, "plan");
  expect_format_error([] { parse_config(json::parse(R"({"plan": {"speed": 0}})")); }, "positive");
  expect_format_error([] { parse_config(json::parse(R"({"grasp": {"grid_size": 0}})")); }, ">= 1");
}

TEST(SceneParse, RoundTripAndErrors) {
  const auto [scene, task] = demo_scene(7);
  const SceneSpec back = parse_scene(scene_to_string(scene));
  EXPECT_EQ(scene_to_string(back), scene_to_string(scene));
  const TaskSpec tb = parse_task(task_to_string(task), back);
  EXPECT_EQ(task_to_string(tb), task_to_string(task));

  expect_format_error([] { parse_scene("{"); }, "scene");
  expect_format_error([] { parse_scene(R"({"format": "scene/2", "objects": []})"); }, "scene/1");
  expect_format_error(
      [] { parse_scene(R"({"format": "scene/1", "objects": [{"id": "a", "shape": "cone"}]})"); },
      "scene.objects[0]");
  expect_format_error(
      [] {
        parse_scene(R"({"format": "scene/1", "objects": [{"id": "a", "shape": "sphere", "radius": -1}]})");
      },
      "radius");
}

TEST(TaskParse, Errors) {
  const SceneSpec s = one_sphere(0.008);
  expect_format_error([&] { parse_task(R"({"format": "task/1", "items": [{"object": "ball"}]})", s); },
                      "key 'goal' not found");
  expect_format_error(
      [&] {
        parse_task(R"({"format": "task/1", "items": [{"object": "cup", "mode": "throw", "target": [0, 0, 0]}]})",
                   s);
      },
      "no object \"cup\"");
  expect_format_error(
      [&] {
        parse_task(R"({"format": "task/1", "items": [{"object": "ball", "mode": "roll"}]})", s);
      },
      "task.items[0]");
  expect_format_error([&] { parse_task(R"({"format": "task/1", "items": [], "noise_sigma": -1})", s); },
                      "noise_sigma");
  const TaskSpec t = parse_task(
      R"({"format": "task/1", "items": [{"object": "ball", "mode": "throw", "target": [0.7, 0, 0]}]})", s);
  ASSERT_EQ(t.items.size(), 1u);
  EXPECT_EQ(t.items[0].mode, TaskMode::throw_object);
  EXPECT_EQ(t.items[0].target, Vec3(0.7, 0, 0));
}

TEST(ValidateScene, SizeWarningsAndOverlapErrors) {
  EXPECT_TRUE(validate_scene(one_sphere(0.008)).empty());

  const auto big = validate_scene(one_sphere(0.03));
  ASSERT_EQ(big.size(), 1u);
  EXPECT_EQ(big[0].level, Diagnostic::Level::warning);
  EXPECT_NE(big[0].message.find("tested range"), std::string::npos);
  EXPECT_FALSE(has_errors(big));

  SceneSpec boxes;
  for (int i = 0; i < 2; ++i) {
    RigidObject b = make_box(Vec3(0.015, 0.015, 0.015));
    b.id = "b" + std::to_string(i);
    b.pose.position = Vec3(0.005 * i, 0.0, 0.0075);
    boxes.objects.push_back(b);
  }
  const auto d = validate_scene(boxes);
  EXPECT_TRUE(has_errors(d));
  bool overlap = false;
  for (const Diagnostic& x : d) overlap = overlap || x.message.find("overlap") != std::string::npos;
  EXPECT_TRUE(overlap);

  boxes.objects[1].id = "b0";
  boxes.objects[1].pose.position.x() = 0.1;
  EXPECT_TRUE(has_errors(validate_scene(boxes)));
}

TEST(DemoScene, ValidAndDeterministic) {
  const auto [s, t] = demo_scene(3);
  EXPECT_EQ(s.objects.size(), 8u);
  EXPECT_EQ(t.items.size(), 8u);
  EXPECT_FALSE(has_errors(validate_scene(s)));
  for (const TaskItem& it : t.items) EXPECT_TRUE(s.workspace.contains(it.goal.position));
  EXPECT_EQ(scene_to_string(demo_scene(3).first), scene_to_string(s));
  EXPECT_NE(scene_to_string(demo_scene(4).first), scene_to_string(s));
}

TEST(GripPoseFile, RoundTripAndHashMismatch) {
  const GripPose& p = standard_grip();
  const json j = grip_pose_to_json(p, standard(), 0.25);
  EXPECT_EQ(j.at("score").get<double>(), 0.25);
  const GripPose back = grip_pose_from_json(j, standard());
  EXPECT_EQ(back.q, p.q);
  EXPECT_EQ(back.style.c, p.style.c);
  EXPECT_EQ(back.contacts.x, p.contacts.x);
  EXPECT_EQ(grip_pose_to_json(back, standard(), 0.25).dump(), j.dump());

  expect_format_error([&] { grip_pose_from_json(j, make_preset("large")); }, "different hand");
  json short_q = j;
  short_q.erase("morphology_hash");
  short_q["q"] = std::vector<double>(5, 0.0);
  EXPECT_THROW(grip_pose_from_json(short_q, standard()), DimensionMismatch);
  json wrong = j;
  wrong["format"] = "grip-pose/2";
  expect_format_error([&] { grip_pose_from_json(wrong, standard()); }, "grip-pose/1");
}

TEST(RunPipeline, EmptyTaskGivesAnEmptyReport) {
  const auto dir = scratch("empty");
  PipelineOptions o;
  o.out_dir = dir;
  const PipelineReport r =
      run_pipeline(one_sphere(0.008), TaskSpec{}, standard(), standard_grip(), Config{}, o);
  EXPECT_TRUE(r.ok);
  EXPECT_TRUE(r.objects.empty());
  const json j = json::parse(slurp(dir / "report.json"));
  EXPECT_EQ(j.at("format"), "report/1");
  EXPECT_TRUE(j.at("objects").empty());
  std::filesystem::remove_all(dir);
}

TEST(RunPipeline, ByteIdenticalAcrossRuns) {
  const SmallRun run;
  const auto a = scratch("a"), b = scratch("b");
  const PipelineReport ra = run.run(a);
  run.run(b);
  ASSERT_EQ(ra.objects.size(), 2u);
  for (const ObjectReport& o : ra.objects) {
    EXPECT_TRUE(o.ok) << o.object_id << ": " << o.error;
    EXPECT_EQ(o.label, "plan");
  }
  EXPECT_EQ(slurp(a / "report.json"), slurp(b / "report.json"));
  EXPECT_EQ(slurp(a / ra.objects[1].trajectory_file), slurp(b / ra.objects[1].trajectory_file));
  EXPECT_EQ(slurp(a / ra.objects[1].sim_file), slurp(b / ra.objects[1].sim_file));
  EXPECT_EQ(slurp(a / "report.json").find("plan_seconds"), std::string::npos);

  // The written trajectory ends with the object at its goal.
  const TaskTrajectory t = load_trajectory(a / ra.objects[0].trajectory_file);
  EXPECT_LT((t.frames.back().object.pose.position - run.task.items[0].goal.position).norm(), 1e-9);
  EXPECT_EQ(t.morphology_hash, standard().hash());

  // Scores recomputed from the written files match the report.
  for (const ObjectReport& o : ra.objects) {
    const TaskTrajectory ref = load_trajectory(a / o.trajectory_file);
    const TaskTrajectory sim = load_trajectory(a / o.sim_file);
    const double again = score_trajectory(sim.frames, ref, ref.style).average;
    EXPECT_NEAR(again, o.score.average, 1e-12);
    EXPECT_GT(again, 0.9) << o.object_id;
    EXPECT_LE(again, 1.0);
  }
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
}

TEST(RunPipeline, NoiseAddsNoisyAndReplanEntries) {
  SmallRun run;
  run.task.items.resize(1);
  run.task.noise_sigma = 0.002;
  const auto dir = scratch("noise");
  const PipelineReport r = run.run(dir);
  ASSERT_EQ(r.objects.size(), 2u);
  EXPECT_EQ(r.objects[0].label, "noisy");
  EXPECT_EQ(r.objects[1].label, "replan");
  EXPECT_GT(r.objects[0].noise.norm(), 0.0);
  EXPECT_EQ(r.objects[1].noise, Vec3::Zero());
  ASSERT_TRUE(r.objects[1].ok) << r.objects[1].error;
  EXPECT_NE(r.objects[1].trajectory_file.find(".replan."), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(dir / r.objects[1].trajectory_file));
  const json j = json::parse(slurp(dir / "report.json"));
  EXPECT_TRUE(j.at("objects")[0].contains("noise") || !r.objects[0].ok);
  EXPECT_FALSE(j.at("objects")[1].contains("noise"));
  std::filesystem::remove_all(dir);
}

TEST(RunPipeline, UnknownObjectIsAFormatError) {
  TaskSpec t;
  t.items.push_back({"ghost", TaskMode::move, {}, Vec3::Zero()});
  PipelineOptions o;
  o.out_dir = scratch("ghost");
  EXPECT_THROW(run_pipeline(one_sphere(0.008), t, standard(), standard_grip(), Config{}, o), FormatError);
  std::filesystem::remove_all(o.out_dir);
}
