#include <cmath>
#include <set>

#include "chopsticks/errors.hpp"
#include "chopsticks/json_util.hpp"
#include "chopsticks/pipeline.hpp"
#include "chopsticks/rng.hpp"

namespace chopsticks {

using nlohmann::json;

const RigidObject* SceneSpec::find(const std::string& id) const {
  for (const RigidObject& o : objects)
    if (o.id == id) return &o;
  return nullptr;
}

namespace {

// Wraps library exceptions with the JSON path of the offending entry.
template <class F>
auto at_path(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw FormatError(path + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(path + ": " + e.what());
  }
}

double positive(const json& j, const char* key, const std::string& path) {
  const double v = j.at(key).get<double>();
  if (!(v > 0.0) || !std::isfinite(v))
    throw FormatError(path + "." + key + ": must be positive");
  return v;
}

RigidObject object_from_json(const json& j, const std::string& path) {
  RigidObject o;
  o.id = j.at("id").get<std::string>();
  if (o.id.empty() || o.id.find_first_of(" \t\n/\\") != std::string::npos)
    throw FormatError(path + ".id: must be a non-empty word without slashes");
  o.shape = parse_shape(j.at("shape").get<std::string>());
  switch (o.shape) {
    case Shape::sphere:
      o.size = Vec3(positive(j, "radius", path), 0, 0);
      break;
    case Shape::capsule:
      o.size = Vec3(positive(j, "radius", path), positive(j, "length", path), 0);
      break;
    case Shape::box: {
      o.size = detail::vec3_from_json(j.at("sides"));
      if (!(o.size.minCoeff() > 0.0)) throw FormatError(path + ".sides: must be positive");
      break;
    }
  }
  if (j.contains("pose")) o.pose = detail::transform_from_json(j.at("pose"));
  return o;
}

json object_to_json(const RigidObject& o) {
  json j = json::object();
  j["id"] = o.id;
  j["shape"] = std::string(shape_name(o.shape));
  switch (o.shape) {
    case Shape::sphere:
      j["radius"] = o.size.x();
      break;
    case Shape::capsule:
      j["radius"] = o.size.x();
      j["length"] = o.size.y();
      break;
    case Shape::box:
      j["sides"] = detail::to_json(o.size);
      break;
  }
  j["pose"] = detail::to_json(o.pose);
  return j;
}

std::string mode_name(TaskMode m) { return m == TaskMode::move ? "move" : "throw"; }

}  // namespace

SceneSpec parse_scene(std::string_view text) {
  const json j = detail::parse_json(text, "scene");
  if (!j.is_object() || j.value("format", "") != "scene/1")
    throw FormatError("scene: expected an object with \"format\": \"scene/1\"");
  SceneSpec s;
  at_path("scene", [&] {
    s.table_height = j.value("table_height", 0.0);
    if (j.contains("workspace")) {
      const json& w = j.at("workspace");
      if (w.contains("center")) s.workspace.center = detail::vec3_from_json(w.at("center"));
      if (w.contains("half_extents"))
        s.workspace.half_extents = detail::vec3_from_json(w.at("half_extents"));
    }
  });
  const json& objs = at_path("scene", [&]() -> const json& { return j.at("objects"); });
  if (!objs.is_array()) throw FormatError("scene.objects: must be an array");
  for (size_t i = 0; i < objs.size(); ++i) {
    const std::string path = "scene.objects[" + std::to_string(i) + "]";
    s.objects.push_back(at_path(path, [&] { return object_from_json(objs[i], path); }));
  }
  return s;
}

SceneSpec load_scene(const std::filesystem::path& file) {
  try {
    return parse_scene(detail::read_text_file(file));
  } catch (const FormatError& e) {
    throw FormatError(file.string() + ": " + e.what());
  }
}

std::string scene_to_string(const SceneSpec& s) {
  json j = json::object();
  j["format"] = "scene/1";
  j["table_height"] = s.table_height;
  j["workspace"] = {{"center", detail::to_json(s.workspace.center)},
                    {"half_extents", detail::to_json(s.workspace.half_extents)}};
  json objs = json::array();
  for (const RigidObject& o : s.objects) objs.push_back(object_to_json(o));
  j["objects"] = objs;
  return j.dump(2) + "\n";
}

TaskSpec parse_task(std::string_view text, const SceneSpec& scene) {
  const json j = detail::parse_json(text, "task");
  if (!j.is_object() || j.value("format", "") != "task/1")
    throw FormatError("task: expected an object with \"format\": \"task/1\"");
  TaskSpec t;
  t.noise_sigma = at_path("task.noise_sigma", [&] { return j.value("noise_sigma", 0.0); });
  if (!(t.noise_sigma >= 0.0) || !std::isfinite(t.noise_sigma))
    throw FormatError("task.noise_sigma: must be >= 0");
  const json& items = at_path("task", [&]() -> const json& { return j.at("items"); });
  if (!items.is_array()) throw FormatError("task.items: must be an array");
  for (size_t i = 0; i < items.size(); ++i) {
    const std::string path = "task.items[" + std::to_string(i) + "]";
    const json& it = items[i];
    TaskItem item;
    at_path(path, [&] {
      item.object_id = it.at("object").get<std::string>();
      const std::string mode = it.value("mode", "move");
      if (mode == "move") {
        item.mode = TaskMode::move;
        item.goal = detail::transform_from_json(it.at("goal"));
      } else if (mode == "throw") {
        item.mode = TaskMode::throw_object;
        item.target = detail::vec3_from_json(it.at("target"));
      } else {
        throw FormatError(path + ".mode: expected \"move\" or \"throw\", got \"" + mode + "\"");
      }
    });
    if (!scene.find(item.object_id))
      throw FormatError(path + ".object: no object \"" + item.object_id + "\" in the scene");
    t.items.push_back(std::move(item));
  }
  return t;
}

TaskSpec load_task(const std::filesystem::path& file, const SceneSpec& scene) {
  try {
    return parse_task(detail::read_text_file(file), scene);
  } catch (const FormatError& e) {
    throw FormatError(file.string() + ": " + e.what());
  }
}

std::string task_to_string(const TaskSpec& t) {
  json j = json::object();
  j["format"] = "task/1";
  j["noise_sigma"] = t.noise_sigma;
  json items = json::array();
  for (const TaskItem& it : t.items) {
    json e = {{"object", it.object_id}, {"mode", mode_name(it.mode)}};
    if (it.mode == TaskMode::move)
      e["goal"] = detail::to_json(it.goal);
    else
      e["target"] = detail::to_json(it.target);
    items.push_back(e);
  }
  j["items"] = items;
  return j.dump(2) + "\n";
}

std::vector<Diagnostic> validate_scene(const SceneSpec& scene) {
  std::vector<Diagnostic> out;
  auto warn = [&](std::string m) { out.push_back({Diagnostic::Level::warning, std::move(m)}); };
  auto error = [&](std::string m) { out.push_back({Diagnostic::Level::error, std::move(m)}); };

  std::set<std::string> seen;
  for (const RigidObject& o : scene.objects) {
    if (!seen.insert(o.id).second) error(o.id + ": duplicate object id");
    for (const std::string& w : size_range_warnings(o)) warn(o.id + ": " + w);
    if (!scene.workspace.contains(o.pose.position))
      warn(o.id + ": center lies outside the workspace");
    const double below = scene.table_height - lowest_z(o);
    if (below > 1e-9) error(o.id + ": penetrates the table by " + detail::shortest(below) + " m");
  }
  for (size_t a = 0; a < scene.objects.size(); ++a)
    for (size_t b = a + 1; b < scene.objects.size(); ++b) {
      const double d = object_object_distance(scene.objects[a], scene.objects[b]);
      if (d < -1e-9)
        error(scene.objects[a].id + " and " + scene.objects[b].id + " overlap by " +
              detail::shortest(-d) + " m");
    }
  return out;
}

bool has_errors(const std::vector<Diagnostic>& d) {
  for (const Diagnostic& x : d)
    if (x.level == Diagnostic::Level::error) return true;
  return false;
}

std::pair<SceneSpec, TaskSpec> demo_scene(std::uint64_t seed) {
  constexpr int kObjects = 8;
  constexpr double kSpacing = 0.07;
  Rng rng(seed, "demo-scene");

  // Objects start in the near half of the table and go to the far half, so
  // a goal never lands on an object that has not moved yet.
  auto place = [&](double y_lo, double y_hi) {
    for (;;) {
      std::vector<Vec3> pts;
      for (int tries = 0; tries < 2000 && static_cast<int>(pts.size()) < kObjects; ++tries) {
        const Vec3 p(rng.uniform(-0.15, 0.15), rng.uniform(y_lo, y_hi), 0.0);
        bool clear = true;
        for (const Vec3& q : pts) clear = clear && (p - q).norm() >= kSpacing;
        if (clear) pts.push_back(p);
      }
      if (static_cast<int>(pts.size()) == kObjects) return pts;
    }
  };
  const std::vector<Vec3> starts = place(-0.15, -0.02);
  const std::vector<Vec3> goals = place(0.02, 0.15);

  SceneSpec scene;
  TaskSpec task;
  const UnitQuaternion lying = UnitQuaternion::from_axis_angle(Vec3::UnitX(), M_PI / 2);
  for (int i = 0; i < kObjects; ++i) {
    const double yaw = rng.uniform(-M_PI, M_PI);
    const UnitQuaternion rz = UnitQuaternion::from_axis_angle(Vec3::UnitZ(), yaw);
    RigidObject o;
    double rest = 0.0;
    switch (i % 3) {
      case 0:
        o = make_sphere(rng.uniform(0.006, 0.009));
        rest = o.size.x();
        break;
      case 1:
        o = make_capsule(rng.uniform(0.005, 0.008), rng.uniform(0.02, 0.035));
        o.pose.orientation = rz * lying;
        rest = o.size.x();
        break;
      default: {
        o = make_box(Vec3(rng.uniform(0.012, 0.018), rng.uniform(0.012, 0.018),
                          rng.uniform(0.012, 0.018)));
        o.pose.orientation = rz;
        rest = 0.5 * o.size.z();
        break;
      }
    }
    o.id = std::string(shape_name(o.shape)) + std::to_string(i + 1);
    o.pose.position = Vec3(starts[i].x(), starts[i].y(), scene.table_height + rest);

    TaskItem item;
    item.object_id = o.id;
    const double turn = rng.uniform(-0.5, 0.5);
    item.goal.position = Vec3(goals[i].x(), goals[i].y(), o.pose.position.z());
    item.goal.orientation =
        UnitQuaternion::from_axis_angle(Vec3::UnitZ(), turn) * o.pose.orientation;
    scene.objects.push_back(std::move(o));
    task.items.push_back(std::move(item));
  }
  return {std::move(scene), std::move(task)};
}

}  // namespace chopsticks
