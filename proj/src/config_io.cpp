#include <cinttypes>
#include <cstdio>

#include "chopsticks/errors.hpp"
#include "chopsticks/json_util.hpp"
#include "chopsticks/pipeline.hpp"

namespace chopsticks {

using nlohmann::json;

namespace {

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw FormatError(std::string("config key '") + key + "' has the wrong type: " +
                      j.at(key).dump());
  }
}

const json& section(const json& j, const char* key) {
  static const json empty = json::object();
  if (!j.contains(key)) return empty;
  if (!j.at(key).is_object()) throw FormatError(std::string("config section '") + key +
                                                "' must be an object");
  return j.at(key);
}

std::string hex(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

}  // namespace

Config parse_config(const json& j) {
  if (!j.is_object()) throw FormatError("config must be a JSON object");
  Config c;
  const json& r = section(j, "reward");
  read(r, "hand", c.reward.hand);
  read(r, "chop_position", c.reward.chop_position);
  read(r, "chop_angle", c.reward.chop_angle);
  read(r, "object_position", c.reward.object_position);
  read(r, "object_angle", c.reward.object_angle);
  read(r, "contact", c.reward.contact);

  const json& g = section(j, "grasp");
  read(g, "grid_size", c.grid_size);
  read(g, "top_n", c.top_n);
  read(g, "center_weight", c.quality.center);
  read(g, "alignment_weight", c.quality.alignment);
  read(g, "swarms", c.pso.swarms);
  read(g, "particles", c.pso.particles);
  read(g, "iterations", c.pso.iterations);

  const json& p = section(j, "plan");
  read(p, "speed", c.plan.speed);
  read(p, "angular_speed", c.plan.angular_speed);
  read(p, "barrier", c.plan.barrier);
  read(p, "barrier_weight", c.plan.barrier_weight);
  read(p, "closing_ramp", c.plan.closing_ramp);
  read(p, "release_ramp", c.plan.release_ramp);
  read(p, "approach_margin", c.plan.approach_margin);
  read(p, "starts", c.plan.starts);

  const json& t = section(j, "throw");
  read(t, "release_height", c.throw_options.release_height);
  read(t, "flight_time", c.throw_options.flight_time);
  read(t, "max_speed", c.throw_options.max_speed);

  const json& gr = section(j, "grip");
  read(gr, "iterations", c.grip_iterations);
  read(gr, "residual_tolerance", c.grip_ik.residual_tolerance);
  read(gr, "penetration_tolerance", c.grip_ik.penetration_tolerance);

  const json& w = section(j, "workspace");
  if (w.contains("center")) c.workspace.center = detail::vec3_from_json(w.at("center"));
  if (w.contains("half_extents"))
    c.workspace.half_extents = detail::vec3_from_json(w.at("half_extents"));
  c.throw_options.workspace = c.workspace;

  if (c.grid_size < 1 || c.top_n < 1) throw FormatError("grid_size and top_n must be >= 1");
  if (!(c.plan.speed > 0.0) || !(c.plan.angular_speed > 0.0))
    throw FormatError("plan speeds must be positive");
  if (c.grip_iterations < 1) throw FormatError("grip iterations must be >= 1");
  return c;
}

Config load_config(const std::filesystem::path& file) {
  return parse_config(detail::read_json_file(file));
}

json grip_pose_to_json(const GripPose& pose, const HandModel& model, std::optional<double> score) {
  json j = json::object();
  j["format"] = "grip-pose/1";
  j["hand"] = model.name;
  j["morphology_hash"] = hex(model.hash());
  j["style"] = format_style(pose.style);
  j["contacts"] = pose.contacts.x;
  j["q"] = std::vector<double>(pose.q.data(), pose.q.data() + pose.q.size());
  json anchors = json::array();
  for (const Vec3& a : pose.anchors) anchors.push_back(detail::to_json(a));
  j["anchors"] = anchors;
  j["holding_offset"] = pose.holding_offset;
  j["lower_tip_in_palm"] = detail::to_json(pose.lower_tip_in_palm);
  j["opening"] = pose.opening;
  j["residuals"] = pose.residuals;
  j["max_penetration"] = pose.max_penetration;
  if (score) j["score"] = *score;
  return j;
}

GripPose grip_pose_from_json(const json& j, const HandModel& model) {
  try {
    if (j.value("format", "") != "grip-pose/1")
      throw FormatError("not a grip-pose/1 file");
    if (j.contains("morphology_hash") && j.at("morphology_hash").get<std::string>() != hex(model.hash()))
      throw FormatError("grip pose was solved for a different hand morphology");
    GripPose p;
    p.style = parse_style(j.at("style").get<std::string>());
    p.contacts.x = j.at("contacts").get<std::vector<double>>();
    const auto q = j.at("q").get<std::vector<double>>();
    if (static_cast<int>(q.size()) != model.dof_count())
      throw DimensionMismatch("grip pose has " + std::to_string(q.size()) + " joint values, hand has " +
                              std::to_string(model.dof_count()));
    p.q = Eigen::Map<const Eigen::VectorXd>(q.data(), static_cast<Eigen::Index>(q.size()));
    for (const json& a : j.at("anchors")) p.anchors.push_back(detail::vec3_from_json(a));
    p.holding_offset = j.value("holding_offset", 0.0);
    if (std::abs(p.holding_offset) > kHoldingOffsetLimit + 1e-12)
      throw FormatError("holding offset outside +-0.05 m");
    p.lower_tip_in_palm = detail::transform_from_json(j.at("lower_tip_in_palm"));
    p.opening = j.at("opening").get<double>();
    p.residuals = j.value("residuals", std::vector<double>{});
    p.max_penetration = j.value("max_penetration", 0.0);
    if (p.style.finger_count() != model.finger_count())
      throw DimensionMismatch("grip pose style does not match the hand's finger count");
    if (p.anchors.size() != static_cast<size_t>(p.style.contact_count()) ||
        p.contacts.x.size() != p.anchors.size())
      throw FormatError("grip pose needs one contact and anchor per contacting finger");
    return p;
  } catch (const json::exception& e) {
    throw FormatError(std::string("grip pose: ") + e.what());
  } catch (const std::invalid_argument& e) {
    if (dynamic_cast<const DimensionMismatch*>(&e)) throw;
    throw FormatError(std::string("grip pose: ") + e.what());
  }
}

void save_grip_pose(const std::filesystem::path& file, const GripPose& pose,
                    const HandModel& model, std::optional<double> score) {
  detail::write_text_file(file, grip_pose_to_json(pose, model, score).dump(2) + "\n");
}

GripPose load_grip_pose(const std::filesystem::path& file, const HandModel& model) {
  return grip_pose_from_json(detail::read_json_file(file), model);
}

}  // namespace chopsticks
