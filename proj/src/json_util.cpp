#include "chopsticks/json_util.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "chopsticks/errors.hpp"

namespace chopsticks::detail {

using nlohmann::json;

namespace {

// 1-based line and column of a byte offset.
std::pair<size_t, size_t> line_col(std::string_view text, size_t offset) {
  size_t line = 1, col = 1;
  for (size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // nlohmann reports the offset one past the offending character.
    const auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
    std::ostringstream os;
    os << what << ": parse error at line " << line << ", column " << col;
    throw FormatError(os.str());
  }
}

std::string read_text_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + file.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json read_json_file(const std::filesystem::path& file) {
  return parse_json(read_text_file(file), file.string());
}

void write_text_file(const std::filesystem::path& file, std::string_view text) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + file.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json to_json(const UnitQuaternion& q) { return json::array({q.w(), q.x(), q.y(), q.z()}); }

json to_json(const RigidTransform& t) {
  return {{"position", to_json(t.position)}, {"orientation", to_json(t.orientation)}};
}

Vec3 vec3_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw FormatError("expected a 3-vector, got " + j.dump());
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

UnitQuaternion quat_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4)
    throw FormatError("expected a quaternion [w, x, y, z], got " + j.dump());
  return UnitQuaternion::from_stored(j[0].get<double>(), j[1].get<double>(),
                                     j[2].get<double>(), j[3].get<double>());
}

RigidTransform transform_from_json(const json& j) {
  RigidTransform t;
  if (j.contains("position")) t.position = vec3_from_json(j.at("position"));
  if (j.contains("orientation")) t.orientation = quat_from_json(j.at("orientation"));
  return t;
}

std::string shortest(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace chopsticks::detail
