#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "chopsticks/geometry.hpp"

namespace chopsticks::detail {

// Parses JSON text; syntax errors become FormatError with line and column.
nlohmann::json parse_json(std::string_view text, std::string_view what);
std::string read_text_file(const std::filesystem::path& file);
nlohmann::json read_json_file(const std::filesystem::path& file);
void write_text_file(const std::filesystem::path& file, std::string_view text);

nlohmann::json to_json(const Vec3& v);
nlohmann::json to_json(const UnitQuaternion& q);  // [w, x, y, z]
nlohmann::json to_json(const RigidTransform& t);  // {position, orientation}
Vec3 vec3_from_json(const nlohmann::json& j);
UnitQuaternion quat_from_json(const nlohmann::json& j);
RigidTransform transform_from_json(const nlohmann::json& j);

// Shortest text that parses back to exactly `v`.
std::string shortest(double v);

}  // namespace chopsticks::detail
