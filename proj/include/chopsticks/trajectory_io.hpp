#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "chopsticks/frames.hpp"

namespace chopsticks {

inline constexpr std::string_view kTrajectoryFormat = "trajectory/1";

// Plain-text trajectory: a header (format tag, dt, frame count, morphology
// hash, style, grip joint vector, object) followed by one line per frame.
// Every number is written in its shortest round-trip form, so reading a
// written file reproduces it bit for bit.
//
//   frame <phase> <chop p(3) o(4) opening> <chop v(3) w(3) opening rate>
//         <per stick: p(3) o(4) v(3) w(3)> <hand root p(3) o(4)> <swivel>
//         <q(n)> <qdot(n)> <has object> <object p(3) o(4) v(3) w(3)>
//         <contact gaps(N)> <finger forces(N)> <stick forces(2)>
std::string trajectory_to_string(const TaskTrajectory& t);
TaskTrajectory parse_trajectory(std::string_view text);

void save_trajectory(const std::filesystem::path& file, const TaskTrajectory& t);
TaskTrajectory load_trajectory(const std::filesystem::path& file);

// Columns for plotting: time, phase, lower tip, opening, object position,
// swivel.
std::string trajectory_csv(const TaskTrajectory& t);

}  // namespace chopsticks
