#include "chopsticks/trajectory_io.hpp"

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <sstream>

#include "chopsticks/errors.hpp"
#include "chopsticks/json_util.hpp"

namespace chopsticks {

namespace {

class Writer {
 public:
  void num(double v) {
    out_ += ' ';
    out_ += detail::shortest(v);
  }
  void vec(const Vec3& v) {
    for (int i = 0; i < 3; ++i) num(v[i]);
  }
  void quat(const UnitQuaternion& q) {
    for (double c : q.coeffs()) num(c);
  }
  void pose(const RigidTransform& t) {
    vec(t.position);
    quat(t.orientation);
  }
  void body(const BodyState& b) {
    pose(b.pose);
    vec(b.velocity);
    vec(b.angular_velocity);
  }
  void word(std::string_view w) {
    if (!out_.empty() && out_.back() != '\n') out_ += ' ';
    out_ += w;
  }
  void end_line() { out_ += '\n'; }
  std::string& str() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  Reader(std::string_view text, int line) : text_(text), line_(line) {}

  std::string_view word() {
    while (pos_ < text_.size() && text_[pos_] == ' ') ++pos_;
    const size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ' ') ++pos_;
    if (start == pos_) fail("unexpected end of line");
    return text_.substr(start, pos_ - start);
  }
  double num() {
    const std::string_view w = word();
    double v = 0.0;
    const auto r = std::from_chars(w.data(), w.data() + w.size(), v);
    if (r.ec != std::errc() || r.ptr != w.data() + w.size())
      fail("bad number '" + std::string(w) + "'");
    return v;
  }
  long integer() {
    const std::string_view w = word();
    long v = 0;
    const auto r = std::from_chars(w.data(), w.data() + w.size(), v);
    if (r.ec != std::errc() || r.ptr != w.data() + w.size())
      fail("bad integer '" + std::string(w) + "'");
    return v;
  }
  Vec3 vec() {
    Vec3 v;
    for (int i = 0; i < 3; ++i) v[i] = num();
    return v;
  }
  UnitQuaternion quat() {
    const double w = num(), x = num(), y = num(), z = num();
    try {
      return UnitQuaternion::from_stored(w, x, y, z);
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }
  RigidTransform pose() {
    RigidTransform t;
    t.position = vec();
    t.orientation = quat();
    return t;
  }
  BodyState body() {
    BodyState b;
    b.pose = pose();
    b.velocity = vec();
    b.angular_velocity = vec();
    return b;
  }
  void expect(std::string_view w) {
    const std::string_view got = word();
    if (got != w) fail("expected '" + std::string(w) + "', got '" + std::string(got) + "'");
  }
  void finish() {
    while (pos_ < text_.size() && text_[pos_] == ' ') ++pos_;
    if (pos_ != text_.size()) fail("trailing fields");
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw FormatError("trajectory line " + std::to_string(line_) + ": " + msg);
  }

 private:
  std::string_view text_;
  size_t pos_ = 0;
  int line_;
};

}  // namespace

std::string trajectory_to_string(const TaskTrajectory& t) {
  Writer w;
  w.word(kTrajectoryFormat);
  w.end_line();
  w.word("dt");
  w.num(t.dt);
  w.end_line();
  w.word("frames " + std::to_string(t.frames.size()));
  w.end_line();
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016" PRIx64, t.morphology_hash);
  w.word(std::string("morphology ") + hash);
  w.end_line();
  w.word("style " + format_style(t.style));
  w.end_line();
  w.word("object " + (t.object_id.empty() ? std::string("-") : t.object_id) + " " +
         std::string(shape_name(t.object_shape)));
  w.vec(t.object_size);
  w.end_line();
  w.word("grip_q " + std::to_string(t.grip_q.size()));
  for (Eigen::Index i = 0; i < t.grip_q.size(); ++i) w.num(t.grip_q[i]);
  w.end_line();
  for (const TrajectoryFrame& f : t.frames) {
    w.word("frame");
    w.word(phase_name(f.phase));
    w.vec(f.chop.position);
    w.quat(f.chop.orientation);
    w.num(f.chop.opening);
    w.vec(f.chop_velocity);
    w.vec(f.chop_angular_velocity);
    w.num(f.opening_rate);
    w.body(f.sticks[0]);
    w.body(f.sticks[1]);
    w.pose(f.hand_root);
    w.num(f.swivel);
    w.word(std::to_string(f.q.size()));
    for (Eigen::Index i = 0; i < f.q.size(); ++i) w.num(f.q[i]);
    for (Eigen::Index i = 0; i < f.q.size(); ++i) w.num(i < f.qdot.size() ? f.qdot[i] : 0.0);
    w.word(f.has_object ? "1" : "0");
    w.body(f.object);
    w.word(std::to_string(f.contact_gaps.size()));
    for (double d : f.contact_gaps) w.num(d);
    for (size_t i = 0; i < f.contact_gaps.size(); ++i)
      w.num(i < f.finger_forces.size() ? f.finger_forces[i] : 0.0);
    w.num(f.stick_forces[0]);
    w.num(f.stick_forces[1]);
    w.end_line();
  }
  return std::move(w.str());
}

TaskTrajectory parse_trajectory(std::string_view text) {
  std::vector<std::string_view> lines;
  size_t start = 0;
  while (start < text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  if (lines.size() < 7) throw FormatError("trajectory file truncated: missing header lines");
  if (lines[0] != kTrajectoryFormat)
    throw FormatError("trajectory line 1: expected '" + std::string(kTrajectoryFormat) + "'");

  TaskTrajectory t;
  {
    Reader r(lines[1], 2);
    r.expect("dt");
    t.dt = r.num();
    r.finish();
  }
  long count = 0;
  {
    Reader r(lines[2], 3);
    r.expect("frames");
    count = r.integer();
    if (count < 0) r.fail("negative frame count");
    r.finish();
  }
  {
    Reader r(lines[3], 4);
    r.expect("morphology");
    const std::string_view h = r.word();
    const auto res = std::from_chars(h.data(), h.data() + h.size(), t.morphology_hash, 16);
    if (res.ec != std::errc() || res.ptr != h.data() + h.size()) r.fail("bad morphology hash");
    r.finish();
  }
  {
    Reader r(lines[4], 5);
    r.expect("style");
    try {
      t.style = parse_style(r.word());
    } catch (const std::invalid_argument& e) {
      r.fail(e.what());
    }
    r.finish();
  }
  {
    Reader r(lines[5], 6);
    r.expect("object");
    const std::string_view id = r.word();
    t.object_id = id == "-" ? std::string() : std::string(id);
    try {
      t.object_shape = parse_shape(r.word());
    } catch (const std::invalid_argument& e) {
      r.fail(e.what());
    }
    t.object_size = r.vec();
    r.finish();
  }
  {
    Reader r(lines[6], 7);
    r.expect("grip_q");
    const long n = r.integer();
    if (n < 0) r.fail("negative joint count");
    t.grip_q.resize(n);
    for (long i = 0; i < n; ++i) t.grip_q[i] = r.num();
    r.finish();
  }
  size_t used = 7;
  for (long k = 0; k < count; ++k, ++used) {
    if (used >= lines.size())
      throw FormatError("trajectory truncated: header declares " + std::to_string(count) +
                        " frames, found " + std::to_string(k));
    Reader r(lines[used], static_cast<int>(used) + 1);
    r.expect("frame");
    TrajectoryFrame f;
    try {
      f.phase = parse_phase(r.word());
    } catch (const std::invalid_argument& e) {
      r.fail(e.what());
    }
    f.chop.position = r.vec();
    f.chop.orientation = r.quat();
    f.chop.opening = r.num();
    f.chop_velocity = r.vec();
    f.chop_angular_velocity = r.vec();
    f.opening_rate = r.num();
    f.sticks[0] = r.body();
    f.sticks[1] = r.body();
    f.hand_root = r.pose();
    f.swivel = r.num();
    const long n = r.integer();
    if (n < 0) r.fail("negative joint count");
    f.q.resize(n);
    f.qdot.resize(n);
    for (long i = 0; i < n; ++i) f.q[i] = r.num();
    for (long i = 0; i < n; ++i) f.qdot[i] = r.num();
    const long has = r.integer();
    if (has != 0 && has != 1) r.fail("object flag must be 0 or 1");
    f.has_object = has == 1;
    f.object = r.body();
    const long fingers = r.integer();
    if (fingers < 0) r.fail("negative finger count");
    f.contact_gaps.resize(fingers);
    f.finger_forces.resize(fingers);
    for (long i = 0; i < fingers; ++i) f.contact_gaps[i] = r.num();
    for (long i = 0; i < fingers; ++i) f.finger_forces[i] = r.num();
    f.stick_forces[0] = r.num();
    f.stick_forces[1] = r.num();
    r.finish();
    t.frames.push_back(std::move(f));
  }
  for (; used < lines.size(); ++used)
    if (!lines[used].empty())
      throw FormatError("trajectory line " + std::to_string(used + 1) +
                        ": more frames than the header declares");
  return t;
}

void save_trajectory(const std::filesystem::path& file, const TaskTrajectory& t) {
  detail::write_text_file(file, trajectory_to_string(t));
}

TaskTrajectory load_trajectory(const std::filesystem::path& file) {
  try {
    return parse_trajectory(detail::read_text_file(file));
  } catch (const FormatError& e) {
    throw FormatError(file.string() + ": " + e.what());
  }
}

std::string trajectory_csv(const TaskTrajectory& t) {
  std::ostringstream os;
  os << "time,phase,tip_x,tip_y,tip_z,opening,object_x,object_y,object_z,swivel\n";
  for (size_t k = 0; k < t.frames.size(); ++k) {
    const TrajectoryFrame& f = t.frames[k];
    os << detail::shortest(k * t.dt) << ',' << phase_name(f.phase);
    for (int i = 0; i < 3; ++i) os << ',' << detail::shortest(f.chop.position[i]);
    os << ',' << detail::shortest(f.chop.opening);
    for (int i = 0; i < 3; ++i) os << ',' << detail::shortest(f.object.pose.position[i]);
    os << ',' << detail::shortest(f.swivel) << '\n';
  }
  return os.str();
}

}  // namespace chopsticks
