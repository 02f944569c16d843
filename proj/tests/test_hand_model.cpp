#include <gtest/gtest.h>

#include "chopsticks/errors.hpp"
#include "chopsticks/hand_model.hpp"
#include "chopsticks/json_util.hpp"
#include "support.hpp"

using namespace chopsticks;
using nlohmann::json;

namespace {

const std::filesystem::path kSource = CHOPSTICKS_SOURCE_DIR;
const std::filesystem::path kData = CHOPSTICKS_TEST_DATA;

JointAngles random_q(const HandModel& m, Rng& rng) {
  const JointAngles lo = m.lower_limits(), hi = m.upper_limits();
  JointAngles q(m.dof_count());
  for (int i = 0; i < q.size(); ++i) q[i] = rng.uniform(lo[i], hi[i]);
  return q;
}

std::string edited(const std::string& preset, const std::function<void(json&)>& edit) {
  json j = json::parse(morphology_to_string(make_preset(preset)));
  edit(j);
  return j.dump();
}

}  // namespace

TEST(ForwardKinematics, MatchesIndependentOracle) {
  // tests/oracles/tpose_golden.py, run on data/morphologies/standard.json.
  const json golden = detail::read_json_file(kData / "tpose_golden.json");
  const HandModel m = load_morphology(kSource / "data/morphologies/standard.json");
  ASSERT_GE(golden.at("poses").size(), 2u);
  for (const json& pose : golden.at("poses")) {
    const auto qv = pose.at("q").get<std::vector<double>>();
    ASSERT_EQ(static_cast<int>(qv.size()), m.dof_count());
    const JointAngles q = Eigen::Map<const Eigen::VectorXd>(qv.data(), qv.size());
    const Kinematics fk = forward_kinematics(m, q);
    for (const auto& [name, p] : pose.at("bodies").items()) {
      const int b = m.joint_index(name);
      ASSERT_GE(b, 0) << name;
      EXPECT_LT((fk.bodies[b].position - detail::vec3_from_json(p)).norm(), 1e-12) << name;
    }
    for (const auto& [name, ends] : pose.at("links").items()) {
      const int l = m.link_index(name);
      ASSERT_GE(l, 0) << name;
      EXPECT_LT((fk.links[l].end_a() - detail::vec3_from_json(ends[0])).norm(), 1e-12) << name;
      EXPECT_LT((fk.links[l].end_b() - detail::vec3_from_json(ends[1])).norm(), 1e-12) << name;
    }
  }
}

TEST(ForwardKinematics, RestPoseIsTheDefault) {
  const HandModel m = make_preset("standard");
  EXPECT_EQ(m.dof_count(), 37);
  EXPECT_EQ(m.finger_count(), 5);
  const JointAngles rest = m.rest_pose();
  EXPECT_EQ(m.clamp(rest), rest);
}

TEST(PointJacobian, MatchesFiniteDifferences) {
  const HandModel m = make_preset("standard");
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const JointAngles q = random_q(m, rng);
    const Kinematics fk = forward_kinematics(m, q);
    const int body = m.links[m.fingers[trial % 5].tip_link].body;
    const Vec3 local(0.01, 0.002, -0.003);
    const Vec3 p = fk.bodies[body].apply(local);
    const Eigen::Matrix3Xd J = point_jacobian(m, fk, body, p);
    for (int k = 0; k < m.dof_count(); ++k) {
      JointAngles a = q, b = q;
      a[k] += 1e-6;
      b[k] -= 1e-6;
      const Vec3 fd = (forward_kinematics(m, a).bodies[body].apply(local) -
                       forward_kinematics(m, b).bodies[body].apply(local)) / 2e-6;
      EXPECT_LT((J.col(k) - fd).norm(), 1e-7) << "dof " << k;
    }
  }
}

TEST(Morphology, PresetFilesLoadToThePresets) {
  for (const std::string& name : preset_names()) {
    const HandModel file = load_morphology(kSource / "data/morphologies" / (name + ".json"));
    const HandModel preset = make_preset(name);
    EXPECT_EQ(file.hash(), preset.hash()) << name;
    EXPECT_EQ(morphology_to_string(file), morphology_to_string(preset)) << name;
  }
}

TEST(Morphology, TextRoundTripIsExact) {
  for (const std::string& name : preset_names()) {
    const std::string text = morphology_to_string(make_preset(name));
    EXPECT_EQ(morphology_to_string(parse_morphology(text)), text);
  }
}

TEST(Morphology, PresetsDiffer) {
  EXPECT_NE(make_preset("standard").hash(), make_preset("large").hash());
  EXPECT_NE(make_preset("standard").hash(), make_preset("long-finger").hash());
  EXPECT_EQ(make_preset("tri-finger").finger_count(), 3);
  EXPECT_THROW(make_preset("octopus"), std::invalid_argument);
}

TEST(Morphology, ResolveHandAcceptsPresetOrPath) {
  EXPECT_EQ(resolve_hand("large").hash(), make_preset("large").hash());
  EXPECT_EQ(resolve_hand((kSource / "data/morphologies/large.json").string()).hash(),
            make_preset("large").hash());
}

TEST(Morphology, RejectsStructuralErrors) {
  EXPECT_THROW(parse_morphology(edited("standard", [](json& j) { j["format"] = "morphology/9"; })),
               FormatError);
  EXPECT_THROW(parse_morphology(edited("standard",
                                       [](json& j) {
                                         auto& js = j["joints"];
                                         std::swap(js[1], js[2]);
                                       })),
               FormatError);
  EXPECT_THROW(parse_morphology(edited("standard",
                                       [](json& j) { j["joints"][1]["limits"][0] = {1.0, -1.0}; })),
               FormatError);
  EXPECT_THROW(parse_morphology(edited("standard",
                                       [](json& j) { j["links"][0]["radius"] = 0.0; })),
               FormatError);
  EXPECT_THROW(parse_morphology(edited("standard",
                                       [](json& j) { j["fingers"][0]["tip_link"] = "nope"; })),
               FormatError);
  EXPECT_THROW(parse_morphology(edited("standard",
                                       [](json& j) { j["joints"][5]["name"] = j["joints"][4]["name"]; })),
               FormatError);
  EXPECT_THROW(parse_morphology("{\"format\": "), FormatError);
}

TEST(Morphology, SyntaxErrorsReportLine) {
  try {
    parse_morphology("{\n\"format\": \"morphology/1\",\n oops }");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(FingertipClosestPoint, LiesOnCapsuleSurface) {
  const HandModel m = make_preset("standard");
  Rng rng(22);
  const JointAngles q = m.rest_pose();
  const Kinematics fk = forward_kinematics(m, q);
  for (int i = 0; i < 50; ++i) {
    const int f = i % m.finger_count();
    const Vec3 target = fk.bodies[m.hand_root()].position + test::random_vec(rng, -0.15, 0.15);
    const FingertipPoint p = fingertip_closest_point(m, fk, f, target);
    const Capsule& c = fk.links[m.fingers[f].tip_link];
    const double t = closest_segment_point(c.end_a(), c.end_b(), p.point);
    const Vec3 axis = c.end_a() + t * (c.end_b() - c.end_a());
    EXPECT_NEAR((p.point - axis).norm(), c.radius, 1e-12);
    EXPECT_NEAR(p.distance, (p.point - target).norm(), 1e-15);
  }
}

TEST(PdTorque, ServoAndSaturation) {
  const HandModel m = make_preset("standard");
  PDGains g = default_gains(m);
  const JointAngles q = m.rest_pose();
  JointAngles target = q;
  const JointAngles qdot = JointAngles::Zero(q.size());
  const TorqueResult none = pd_torque(g, target, q, qdot);
  EXPECT_EQ(none.tau.norm(), 0.0);
  EXPECT_FALSE(none.any_saturated);
  target[10] += 1e3;
  const TorqueResult sat = pd_torque(g, target, q, qdot);
  EXPECT_TRUE(sat.saturated[10]);
  EXPECT_EQ(sat.tau[10], g.torque_limit[10]);
  EXPECT_THROW(pd_torque(g, target.head(3), q, qdot), DimensionMismatch);
}

TEST(PdTorque, DefaultGainsByGroup) {
  const HandModel m = make_preset("standard");
  const PDGains g = default_gains(m);
  EXPECT_EQ(g.kp[0], 50.0);   // shoulder
  EXPECT_EQ(g.kp[3], 50.0);   // elbow
  EXPECT_EQ(g.kp[4], 10.0);   // wrist
  EXPECT_EQ(g.kp[10], 3.0);   // finger
  EXPECT_DOUBLE_EQ(g.kd[10], 0.3);
}
