#include <gtest/gtest.h>

#include "chopsticks/errors.hpp"
#include "chopsticks/grip_ik.hpp"
#include "support.hpp"

using namespace chopsticks;

namespace {

const HandModel& standard() {
  static const HandModel m = make_preset("standard");
  return m;
}

GripScene rest_scene(const HandModel& m) {
  return grip_scene(m, forward_kinematics(m, m.rest_pose()).bodies[m.hand_root()]);
}

}  // namespace

TEST(ContactPoints, OnStickSurfaceAtFractionOfLength) {
  const HandModel& m = standard();
  const GripScene scene = rest_scene(m);
  const GrippingStyle s = parse_style("1,1,1,2,0");
  const ChopstickGeometry g;
  for (double x : {0.0, 0.25, 0.5, 1.0}) {
    const auto pts = contact_points({std::vector<double>(4, x)}, s, scene.pair, scene.palm_center);
    for (size_t k = 0; k < pts.size(); ++k) {
      const StickState& st = scene.pair.stick[k < 3 ? 0 : 1];
      const Vec3 axis = (st.rear - st.tip).normalized();
      const Vec3 rel = pts[k] - st.tip;
      EXPECT_NEAR(rel.dot(axis), x * g.length, 1e-12);  // 13 cm at x = 0.5
      EXPECT_NEAR((rel - rel.dot(axis) * axis).norm(), g.radius, 1e-12);
      // Offset toward the palm.
      const Vec3 to_palm = scene.palm_center - (st.tip + rel.dot(axis) * axis);
      EXPECT_GT((rel - rel.dot(axis) * axis).dot(to_palm), 0.0);
    }
  }
}

TEST(ContactPoints, RejectsBadProposals) {
  const HandModel& m = standard();
  const GripScene scene = rest_scene(m);
  const GrippingStyle s = parse_style("1,1,1,2,0");
  EXPECT_THROW(contact_points({{0.5, 0.5}}, s, scene.pair, scene.palm_center), DimensionMismatch);
  EXPECT_THROW(contact_points({{0.5, 0.5, 1.5, 0.5}}, s, scene.pair, scene.palm_center),
               std::invalid_argument);
}

TEST(IkObjective, GradientMatchesCentralDifferences) {
  const HandModel& m = standard();
  const GripScene scene = rest_scene(m);
  const auto styles = enumerate_valid_styles(5);
  Rng rng(31);
  const JointAngles lo = m.lower_limits(), hi = m.upper_limits();
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const GrippingStyle& s = styles[trial % styles.size()];
    std::vector<double> x(s.contact_count());
    for (double& v : x) v = rng.uniform(0.1, 0.9);
    const auto pts = contact_points({x}, s, scene.pair, scene.palm_center);
    JointAngles q = m.rest_pose();
    for (int d = 0; d < q.size(); ++d)
      if (m.hand_dof_mask()[d]) q[d] = std::clamp(q[d] + rng.uniform(-0.4, 0.4), lo[d], hi[d]);
    const IkTerms t = ik_objective(q, pts, s, m, scene.pair);
    const Eigen::VectorXd fd = test::numeric_gradient(
        [&](const Eigen::VectorXd& qq) { return ik_objective(qq, pts, s, m, scene.pair).value; }, q);
    const double rel = (t.gradient - fd).lpNorm<Eigen::Infinity>() /
                       std::max(fd.lpNorm<Eigen::Infinity>(), 1e-6);
    worst = std::max(worst, rel);
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(IkObjective, ValueIsSquaredResidualsPlusBarrier) {
  const HandModel& m = standard();
  const GripScene scene = rest_scene(m);
  const GrippingStyle s = parse_style("1,1,1,2,0");
  const auto pts = contact_points({std::vector<double>(4, 0.5)}, s, scene.pair, scene.palm_center);
  const IkTerms t = ik_objective(m.rest_pose(), pts, s, m, scene.pair);
  double expected = 0.0;
  for (size_t k = 0; k < t.residuals.size(); ++k)
    expected += t.residuals[k] * t.residuals[k] +
                clamped_clog(kContactBarrier + t.clearances[k], kContactBarrier).value;
  EXPECT_NEAR(t.value, expected, 1e-15);
  EXPECT_GE(t.value, 0.0);
}

TEST(IkObjective, HalfMillimetrePenetrationCostsTheReferenceBarrier) {
  // The barrier is clog(z0 + clearance, z0), so -0.5 mm evaluates clog at
  // 0.5 mm.
  EXPECT_NEAR(clamped_clog(kContactBarrier - 0.0005, kContactBarrier).value, 3.46574e-4, 1e-9);
}

TEST(SolveGripIk, StandardStyleMidStick) {
  const HandModel& m = standard();
  const GrippingStyle s = parse_style("1,1,1,2,0");
  const GripPose p = solve_grip_ik({std::vector<double>(4, 0.5)}, s, m);
  ASSERT_EQ(p.residuals.size(), 4u);
  for (double r : p.residuals) EXPECT_LT(r, 1e-3);
  EXPECT_LT(p.max_penetration, 1e-3);
  // Limits hold exactly and the arm stays at rest.
  const JointAngles lo = m.lower_limits(), hi = m.upper_limits(), rest = m.rest_pose();
  for (int d = 0; d < m.dof_count(); ++d) {
    EXPECT_GE(p.q[d], lo[d]);
    EXPECT_LE(p.q[d], hi[d]);
    if (!m.hand_dof_mask()[d]) EXPECT_EQ(p.q[d], rest[d]);
  }
  EXPECT_EQ(p.anchors.size(), 4u);
}

TEST(SolveGripIk, Deterministic) {
  const HandModel& m = standard();
  const GrippingStyle s = parse_style("1,0,1,2,0");
  const GripPose a = solve_grip_ik({{0.5, 0.5, 0.5}}, s, m);
  const GripPose b = solve_grip_ik({{0.5, 0.5, 0.5}}, s, m);
  EXPECT_EQ(a.q, b.q);
}

TEST(SolveGripIk, TipContactsOnLargeHandAreInfeasible) {
  const HandModel m = make_preset("large");
  const GrippingStyle s = parse_style("1,1,1,2,0");
  try {
    solve_grip_ik({std::vector<double>(4, 0.0)}, s, m);
    FAIL() << "expected InfeasibleContact";
  } catch (const InfeasibleContact& e) {
    EXPECT_EQ(e.residuals().size(), 4u);
  }
}

TEST(SolveGripIk, PreconditionErrors) {
  const HandModel& m = standard();
  EXPECT_THROW(solve_grip_ik({{}}, parse_style("0,0,0,0,0"), m), std::invalid_argument);
  EXPECT_THROW(solve_grip_ik({{0.5, 0.5}}, parse_style("1,2,0"), m), DimensionMismatch);
}

TEST(TrackContacts, ReproducesTheGripAtItsOwnSticks) {
  const HandModel& m = standard();
  const GripPose p = solve_grip_ik({std::vector<double>(4, 0.5)}, parse_style("1,1,1,2,0"), m);
  const RigidTransform palm = forward_kinematics(m, p.q).bodies[m.hand_root()];
  const RigidTransform tip = palm * p.chopsticks_in_palm();
  const ChopstickPair pair = chopstick_pair({tip.position, tip.orientation, p.opening});
  const GripPose t = track_contacts(p.q, p, m, pair);
  // Warm-started descent from the solved pose: contacts only get closer.
  double before = 0.0, after = 0.0;
  for (size_t k = 0; k < t.residuals.size(); ++k) {
    before += p.residuals[k] * p.residuals[k];
    after += t.residuals[k] * t.residuals[k];
    EXPECT_LT(t.residuals[k], 1e-3);
  }
  EXPECT_LE(after, before);
}

TEST(TrackContacts, FollowsASlightlyWiderOpening) {
  const HandModel& m = standard();
  const GripPose p = solve_grip_ik({std::vector<double>(4, 0.5)}, parse_style("1,1,1,2,0"), m);
  const RigidTransform palm = forward_kinematics(m, p.q).bodies[m.hand_root()];
  const RigidTransform tip = palm * p.chopsticks_in_palm();
  const ChopstickPair pair = chopstick_pair({tip.position, tip.orientation, p.opening + 0.03});
  const GripPose t = track_contacts(p.q, p, m, pair, {}, {200, 1e-9, 10});
  for (double r : t.residuals) EXPECT_LT(r, 2e-3);
  EXPECT_GT((t.q - p.q).norm(), 1e-3);
}

TEST(GripPose, HoldingOffsetSlidesAlongTheSticks) {
  const HandModel& m = standard();
  GripPose p = solve_grip_ik({std::vector<double>(4, 0.5)}, parse_style("1,1,1,2,0"), m);
  const RigidTransform base = p.chopsticks_in_palm();
  p.holding_offset = 0.03;
  const RigidTransform moved = p.chopsticks_in_palm();
  EXPECT_EQ(moved.orientation, base.orientation);
  EXPECT_NEAR((moved.position - base.position).norm(), 0.03, 1e-12);
  EXPECT_NEAR(std::abs((moved.position - base.position).normalized().dot(base.rotate(Vec3::UnitZ()))),
              1.0, 1e-12);
}
