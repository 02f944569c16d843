#include <cmath>

#include <gtest/gtest.h>

#include "chopsticks/arm_ik.hpp"
#include "chopsticks/errors.hpp"
#include "support.hpp"

using namespace chopsticks;

namespace {

const HandModel& standard() {
  static const HandModel m = make_preset("standard");
  return m;
}

// Arm angles inside the limits, away from the straight elbow.
ArmAngles random_arm(const HandModel& m, Rng& rng) {
  const Joint& sh = m.joints[m.arm.shoulder];
  const Joint& wr = m.joints[m.arm.wrist];
  ArmAngles a;
  for (int k = 0; k < 3; ++k) {
    a[k] = rng.uniform(sh.lower[k], sh.upper[k]);
    a[4 + k] = rng.uniform(wr.lower[k], wr.upper[k]);
  }
  a[3] = rng.uniform(0.2, 2.5);
  return a;
}

double angle_wrap(double a) { return std::remainder(a, 2.0 * 3.141592653589793); }

}  // namespace

TEST(ArmForward, AgreesWithFullForwardKinematics) {
  const HandModel& m = standard();
  Rng rng(61);
  for (int i = 0; i < 50; ++i) {
    const ArmAngles a = random_arm(m, rng);
    JointAngles q = m.rest_pose();
    set_arm_angles(m, a, q);
    EXPECT_EQ(arm_angles(m, q), a);
    const RigidTransform fk = forward_kinematics(m, q).bodies[m.hand_root()];
    const RigidTransform direct = arm_forward(m, a);
    EXPECT_LT((fk.position - direct.position).norm(), 1e-12);
    EXPECT_LT(quat_angle(fk.orientation, direct.orientation), 1e-9);
  }
}

TEST(ArmIk, RoundTripsRandomConfigurations) {
  const HandModel& m = standard();
  Rng rng(62);
  double worst_p = 0.0, worst_r = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const ArmAngles a = random_arm(m, rng);
    const RigidTransform target = arm_forward(m, a);
    const ArmIkSolution s = arm_ik(target, m, swivel_of(m, a));
    const RigidTransform got = arm_forward(m, s.q);
    worst_p = std::max(worst_p, (got.position - target.position).norm());
    worst_r = std::max(worst_r, quat_angle(got.orientation, target.orientation));
  }
  EXPECT_LT(worst_p, 1e-6);
  EXPECT_LT(worst_r, 1e-6);
}

TEST(ArmIk, HintedSwivelIsKept) {
  const HandModel& m = standard();
  Rng rng(63);
  for (int i = 0; i < 100; ++i) {
    const ArmAngles a = random_arm(m, rng);
    const double psi = swivel_of(m, a);
    const ArmIkSolution s = arm_ik(arm_forward(m, a), m, psi);
    EXPECT_NEAR(angle_wrap(s.swivel - psi), 0.0, 1e-12);
    EXPECT_NEAR(angle_wrap(swivel_of(m, s.q) - psi), 0.0, 1e-6);
    // Elbow angle is fixed by the wrist distance.
    EXPECT_NEAR(s.q[3], a[3], 1e-6);
  }
}

TEST(ArmIk, SolutionsRespectLimits) {
  const HandModel& m = standard();
  const Joint& sh = m.joints[m.arm.shoulder];
  const Joint& el = m.joints[m.arm.elbow];
  const Joint& wr = m.joints[m.arm.wrist];
  Rng rng(64);
  for (int i = 0; i < 200; ++i) {
    const ArmAngles a = random_arm(m, rng);
    const ArmIkSolution s = arm_ik(arm_forward(m, a), m, rng.uniform(-3.0, 3.0));
    for (int k = 0; k < 3; ++k) {
      EXPECT_GE(s.q[k], sh.lower[k]);
      EXPECT_LE(s.q[k], sh.upper[k]);
      EXPECT_GE(s.q[4 + k], wr.lower[k]);
      EXPECT_LE(s.q[4 + k], wr.upper[k]);
    }
    EXPECT_GE(s.q[3], el.lower[0]);
    EXPECT_LE(s.q[3], el.upper[0]);
  }
}

TEST(ArmIk, RejectsTargetsOutsideTheAnnulus) {
  const HandModel& m = standard();
  const Vec3 shoulder = m.joints[m.arm.shoulder].origin.position;
  const double l1 = m.arm.upper_length, l2 = m.arm.forearm_length;
  Rng rng(65);
  for (int i = 0; i < 100; ++i) {
    const Vec3 dir = test::random_unit(rng);
    const UnitQuaternion o = test::random_rotation(rng);
    EXPECT_THROW(arm_ik({shoulder + (l1 + l2 + rng.uniform(1e-6, 0.5)) * dir, o}, m), Unreachable);
    EXPECT_THROW(arm_ik({shoulder + rng.uniform(0.0, std::abs(l1 - l2) - 1e-6) * dir, o}, m),
                 Unreachable);
    EXPECT_FALSE(arm_ik_at_swivel({shoulder + (l1 + l2 + 0.01) * dir, o}, m, 0.0).has_value());
  }
}

TEST(ArmIk, RejectsOrientationsBeyondTheWristLimits) {
  // Random hand orientations at a reachable wrist position; some need the
  // wrist past its limits for every swivel.
  const HandModel& m = standard();
  Rng rng(66);
  RigidTransform t = arm_forward(m, {0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0});
  int rejected = 0;
  for (int i = 0; i < 50; ++i) {
    t.orientation = test::random_rotation(rng);
    try {
      const ArmIkSolution s = arm_ik(t, m);
      EXPECT_LT(quat_angle(arm_forward(m, s.q).orientation, t.orientation), 1e-6);
    } catch (const Unreachable&) {
      ++rejected;
    }
  }
  EXPECT_GT(rejected, 0);
}

TEST(ArmIkSequence, KeepsTheSwivelContinuous) {
  const HandModel& m = standard();
  // A joint-space path through the middle of the limits, so a continuous
  // swivel exists.
  const ArmAngles a{0.2, -0.3, 0.4, 1.2, 0.1, -0.2, 0.3};
  const ArmAngles b{-0.3, 0.2, -0.1, 1.6, -0.3, 0.2, -0.2};
  std::vector<RigidTransform> targets;
  for (int k = 0; k <= 40; ++k) {
    ArmAngles c;
    for (int j = 0; j < 7; ++j) c[j] = a[j] + (b[j] - a[j]) * k / 40.0;
    targets.push_back(arm_forward(m, c));
  }
  const auto seq = arm_ik_sequence(targets, m, swivel_of(m, a));
  ASSERT_TRUE(seq.has_value());
  ASSERT_EQ(seq->size(), targets.size());
  for (size_t k = 0; k < targets.size(); ++k) {
    const RigidTransform got = arm_forward(m, (*seq)[k].q);
    EXPECT_LT((got.position - targets[k].position).norm(), 1e-6);
    EXPECT_LT(quat_angle(got.orientation, targets[k].orientation), 1e-6);
    if (k > 0) EXPECT_LE(std::abs(angle_wrap((*seq)[k].swivel - (*seq)[k - 1].swivel)), 0.1 + 1e-12);
  }
  EXPECT_TRUE(arm_ik_sequence({}, m, 0.0)->empty());
}

TEST(ArmIkSequence, NulloptWhenATargetIsUnreachable) {
  const HandModel& m = standard();
  const Vec3 shoulder = m.joints[m.arm.shoulder].origin.position;
  const RigidTransform far{shoulder + Vec3(1.0, 0.0, 0.0), {}};
  EXPECT_FALSE(arm_ik_sequence({arm_forward(m, {0, 0, 0, 1, 0, 0, 0}), far}, m, 0.0).has_value());
}
