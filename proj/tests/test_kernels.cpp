// Each parallel kernel must reproduce its serial reference bit for bit.

#include <cstring>

#include <gtest/gtest.h>

#include "chopsticks/gp.hpp"
#include "chopsticks/grasp.hpp"
#include "chopsticks/trajectory.hpp"
#include "support.hpp"

using namespace chopsticks;

namespace {

template <class T>
bool same_bytes(const std::vector<T>& a, const std::vector<T>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(T)) == 0;
}

RigidObject random_object(Rng& rng) {
  const RigidTransform pose{test::random_vec(rng, -0.1, 0.1), test::random_rotation(rng)};
  switch (static_cast<int>(rng.uniform() * 3)) {
    case 0:
      return make_sphere(rng.uniform(0.005, 0.01), pose);
    case 1:
      return make_capsule(rng.uniform(0.005, 0.01), rng.uniform(0.02, 0.04), pose);
    default:
      return make_box(test::random_vec(rng, 0.01, 0.02), pose);
  }
}

}  // namespace

TEST(Kernels, ScoreOrientations) {
  Rng rng(101);
  const auto grid = discretize_orientations(2000);
  for (int i = 0; i < 5; ++i) {
    const RigidObject o = random_object(rng);
    const auto a = score_orientations(grid, o, {}, {}, Exec::serial);
    const auto b = score_orientations(grid, o, {}, {}, Exec::parallel);
    EXPECT_TRUE(same_bytes(a, b)) << i;
  }
}

TEST(Kernels, ReachableMask) {
  const HandModel m = make_preset("standard");
  const GripPose grip = solve_grip_ik({std::vector<double>(4, 0.5)}, parse_style("1,1,1,2,0"), m);
  Rng rng(102);
  const RigidObject o = make_sphere(0.008, {Vec3(0.02, -0.06, 0.008), {}});
  std::vector<ChopstickConfig> configs;
  for (const UnitQuaternion& q : discretize_orientations(200)) configs.push_back(complete_config(q, o));
  const auto a = reachable_mask(configs, grip, m, {}, {}, Exec::serial);
  const auto b = reachable_mask(configs, grip, m, {}, {}, Exec::parallel);
  EXPECT_TRUE(same_bytes(a, b));
  int hits = 0;
  for (unsigned char c : a) hits += c;
  EXPECT_GT(hits, 0);
  EXPECT_LT(hits, static_cast<int>(a.size()));
}

TEST(Kernels, UcbBatch) {
  Rng rng(103);
  std::vector<Eigen::VectorXd> xs, probe;
  std::vector<double> ys;
  for (int i = 0; i < 15; ++i) {
    xs.push_back(Eigen::Vector4d::NullaryExpr([&] { return rng.uniform(); }));
    ys.push_back(std::sin(3 * xs.back().sum()));
  }
  for (int i = 0; i < 2000; ++i) probe.push_back(Eigen::Vector4d::NullaryExpr([&] { return rng.uniform(); }));
  const GaussianProcess gp = fit_surrogate(xs, ys);
  EXPECT_TRUE(same_bytes(ucb_batch(gp, probe, 3.0, Exec::serial), ucb_batch(gp, probe, 3.0, Exec::parallel)));
}

TEST(Kernels, SampleBarriers) {
  Rng rng(104);
  PlanOptions opt;
  Environment env;
  for (int i = 0; i < 6; ++i) env.objects.push_back(random_object(rng));
  for (int trial = 0; trial < 5; ++trial) {
    const ChopstickConfig a{test::random_vec(rng, -0.15, 0.15) + Vec3(0, 0, 0.05), test::random_rotation(rng), 0.05};
    const ChopstickConfig b{test::random_vec(rng, -0.15, 0.15) + Vec3(0, 0, 0.05), test::random_rotation(rng), 0.02};
    PhasePlan p = make_phase(Phase::relocate, a, b, opt);
    p.q1 += test::random_vec(rng, -0.05, 0.05);
    const auto s = sample_barriers(p, env, opt, Exec::serial);
    const auto q = sample_barriers(p, env, opt, Exec::parallel);
    ASSERT_EQ(s.size(), q.size());
    for (size_t k = 0; k < s.size(); ++k) {
      EXPECT_EQ(std::memcmp(&s[k].value, &q[k].value, sizeof(double)), 0);
      EXPECT_EQ(s[k].gradient, q[k].gradient);
      EXPECT_EQ(std::memcmp(&s[k].clearance, &q[k].clearance, sizeof(double)), 0);
    }
  }
}
