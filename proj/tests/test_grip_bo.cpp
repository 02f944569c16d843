#include <algorithm>
#include <cmath>

#include <Eigen/LU>
#include <gtest/gtest.h>

#include "chopsticks/errors.hpp"
#include "chopsticks/grip_bo.hpp"
#include "support.hpp"

using namespace chopsticks;

namespace {

std::vector<Eigen::VectorXd> random_points(Rng& rng, int n, int dim) {
  std::vector<Eigen::VectorXd> xs(n, Eigen::VectorXd(dim));
  for (auto& x : xs)
    for (int d = 0; d < dim; ++d) x[d] = rng.uniform();
  return xs;
}

// Posterior from the textbook formulas with an explicit inverse.
GpPrediction oracle_predict(const GpHyper& h, const std::vector<Eigen::VectorXd>& xs,
                            const std::vector<double>& ys, const Eigen::VectorXd& x) {
  auto k = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    double r2 = 0.0;
    for (Eigen::Index d = 0; d < a.size(); ++d) {
      const double u = (a[d] - b[d]) / h.lengthscales[d];
      r2 += u * u;
    }
    return h.signal_variance * std::exp(-0.5 * r2);
  };
  const int n = static_cast<int>(xs.size());
  Eigen::MatrixXd K(n, n);
  Eigen::VectorXd ks(n), y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) K(i, j) = k(xs[i], xs[j]) + (i == j ? h.noise_variance : 0.0);
    ks[i] = k(x, xs[i]);
    y[i] = ys[i] - h.prior_mean;
  }
  const Eigen::MatrixXd inv = K.fullPivLu().inverse();
  return {h.prior_mean + ks.dot(inv * y), h.signal_variance - ks.dot(inv * ks)};
}

const HandModel& standard() {
  static const HandModel m = make_preset("standard");
  return m;
}

}  // namespace

TEST(GaussianProcess, PosteriorMatchesExplicitInverse) {
  Rng rng(41);
  GpHyper h;
  h.lengthscales = Eigen::Vector2d(0.3, 0.2);
  h.signal_variance = 0.7;
  h.noise_variance = 1e-4;
  h.prior_mean = 0.1;
  const auto xs = random_points(rng, 12, 2);
  std::vector<double> ys;
  for (const auto& x : xs) ys.push_back(synthetic_objective(x));
  GaussianProcess gp(h);
  gp.fit(xs, ys);
  for (const auto& x : random_points(rng, 20, 2)) {
    const GpPrediction a = gp.predict(x), b = oracle_predict(h, xs, ys, x);
    EXPECT_NEAR(a.mean, b.mean, 1e-9);
    EXPECT_NEAR(a.variance, std::max(0.0, b.variance), 1e-9);
  }
}

TEST(GaussianProcess, InterpolatesItsData) {
  Rng rng(42);
  const auto xs = random_points(rng, 10, 3);
  std::vector<double> ys;
  for (const auto& x : xs) ys.push_back(x.sum());
  const GaussianProcess gp = fit_surrogate(xs, ys);
  for (size_t i = 0; i < xs.size(); ++i) {
    const GpPrediction p = gp.predict(xs[i]);
    EXPECT_NEAR(p.mean, ys[i], 1e-3);
    EXPECT_LT(p.variance, 1e-3 * gp.hyper().signal_variance);
  }
}

TEST(GaussianProcess, EmptyGpReturnsThePrior) {
  GpHyper h;
  h.lengthscales = Eigen::VectorXd::Constant(1, 0.2);
  h.prior_mean = 0.25;
  h.signal_variance = 2.0;
  const GpPrediction p = GaussianProcess(h).predict(Eigen::VectorXd::Constant(1, 0.3));
  EXPECT_EQ(p.mean, 0.25);
  EXPECT_EQ(p.variance, 2.0);
  EXPECT_THROW(fit_surrogate({}, {}), std::invalid_argument);
}

TEST(Ucb, BetaSchedule) {
  const double pi = 3.141592653589793;
  EXPECT_NEAR(ucb_beta(1), 2.0 * std::log(pi * pi / 0.6), 1e-15);
  EXPECT_NEAR(ucb_beta(10), 2.0 * std::log(100.0 * pi * pi / 0.6), 1e-13);
  for (int t = 1; t < 50; ++t) EXPECT_LT(ucb_beta(t), ucb_beta(t + 1));
}

TEST(Ucb, AcquisitionIsMeanPlusScaledDeviation) {
  Rng rng(43);
  const auto xs = random_points(rng, 6, 2);
  std::vector<double> ys;
  for (const auto& x : xs) ys.push_back(synthetic_objective(x));
  const GaussianProcess gp = fit_surrogate(xs, ys);
  const auto probe = random_points(rng, 30, 2);
  const std::vector<double> batch = ucb_batch(gp, probe, 2.5, Exec::serial);
  for (size_t i = 0; i < probe.size(); ++i) {
    const GpPrediction p = gp.predict(probe[i]);
    EXPECT_DOUBLE_EQ(batch[i], p.mean + std::sqrt(2.5) * std::sqrt(p.variance));
  }
}

TEST(BoMaximize, FirstProposalIsTheCenter) {
  const BoResult r = bo_maximize([](const Eigen::VectorXd& x) { return synthetic_objective(x); },
                                 2, {.max_iterations = 3, .seed = 1});
  ASSERT_EQ(r.history.size(), 3u);
  EXPECT_EQ(r.history[0].x, Eigen::Vector2d(0.5, 0.5));
  for (const BoIteration& it : r.history) {
    EXPECT_TRUE((it.x.array() >= 0.0).all() && (it.x.array() <= 1.0).all());
  }
}

TEST(BoMaximize, FindsTheSyntheticPeak) {
  const BoResult r = bo_maximize([](const Eigen::VectorXd& x) { return synthetic_objective(x); },
                                 2, {.max_iterations = 25, .seed = 3});
  // Global maximum sits near (0.78, 0.27) at about 1.0.
  EXPECT_GT(r.best_score, 0.95);
  EXPECT_LT((r.best_x - Eigen::Vector2d(0.78, 0.27)).norm(), 0.05);
  for (size_t i = 1; i < r.history.size(); ++i)
    EXPECT_GE(r.history[i].best_score, r.history[i - 1].best_score);
}

TEST(BoMaximize, BeatsRandomSearchMedian) {
  auto f = [](const Eigen::VectorXd& x) -> std::optional<double> { return synthetic_objective(x); };
  std::vector<double> bo, rs;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    bo.push_back(bo_maximize(f, 2, {.max_iterations = 10, .seed = seed}).best_score);
    rs.push_back(random_search(f, 2, 10, seed).best_score);
  }
  std::sort(bo.begin(), bo.end());
  std::sort(rs.begin(), rs.end());
  EXPECT_GT((bo[9] + bo[10]) / 2, (rs[9] + rs[10]) / 2);
}

TEST(BoMaximize, SerialAndParallelAgree) {
  auto f = [](const Eigen::VectorXd& x) -> std::optional<double> { return synthetic_objective(x); };
  const BoResult a = bo_maximize(f, 2, {.max_iterations = 8, .seed = 5, .exec = Exec::serial});
  const BoResult b = bo_maximize(f, 2, {.max_iterations = 8, .seed = 5, .exec = Exec::parallel});
  ASSERT_EQ(a.history.size(), b.history.size());
  for (size_t i = 0; i < a.history.size(); ++i) EXPECT_EQ(a.history[i].x, b.history[i].x);
}

TEST(BoMaximize, InfeasibleProposalsScoreZero) {
  // Feasible only in the right half.
  auto f = [](const Eigen::VectorXd& x) -> std::optional<double> {
    if (x[0] < 0.6) return std::nullopt;
    return synthetic_objective(x);
  };
  const BoResult r = bo_maximize(f, 2, {.max_iterations = 10, .seed = 2});
  EXPECT_FALSE(r.history[0].feasible);
  EXPECT_EQ(r.history[0].score, 0.0);
  EXPECT_GE(r.best_x[0], 0.6);
  EXPECT_THROW(bo_maximize([](const Eigen::VectorXd&) -> std::optional<double> { return {}; }, 1,
                           {.max_iterations = 3}),
               NoFeasibleGrip);
  EXPECT_THROW(bo_maximize(f, 0), std::invalid_argument);
}

TEST(BoMaximize, FormatIteration) {
  BoIteration it;
  it.iteration = 3;
  it.x = Eigen::Vector2d(0.5, 0.25);
  it.score = 0.5;
  it.best_score = 0.75;
  EXPECT_EQ(format_iteration(it), "iter=3 x=0.5,0.25 score=0.5 feasible=1 best=0.75");
}

TEST(Maneuvers, OpeningProfile) {
  const ManeuverSpec m = default_maneuvers();
  EXPECT_EQ(m.segments.size(), 3u);
  EXPECT_EQ(m.steps_per_segment(), 100);
  EXPECT_EQ(m.opening(0.0), 0.0);
  EXPECT_NEAR(m.opening(0.5), 0.15, 1e-15);
  EXPECT_NEAR(m.opening(0.25), 0.075, 1e-15);
}

TEST(KinematicEvaluator, ScoresInUnitInterval) {
  const HandModel& m = standard();
  const GripPose p = solve_grip_ik({std::vector<double>(4, 0.5)}, parse_style("1,1,1,2,0"), m);
  const double s = evaluate_grip_kinematic(p, m);
  EXPECT_GE(s, 0.0);
  EXPECT_LE(s, 1.0);
  EXPECT_EQ(s, kinematic_evaluator(m)(p));
  GripPose bad = p;
  bad.q = bad.q.head(5);
  EXPECT_THROW(evaluate_grip_kinematic(bad, m), DimensionMismatch);
}

TEST(KinematicEvaluator, TposeKeepsAnchorsAndRestsTheHand) {
  const HandModel& m = standard();
  const GripPose p = solve_grip_ik({std::vector<double>(4, 0.5)}, parse_style("1,1,1,2,0"), m);
  const GripPose t = tpose_grip(p, m);
  EXPECT_EQ(t.q, m.rest_pose());
  EXPECT_EQ(t.style.c, p.style.c);
  EXPECT_EQ(t.anchors.size(), p.anchors.size());
}

TEST(OptimizeGrip, BeatsTheTposeBaseline) {
  const HandModel& m = standard();
  const GrippingStyle s = parse_style("1,0,1,2,0");
  const GripOptimization o = optimize_grip(s, m, {.max_iterations = 4, .seed = 9});
  EXPECT_EQ(o.trace.history.size(), 4u);
  EXPECT_EQ(o.score, o.trace.best_score);
  EXPECT_GT(o.score, evaluate_grip_kinematic(tpose_grip(o.pose, m), m));
}
