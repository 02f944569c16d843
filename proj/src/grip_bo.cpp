#include "chopsticks/grip_bo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "chopsticks/arm_ik.hpp"
#include "chopsticks/errors.hpp"
#include "chopsticks/json_util.hpp"
#include "chopsticks/rng.hpp"

namespace chopsticks {

double ManeuverSpec::opening(double t) const {
  const double phase = t / segment_duration;
  return max_opening * 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * phase));
}

int ManeuverSpec::steps_per_segment() const {
  return static_cast<int>(std::llround(segment_duration / dt));
}

ManeuverSpec default_maneuvers() {
  const double deg30 = std::numbers::pi / 6.0;
  const RigidTransform base{Vec3(-0.05, -0.15, 0.20), {}};
  ManeuverSpec m;
  m.segments.push_back({"forward", base});
  m.segments.push_back(
      {"left", {base.position, UnitQuaternion::from_axis_angle(Vec3::UnitZ(), deg30)}});
  m.segments.push_back(
      {"down", {base.position, UnitQuaternion::from_axis_angle(Vec3::UnitY(), deg30)}});
  return m;
}

double evaluate_grip_kinematic(const GripPose& pose, const HandModel& model,
                               const ManeuverSpec& maneuvers,
                               const KinematicEvalOptions& options) {
  if (pose.q.size() != model.dof_count())
    throw DimensionMismatch("grip pose does not match the hand model");
  const int steps = maneuvers.steps_per_segment();
  const int total = steps * static_cast<int>(maneuvers.segments.size());
  if (total == 0) return 0.0;

  // Only the stick pose relative to the palm matters for the hand joints, so
  // contacts are tracked with the arm at the pose's own values; the pointing
  // direction of each segment decides whether the arm can hold it at all.
  const RigidTransform palm = forward_kinematics(model, pose.q).bodies[model.hand_root()];
  const RigidTransform lower_tip = palm * pose.chopsticks_in_palm();

  double sum = 0.0;
  JointAngles q = pose.q;
  double swivel = 0.0;
  for (const ManeuverSegment& seg : maneuvers.segments) {
    try {
      swivel = arm_ik(seg.hand_root, model, swivel).swivel;
    } catch (const Unreachable&) {
      return sum / total;
    }
    for (int k = 0; k < steps; ++k) {
      const double phi = maneuvers.opening(k * maneuvers.dt);
      const ChopstickPair pair =
          chopstick_pair({lower_tip.position, lower_tip.orientation, phi});
      const GripPose tracked = track_contacts(q, pose, model, pair, {}, options.solver);
      double gaps = 0.0;
      bool diverged = !tracked.q.allFinite();
      for (double r : tracked.residuals) {
        gaps += r;
        if (!(r <= options.divergence_residual)) diverged = true;
      }
      if (diverged) return sum / total;
      q = tracked.q;
      const double r_hand = -options.weights.hand * (q - pose.q).norm();
      const double r_contact = -options.weights.contact * gaps;
      sum += std::exp(r_hand + r_contact);
    }
  }
  return sum / total;
}

GripEvaluator kinematic_evaluator(const HandModel& model, ManeuverSpec maneuvers,
                                  KinematicEvalOptions options) {
  return [&model, maneuvers = std::move(maneuvers), options](const GripPose& pose) {
    return evaluate_grip_kinematic(pose, model, maneuvers, options);
  };
}

GripPose tpose_grip(const GripPose& pose, const HandModel& model) {
  GripPose t = pose;
  t.q = model.rest_pose();
  return t;
}

namespace {

Eigen::VectorXd clamp01(Eigen::VectorXd x) { return x.cwiseMax(0.0).cwiseMin(1.0); }

// Compass search on the acquisition inside the unit box.
Eigen::VectorXd pattern_search(const GaussianProcess& gp, Eigen::VectorXd x, double beta) {
  double fx = ucb_acquisition(gp, x, beta);
  double step = 0.1;
  while (step > 1e-3) {
    bool moved = false;
    for (Eigen::Index d = 0; d < x.size(); ++d) {
      for (double sign : {1.0, -1.0}) {
        Eigen::VectorXd y = x;
        y[d] = std::clamp(y[d] + sign * step, 0.0, 1.0);
        const double fy = ucb_acquisition(gp, y, beta);
        if (fy > fx) {
          x = std::move(y);
          fx = fy;
          moved = true;
        }
      }
    }
    if (!moved) step *= 0.5;
  }
  return x;
}

void record(BoResult& r, int t, Eigen::VectorXd x, const std::optional<double>& y) {
  BoIteration it;
  it.iteration = t;
  it.x = std::move(x);
  it.feasible = y.has_value() && std::isfinite(*y);
  it.score = it.feasible ? *y : 0.0;
  if (it.feasible && (r.best_iteration == 0 || it.score > r.best_score)) {
    r.best_score = it.score;
    r.best_x = it.x;
    r.best_iteration = t;
  }
  it.best_score = r.best_score;
  r.history.push_back(std::move(it));
}

}  // namespace

Eigen::VectorXd propose_next(const GaussianProcess& gp, int dim, double beta, std::uint64_t seed,
                             int iteration, const BoOptions& options) {
  Rng rng(seed, "bo-candidates", static_cast<std::uint64_t>(iteration));
  std::vector<Eigen::VectorXd> candidates(std::max(options.random_candidates, 1));
  for (auto& c : candidates) {
    c.resize(dim);
    for (int d = 0; d < dim; ++d) c[d] = rng.uniform();
  }
  const std::vector<double> acq = ucb_batch(gp, candidates, beta, options.exec);
  std::vector<int> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  const int starts = std::clamp(options.local_starts, 1, static_cast<int>(order.size()));
  std::partial_sort(order.begin(), order.begin() + starts, order.end(),
                    [&](int a, int b) { return acq[a] != acq[b] ? acq[a] > acq[b] : a < b; });

  std::vector<Eigen::VectorXd> refined(starts);
  for_each_index(options.exec, starts,
                 [&](int i) { refined[i] = pattern_search(gp, candidates[order[i]], beta); });
  int best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < starts; ++i) {
    const double v = ucb_acquisition(gp, refined[i], beta);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  return clamp01(refined[best]);
}

BoResult bo_maximize(const BoObjective& f, int dim, const BoOptions& options) {
  if (dim < 1) throw std::invalid_argument("optimization needs at least one dimension");
  if (options.max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  BoResult r;
  std::vector<Eigen::VectorXd> xs;
  std::vector<double> ys;
  for (int t = 1; t <= options.max_iterations; ++t) {
    Eigen::VectorXd x = t == 1 ? Eigen::VectorXd::Constant(dim, 0.5)
                               : propose_next(fit_surrogate(xs, ys), dim, ucb_beta(t),
                                              options.seed, t, options);
    const std::optional<double> y = f(x);
    record(r, t, x, y);
    xs.push_back(std::move(x));
    ys.push_back(r.history.back().score);
  }
  if (r.best_iteration == 0) throw NoFeasibleGrip("no feasible proposal");
  return r;
}

BoResult random_search(const BoObjective& f, int dim, int evaluations, std::uint64_t seed) {
  Rng rng(seed, "random-search");
  BoResult r;
  for (int t = 1; t <= evaluations; ++t) {
    Eigen::VectorXd x(dim);
    for (int d = 0; d < dim; ++d) x[d] = rng.uniform();
    record(r, t, x, f(x));
  }
  if (r.best_iteration == 0) throw NoFeasibleGrip("no feasible sample");
  return r;
}

double synthetic_objective(const Eigen::VectorXd& x) {
  auto bump = [&](double cx, double cy, double width, double height) {
    const double dx = x[0] - cx, dy = x[1] - cy;
    return height * std::exp(-(dx * dx + dy * dy) / (2.0 * width * width));
  };
  return bump(0.78, 0.27, 0.10, 1.0) + bump(0.22, 0.75, 0.12, 0.6) + bump(0.5, 0.5, 0.35, 0.3);
}

GripOptimization optimize_grip(const GrippingStyle& style, const HandModel& model,
                               const BoOptions& options, const GripEvaluator& evaluator) {
  const GripEvaluator eval = evaluator ? evaluator : kinematic_evaluator(model);
  std::vector<std::optional<GripPose>> poses;
  const BoObjective f = [&](const Eigen::VectorXd& x) -> std::optional<double> {
    ContactProposal p{std::vector<double>(x.data(), x.data() + x.size())};
    try {
      GripPose pose = solve_grip_ik(p, style, model);
      const double score = eval(pose);
      poses.emplace_back(std::move(pose));
      return score;
    } catch (const InfeasibleContact&) {
      poses.emplace_back();
      return std::nullopt;
    }
  };
  GripOptimization out;
  try {
    out.trace = bo_maximize(f, style.contact_count(), options);
  } catch (const NoFeasibleGrip&) {
    throw NoFeasibleGrip("no feasible grip found for style (" + format_style(style) + ") in " +
                         std::to_string(options.max_iterations) + " proposals");
  }
  out.pose = *poses[out.trace.best_iteration - 1];
  out.score = out.trace.best_score;
  return out;
}

std::string format_iteration(const BoIteration& it) {
  std::ostringstream os;
  os << "iter=" << it.iteration << " x=";
  for (Eigen::Index i = 0; i < it.x.size(); ++i)
    os << (i ? "," : "") << detail::shortest(it.x[i]);
  os << " score=" << detail::shortest(it.score) << " feasible=" << (it.feasible ? 1 : 0)
     << " best=" << detail::shortest(it.best_score);
  return os.str();
}

}  // namespace chopsticks
