#include "chopsticks/grasp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "chopsticks/errors.hpp"
#include "chopsticks/rng.hpp"

namespace chopsticks {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;

}  // namespace

EulerRanges orientation_ranges() { return {-kPi, kPi, 15.0 * kDeg, 75.0 * kDeg, -kPi / 2, kPi / 2}; }

UnitQuaternion euler_orientation(double yaw, double tilt, double roll) {
  return UnitQuaternion::from_axis_angle(Vec3::UnitZ(), yaw) *
         UnitQuaternion::from_axis_angle(Vec3::UnitY(), tilt) *
         UnitQuaternion::from_axis_angle(Vec3::UnitZ(), roll);
}

std::vector<UnitQuaternion> discretize_orientations(int n) {
  if (n < 1) throw std::invalid_argument("orientation count must be positive");
  if (n == 1) return {UnitQuaternion()};
  int k = static_cast<int>(std::cbrt(n / 2.0) + 1e-9);
  while (k > 1 && n % (k * k) != 0) --k;
  k = std::max(k, 1);
  const int n_yaw = n / (k * k), n_tilt = k, n_roll = k;
  const EulerRanges r = orientation_ranges();
  std::vector<UnitQuaternion> out;
  out.reserve(n);
  for (int i = 0; i < n_yaw; ++i) {
    const double yaw = r.yaw_lo + (r.yaw_hi - r.yaw_lo) * i / n_yaw;
    for (int j = 0; j < n_tilt; ++j) {
      const double tilt =
          n_tilt == 1 ? 0.5 * (r.tilt_lo + r.tilt_hi)
                      : r.tilt_lo + (r.tilt_hi - r.tilt_lo) * j / (n_tilt - 1);
      for (int l = 0; l < n_roll; ++l) {
        const double roll = r.roll_lo + (r.roll_hi - r.roll_lo) * l / n_roll;
        out.push_back(euler_orientation(yaw, tilt, roll));
      }
    }
  }
  return out;
}

ChopstickConfig complete_config(const UnitQuaternion& o, const RigidObject& object,
                                const ChopstickGeometry& g) {
  // The tip-line direction turns with the opening, so iterate the width
  // match to a fixed point (contraction: the direction moves at half the
  // rate of the opening).
  double phi = 0.0;
  for (int it = 0; it < 100; ++it) {
    const double w = width_along(object, o.rotate(tip_direction_local(phi, g)));
    const double next = opening_for_separation(w, g);
    const bool done = std::abs(next - phi) <= 1e-15;
    phi = next;
    if (done) break;
  }
  ChopstickConfig c;
  c.orientation = o;
  c.opening = phi;
  c.position = object.pose.position - o.rotate(0.5 * upper_tip_local(phi, g));
  return c;
}

double grasp_quality(const ChopstickConfig& config, const RigidObject& object,
                     const QualityWeights& w, const ChopstickGeometry& g) {
  const Vec3 lower_tip = config.position;
  const Vec3 upper_tip = config.frame().apply(upper_tip_local(config.opening, g));
  const Vec3 mid = 0.5 * (lower_tip + upper_tip);
  Vec3 d = upper_tip - lower_tip;
  d = d.norm() > 1e-12 ? Vec3(d.normalized())
                       : config.orientation.rotate(tip_direction_local(config.opening, g));
  double misalignment = 0.0;
  for (const Vec3& tip : {lower_tip, upper_tip}) {
    Vec3 n;
    object_signed_distance(object, tip, &n);
    misalignment += 1.0 - std::abs(n.dot(d));
  }
  return std::exp(-w.center * (mid - object.pose.position).norm()) *
         std::exp(-w.alignment * misalignment);
}

double orientation_quality(const UnitQuaternion& o, const RigidObject& object,
                           const QualityWeights& w, const ChopstickGeometry& g) {
  try {
    return grasp_quality(complete_config(o, object, g), object, w, g);
  } catch (const ObjectTooWide&) {
    return 0.0;
  }
}

std::vector<double> score_orientations(const std::vector<UnitQuaternion>& grid,
                                       const RigidObject& object, const QualityWeights& w,
                                       const ChopstickGeometry& g, Exec exec) {
  std::vector<double> q(grid.size());
  for_each_index(exec, static_cast<int>(grid.size()),
                 [&](int i) { q[i] = orientation_quality(grid[i], object, w, g); });
  return q;
}

int nearest_orientation(const std::vector<UnitQuaternion>& grid, const UnitQuaternion& o) {
  int best = 0;
  double best_angle = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < grid.size(); ++i) {
    const double a = quat_angle(grid[i], o);
    if (a < best_angle) {
      best_angle = a;
      best = static_cast<int>(i);
    }
  }
  return best;
}

std::vector<PsoResult> pso_refine(const RigidObject& object, const PsoOptions& opt,
                                  const QualityWeights& w, const ChopstickGeometry& g) {
  const EulerRanges r = orientation_ranges();
  const double lo[3] = {r.yaw_lo, r.tilt_lo, r.roll_lo};
  const double hi[3] = {r.yaw_hi, r.tilt_hi, r.roll_hi};
  auto quality = [&](const std::array<double, 3>& x) {
    return orientation_quality(euler_orientation(x[0], x[1], x[2]), object, w, g);
  };
  const std::vector<UnitQuaternion> grid = discretize_orientations(opt.grid_size);

  std::vector<PsoResult> out;
  for (int s = 0; s < opt.swarms; ++s) {
    Rng rng(opt.seed, "pso", static_cast<std::uint64_t>(s));
    const int np = opt.particles;
    std::vector<std::array<double, 3>> x(np), v(np), best_x(np);
    std::vector<double> best_f(np);
    std::array<double, 3> g_x{};
    double g_f = -1.0;
    for (int p = 0; p < np; ++p) {
      for (int k = 0; k < 3; ++k) {
        x[p][k] = rng.uniform(lo[k], hi[k]);
        v[p][k] = rng.uniform(-1.0, 1.0) * 0.1 * (hi[k] - lo[k]);
      }
      best_x[p] = x[p];
      best_f[p] = quality(x[p]);
      if (best_f[p] > g_f) {
        g_f = best_f[p];
        g_x = x[p];
      }
    }
    for (int it = 0; it < opt.iterations; ++it) {
      for (int p = 0; p < np; ++p) {
        for (int k = 0; k < 3; ++k) {
          const double r1 = rng.uniform(), r2 = rng.uniform();
          v[p][k] = opt.inertia * v[p][k] + opt.cognitive * r1 * (best_x[p][k] - x[p][k]) +
                    opt.social * r2 * (g_x[k] - x[p][k]);
          x[p][k] += v[p][k];
          if (k == 0) {
            // yaw is periodic
            const double span = hi[0] - lo[0];
            x[p][0] = lo[0] + std::fmod(std::fmod(x[p][0] - lo[0], span) + span, span);
          } else if (x[p][k] < lo[k] || x[p][k] > hi[k]) {
            x[p][k] = std::clamp(x[p][k], lo[k], hi[k]);
            v[p][k] = 0.0;
          }
        }
        const double f = quality(x[p]);
        if (f > best_f[p]) {
          best_f[p] = f;
          best_x[p] = x[p];
          if (f > g_f) {
            g_f = f;
            g_x = x[p];
          }
        }
      }
    }
    PsoResult res;
    res.refined = euler_orientation(g_x[0], g_x[1], g_x[2]);
    res.refined_quality = g_f;
    res.grid_index = nearest_orientation(grid, res.refined);
    try {
      res.config = complete_config(grid[res.grid_index], object, g);
      res.quality = grasp_quality(res.config, object, w, g);
    } catch (const ObjectTooWide&) {
      res.config = {object.pose.position, grid[res.grid_index], 0.0};
      res.quality = 0.0;
    }
    out.push_back(res);
  }
  return out;
}

double continuity_score(const UnitQuaternion& candidate, const UnitQuaternion& current) {
  return std::exp(-5.0 * quat_angle(candidate, current));
}

double chopsticks_clearance(const ChopstickPair& pair, const Environment& env,
                            const ChopstickGeometry& g) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 2; ++i) {
    const Capsule c = pair.capsule(i, g);
    best = std::min(best, capsule_halfspace_distance(c, {env.table_height}).distance);
    for (const RigidObject& o : env.objects)
      best = std::min(best, capsule_object_distance(c, o).distance);
  }
  return best;
}

RigidTransform hand_root_for(const ChopstickConfig& config, const GripPose& grip) {
  return config.frame() * grip.chopsticks_in_palm().inverse();
}

std::optional<ArmIkSolution> reach(const ChopstickConfig& config, const GripPose& grip,
                                   const HandModel& model, const ReachOptions& options,
                                   const ChopstickGeometry& g) {
  const Vec3 mid = config.frame().apply(0.5 * upper_tip_local(config.opening, g));
  if (!options.workspace.contains(mid)) return std::nullopt;
  try {
    return arm_ik(hand_root_for(config, grip), model, options.swivel_hint);
  } catch (const Unreachable&) {
    return std::nullopt;
  }
}

std::vector<unsigned char> reachable_mask(const std::vector<ChopstickConfig>& configs,
                                          const GripPose& grip, const HandModel& model,
                                          const ReachOptions& options, const ChopstickGeometry& g,
                                          Exec exec) {
  std::vector<unsigned char> m(configs.size());
  for_each_index(exec, static_cast<int>(configs.size()), [&](int i) {
    m[i] = reach(configs[i], grip, model, options, g).has_value() ? 1 : 0;
  });
  return m;
}

std::vector<int> top_by_quality(const std::vector<double>& quality,
                                const std::vector<double>& continuity, int top_n, int skip) {
  std::vector<int> idx(quality.size());
  std::iota(idx.begin(), idx.end(), 0);
  auto key = [&](int i) { return std::round(quality[i] * 1e9); };
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    const double ka = key(a), kb = key(b);
    if (ka != kb) return ka > kb;
    if (continuity[a] != continuity[b]) return continuity[a] > continuity[b];
    return a < b;
  });
  const int begin = std::min<int>(skip, static_cast<int>(idx.size()));
  const int end = std::min<int>(begin + top_n, static_cast<int>(idx.size()));
  return {idx.begin() + begin, idx.begin() + end};
}

void sort_by_total(std::vector<GraspCandidate>& c) {
  std::stable_sort(c.begin(), c.end(), [](const GraspCandidate& a, const GraspCandidate& b) {
    if (a.total != b.total) return a.total > b.total;
    return a.grid_index < b.grid_index;
  });
}

RankResult rank_grasps(const RigidObject& object, const GripPose& grip, const HandModel& model,
                       const UnitQuaternion& current, const RankOptions& opt) {
  const ChopstickGeometry& g = opt.geometry;
  const std::vector<UnitQuaternion> grid = discretize_orientations(opt.grid_size);
  std::vector<double> quality = score_orientations(grid, object, opt.weights, g, Exec::parallel);
  // Refined swarm results are snapped onto the grid, so the candidate set
  // stays the grid; their snapped scores are already present.
  PsoOptions pso = opt.pso;
  pso.grid_size = opt.grid_size;
  for (const PsoResult& r : pso_refine(object, pso, opt.weights, g))
    quality[r.grid_index] = std::max(quality[r.grid_index], r.quality);

  std::vector<double> continuity(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) continuity[i] = continuity_score(grid[i], current);

  RankResult result;
  for (int skip = 0, batch = 1; skip < static_cast<int>(grid.size()); skip += opt.top_n, ++batch) {
    std::vector<GraspCandidate> cands;
    for (int i : top_by_quality(quality, continuity, opt.top_n, skip)) {
      GraspCandidate c;
      c.grid_index = i;
      c.quality = quality[i];
      c.continuity = continuity[i];
      if (c.quality > 0.0) {
        c.config = complete_config(grid[i], object, g);
        const ChopstickPair pair = chopstick_pair(c.config, g);
        if (chopsticks_clearance(pair, opt.environment, g) >= 0.0)
          c.arm = reach(c.config, grip, model, opt.reach, g);
        if (c.arm && opt.accept && !opt.accept(c.config, *c.arm)) c.arm.reset();
      } else {
        c.config = {object.pose.position, grid[i], 0.0};
      }
      c.reachable = c.arm ? 1.0 : 0.0;
      c.total = c.quality * c.reachable * c.continuity;
      cands.push_back(std::move(c));
    }
    sort_by_total(cands);
    if (!cands.empty() && cands.front().total > 0.0) {
      result.ranked = std::move(cands);
      result.best = result.ranked.front();
      result.batches = batch;
      return result;
    }
  }
  throw NoReachableGrasp("no reachable, collision-free grasp for object '" + object.id + "'");
}

}  // namespace chopsticks
