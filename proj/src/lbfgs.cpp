#include "chopsticks/lbfgs.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

namespace chopsticks {

using Eigen::VectorXd;

namespace {

// Zero the components whose descent would leave the box.
VectorXd projected_gradient(const VectorXd& x, const VectorXd& g, const VectorXd& lo,
                            const VectorXd& hi) {
  VectorXd pg = g;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if ((x[i] <= lo[i] && g[i] > 0.0) || (x[i] >= hi[i] && g[i] < 0.0)) pg[i] = 0.0;
  return pg;
}

}  // namespace

LbfgsResult minimize_lbfgs_box(const Objective& f, const VectorXd& x0, const VectorXd& lower,
                               const VectorXd& upper, const LbfgsOptions& opt) {
  const Eigen::Index n = x0.size();
  if (lower.size() != n || upper.size() != n)
    throw std::invalid_argument("bounds do not match the variable count");
  LbfgsResult r;
  r.x = x0.cwiseMax(lower).cwiseMin(upper);
  VectorXd g(n);
  r.value = f(r.x, g);
  std::deque<std::pair<VectorXd, VectorXd>> mem;  // (s, y)

  for (r.iterations = 0; r.iterations < opt.max_iterations; ++r.iterations) {
    const VectorXd pg = projected_gradient(r.x, g, lower, upper);
    if (pg.norm() < opt.gradient_tolerance) {
      r.converged = true;
      break;
    }
    VectorXd mask = VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) mask[i] = pg[i] != 0.0 ? 1.0 : 0.0;

    // Two-loop recursion on the free subspace.
    VectorXd q = pg;
    std::vector<double> alpha(mem.size());
    for (int k = static_cast<int>(mem.size()) - 1; k >= 0; --k) {
      const VectorXd s = mem[k].first.cwiseProduct(mask);
      const VectorXd y = mem[k].second.cwiseProduct(mask);
      const double sy = s.dot(y);
      if (sy <= 1e-300) {
        alpha[k] = 0.0;
        continue;
      }
      alpha[k] = s.dot(q) / sy;
      q -= alpha[k] * y;
    }
    if (!mem.empty()) {
      const VectorXd s = mem.back().first.cwiseProduct(mask);
      const VectorXd y = mem.back().second.cwiseProduct(mask);
      const double yy = y.squaredNorm();
      if (yy > 1e-300 && s.dot(y) > 0.0) q *= s.dot(y) / yy;
    } else {
      q /= std::max(1.0, pg.norm());
    }
    for (size_t k = 0; k < mem.size(); ++k) {
      const VectorXd s = mem[k].first.cwiseProduct(mask);
      const VectorXd y = mem[k].second.cwiseProduct(mask);
      const double sy = s.dot(y);
      if (sy <= 1e-300) continue;
      const double beta = y.dot(q) / sy;
      q += (alpha[k] - beta) * s;
    }
    VectorXd d = -q.cwiseProduct(mask);
    if (d.dot(pg) >= 0.0) {
      d = -pg / std::max(1.0, pg.norm());
      mem.clear();
    }

    // Backtracking along the projected path.
    double step = 1.0;
    VectorXd x_new(n), g_new(n);
    double f_new = r.value;
    bool accepted = false;
    for (int ls = 0; ls < 50; ++ls) {
      x_new = (r.x + step * d).cwiseMax(lower).cwiseMin(upper);
      f_new = f(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= r.value + 1e-4 * g.dot(x_new - r.x)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (mem.empty()) break;  // no descent even along the projected gradient
      mem.clear();
      continue;
    }
    const VectorXd s = x_new - r.x;
    const VectorXd y = g_new - g;
    if (s.dot(y) > 1e-12 * s.squaredNorm()) {
      mem.emplace_back(s, y);
      if (static_cast<int>(mem.size()) > opt.memory) mem.pop_front();
    }
    const bool stalled = s.squaredNorm() == 0.0;
    r.x = x_new;
    r.value = f_new;
    g = g_new;
    if (stalled) break;
  }
  return r;
}

}  // namespace chopsticks
