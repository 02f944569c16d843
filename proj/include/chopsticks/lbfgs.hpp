#pragma once

#include <functional>

#include <Eigen/Core>

namespace chopsticks {

// Returns f(x) and writes the gradient.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

struct LbfgsOptions {
  int max_iterations = 500;
  double gradient_tolerance = 1e-8;  // on the projected gradient norm
  int memory = 10;
};

struct LbfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;  // projected gradient below tolerance
};

/// Limited-memory BFGS with box constraints handled by projection: the
/// two-loop direction is restricted to variables not held at an active bound
/// and every trial point is clamped to [lower, upper]. Deterministic.
LbfgsResult minimize_lbfgs_box(const Objective& f, const Eigen::VectorXd& x0,
                               const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                               const LbfgsOptions& options = {});

}  // namespace chopsticks
