#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace chopsticks {

// Morphology, pose, scene, task and trajectory files that fail validation.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Grip IK could not place every contacting fingertip on its contact point.
class InfeasibleContact : public std::runtime_error {
 public:
  InfeasibleContact(const std::string& what, std::vector<double> residuals,
                    double max_penetration)
      : std::runtime_error(what),
        residuals_(std::move(residuals)),
        max_penetration_(max_penetration) {}
  const std::vector<double>& residuals() const { return residuals_; }
  double max_penetration() const { return max_penetration_; }

 private:
  std::vector<double> residuals_;
  double max_penetration_;
};

class NoFeasibleGrip : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ObjectTooWide : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoReachableGrasp : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Unreachable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PlanningFailure : public std::runtime_error {
 public:
  PlanningFailure(const std::string& what, double worst_penetration)
      : std::runtime_error(what), worst_penetration_(worst_penetration) {}
  double worst_penetration() const { return worst_penetration_; }

 private:
  double worst_penetration_;
};

class ThrowInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace chopsticks
