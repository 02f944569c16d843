#pragma once

#include <vector>

#include <Eigen/Core>
#include <Eigen/Cholesky>

#include "chopsticks/kernels.hpp"

namespace chopsticks {

/// Squared-exponential ARD kernel hyperparameters.
struct GpHyper {
  Eigen::VectorXd lengthscales;   // one per input dimension
  double signal_variance = 1.0;
  double noise_variance = 1e-6;   // added to the kernel diagonal
  double prior_mean = 0.0;
};

struct GpPrediction {
  double mean = 0.0;
  double variance = 0.0;
};

/// Gaussian-process regression with fixed hyperparameters.
class GaussianProcess {
 public:
  GaussianProcess() = default;
  explicit GaussianProcess(GpHyper hyper) : hyper_(std::move(hyper)) {}

  void fit(const std::vector<Eigen::VectorXd>& x, const std::vector<double>& y);
  GpPrediction predict(const Eigen::VectorXd& x) const;
  double log_marginal_likelihood() const { return log_ml_; }
  const GpHyper& hyper() const { return hyper_; }
  int size() const { return static_cast<int>(x_.size()); }

  double kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;

 private:
  GpHyper hyper_;
  std::vector<Eigen::VectorXd> x_;
  Eigen::LLT<Eigen::MatrixXd> chol_;
  Eigen::VectorXd alpha_;
  double log_ml_ = 0.0;
};

// Surrogate for the optimizer: prior mean and signal variance from the
// sample mean and variance of y, noise 1e-6 relative to that variance, and a
// shared lengthscale picked from {0.05, 0.1, 0.2, 0.4, 0.8} by marginal
// likelihood.
GaussianProcess fit_surrogate(const std::vector<Eigen::VectorXd>& x, const std::vector<double>& y);

// mu + sqrt(beta) sigma
double ucb_acquisition(const GaussianProcess& gp, const Eigen::VectorXd& x, double beta);

std::vector<double> ucb_batch(const GaussianProcess& gp, const std::vector<Eigen::VectorXd>& xs,
                              double beta, Exec exec);

// 2 ln(t^2 pi^2 / 0.6), t >= 1.
double ucb_beta(int t);

}  // namespace chopsticks
