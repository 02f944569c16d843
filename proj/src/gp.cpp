#include "chopsticks/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace chopsticks {

double GaussianProcess::kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  const double r2 = ((a - b).array() / hyper_.lengthscales.array()).square().sum();
  return hyper_.signal_variance * std::exp(-0.5 * r2);
}

void GaussianProcess::fit(const std::vector<Eigen::VectorXd>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.empty()) throw std::invalid_argument("GP needs matching, nonempty data");
  for (const auto& xi : x)
    if (xi.size() != hyper_.lengthscales.size())
      throw std::invalid_argument("GP input dimension does not match its lengthscales");
  x_ = x;
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd k(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) k(i, j) = k(j, i) = kernel(x[i], x[j]);
  double jitter = hyper_.noise_variance;
  for (int attempt = 0; attempt < 8; ++attempt) {
    Eigen::MatrixXd kn = k;
    kn.diagonal().array() += jitter;
    chol_.compute(kn);
    if (chol_.info() == Eigen::Success) break;
    jitter *= 10.0;
  }
  Eigen::VectorXd r(n);
  for (int i = 0; i < n; ++i) r[i] = y[i] - hyper_.prior_mean;
  alpha_ = chol_.solve(r);
  const Eigen::MatrixXd l = chol_.matrixL();
  log_ml_ = -0.5 * r.dot(alpha_) - l.diagonal().array().log().sum() -
            0.5 * n * std::log(2.0 * std::numbers::pi);
}

GpPrediction GaussianProcess::predict(const Eigen::VectorXd& x) const {
  if (x_.empty()) return {hyper_.prior_mean, hyper_.signal_variance};
  const int n = static_cast<int>(x_.size());
  Eigen::VectorXd ks(n);
  for (int i = 0; i < n; ++i) ks[i] = kernel(x, x_[i]);
  const double mean = hyper_.prior_mean + ks.dot(alpha_);
  const Eigen::VectorXd v = chol_.matrixL().solve(ks);
  const double var = std::max(0.0, hyper_.signal_variance - v.squaredNorm());
  return {mean, var};
}

GaussianProcess fit_surrogate(const std::vector<Eigen::VectorXd>& x, const std::vector<double>& y) {
  if (x.empty()) throw std::invalid_argument("surrogate needs at least one observation");
  const int n = static_cast<int>(y.size());
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : y) var += (v - mean) * (v - mean);
  var = n > 1 ? var / (n - 1) : 0.0;
  if (!(var > 1e-12)) var = 1.0;

  GaussianProcess best;
  double best_ml = -std::numeric_limits<double>::infinity();
  for (double ell : {0.05, 0.1, 0.2, 0.4, 0.8}) {
    GpHyper h;
    h.lengthscales = Eigen::VectorXd::Constant(x.front().size(), ell);
    h.signal_variance = var;
    h.noise_variance = 1e-6 * var;
    h.prior_mean = mean;
    GaussianProcess gp(h);
    gp.fit(x, y);
    if (gp.log_marginal_likelihood() > best_ml) {
      best_ml = gp.log_marginal_likelihood();
      best = std::move(gp);
    }
  }
  return best;
}

double ucb_acquisition(const GaussianProcess& gp, const Eigen::VectorXd& x, double beta) {
  const GpPrediction p = gp.predict(x);
  return p.mean + std::sqrt(beta) * std::sqrt(p.variance);
}

std::vector<double> ucb_batch(const GaussianProcess& gp, const std::vector<Eigen::VectorXd>& xs,
                              double beta, Exec exec) {
  std::vector<double> out(xs.size());
  for_each_index(exec, static_cast<int>(xs.size()),
                 [&](int i) { out[i] = ucb_acquisition(gp, xs[i], beta); });
  return out;
}

double ucb_beta(int t) {
  const double pi = std::numbers::pi;
  return 2.0 * std::log(static_cast<double>(t) * t * pi * pi / 0.6);
}

}  // namespace chopsticks
