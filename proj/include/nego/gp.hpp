#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace nego {

/// Matern 3/2 kernel with optional diagonal noise.
struct MaternKernel {
  double length_scale = 1.0;
  double variance = 0.04;
  double noise = 1e-8;  // added to the diagonal of the training covariance

  double operator()(double a, double b) const {
    const double r = std::sqrt(3.0) * std::abs(a - b) / length_scale;
    return variance * (1.0 + r) * std::exp(-r);
  }
};

struct GpObservation {
  double t;
  double z;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/**
 * Keeps the highest-z observation of each window [k*w, (k+1)*w). A window of
 * zero or less disables the filter. Output is sorted by time.
 */
inline std::vector<GpObservation> window_best(std::vector<GpObservation> obs, double window) {
  std::stable_sort(obs.begin(), obs.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
  if (!(window > 0.0) || !std::isfinite(window)) return obs;
  std::vector<GpObservation> out;
  long cur = std::numeric_limits<long>::min();
  for (const auto& o : obs) {
    const long k = static_cast<long>(std::floor(o.t / window));
    if (out.empty() || k != cur) {
      out.push_back(o);
      cur = k;
    } else if (o.z > out.back().z) {
      out.back() = o;
    }
  }
  return out;
}

/**
 * Gaussian-process predictor of the utility (for us) of the opponent's next
 * proposal as a function of time. Constant prior mean equal to the mean of the
 * windowed observations, or 0.5 without any.
 */
class GpPredictor {
 public:
  GpPredictor() = default;
  GpPredictor(MaternKernel k, double window) : kernel_(k), window_(window) {}

  void fit(const std::vector<GpObservation>& raw) {
    obs_ = window_best(raw, window_);
    const auto n = static_cast<Eigen::Index>(obs_.size());
    mean_ = 0.5;
    if (n == 0) return;
    double s = 0.0;
    for (const auto& o : obs_) s += o.z;
    mean_ = s / static_cast<double>(n);
    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) K(i, j) = kernel_(obs_[i].t, obs_[j].t);
    K.diagonal().array() += kernel_.noise;
    ldlt_.compute(K);
    if (ldlt_.info() != Eigen::Success || !ldlt_.isPositive()) throw NumericalError("GP covariance not positive definite");
    Eigen::VectorXd r(n);
    for (Eigen::Index i = 0; i < n; ++i) r(i) = obs_[i].z - mean_;
    alpha_ = ldlt_.solve(r);
  }

  /// Posterior mean and standard deviation of the latent function at t.
  std::pair<double, double> predict(double t) const {
    const auto n = static_cast<Eigen::Index>(obs_.size());
    const double prior = kernel_(t, t);
    if (n == 0) return {mean_, std::sqrt(prior)};
    Eigen::VectorXd k(n);
    for (Eigen::Index i = 0; i < n; ++i) k(i) = kernel_(obs_[i].t, t);
    const double mu = mean_ + k.dot(alpha_);
    const double var = std::max(0.0, prior - k.dot(ldlt_.solve(k)));
    return {mu, std::sqrt(var)};
  }

  const std::vector<GpObservation>& observations() const { return obs_; }
  double prior_mean() const { return mean_; }
  const MaternKernel& kernel() const { return kernel_; }

 private:
  MaternKernel kernel_{};
  double window_ = 0.0;
  std::vector<GpObservation> obs_;
  double mean_ = 0.5;
  Eigen::LDLT<Eigen::MatrixXd> ldlt_;
  Eigen::VectorXd alpha_;
};

/// Probability that the opponent accepts an offer worth z to us: 1 - Phi((z - mean)/std).
inline double acceptance_probability(double mean, double sd, double z) {
  if (sd <= 0.0) return z < mean ? 1.0 : (z == mean ? 0.5 : 0.0);
  return 0.5 * std::erfc((z - mean) / (sd * std::sqrt(2.0)));
}

inline double acceptance_probability(const GpPredictor& gp, double z, double t_query) {
  auto [m, s] = gp.predict(t_query);
  return acceptance_probability(m, s, z);
}

/// Grid argmax of b * P_acc(b); ties go to the larger b.
inline double optimal_target(const GpPredictor& gp, double t_query, const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("empty candidate grid");
  auto [m, s] = gp.predict(t_query);
  double best = grid.front();
  double best_val = -std::numeric_limits<double>::infinity();
  for (double b : grid) {
    const double v = b * acceptance_probability(m, s, b);
    if (v > best_val || (v == best_val && b > best)) {
      best = b;
      best_val = v;
    }
  }
  return best;
}

}  // namespace nego
