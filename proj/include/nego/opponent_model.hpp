#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "nego/domain.hpp"
#include "nego/rng.hpp"

namespace nego {

/// Gaussian density N(x | mu, sigma).
inline double normal_pdf(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

/// Triangular evaluator with peak n, 1-based option index l, issue size K.
inline double triangular_eval(std::size_t K, std::size_t n, std::size_t l) {
  if (n < 1 || n > K || l < 1 || l > K) throw PreconditionError("triangular_eval index out of range");
  if (l == n) return 1.0;
  if (l < n) return static_cast<double>(l - 1) / static_cast<double>(n - 1);
  return static_cast<double>(K - (l - 1)) / static_cast<double>(K - (n - 1));
}

inline constexpr double kLikelihoodFloor = 1e-300;

/**
 * Multiplies probs by the likelihood factors and renormalizes. Factors are
 * floored at 1e-300; if the product still vanishes everywhere the vector is
 * reset to uniform and true is returned.
 */
inline bool bayes_rescale(std::vector<double>& probs, const std::vector<double>& lik) {
  double s = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    probs[i] *= std::max(lik[i], kLikelihoodFloor);
    s += probs[i];
  }
  if (!(s > 0.0) || !std::isfinite(s)) {
    std::fill(probs.begin(), probs.end(), 1.0 / static_cast<double>(probs.size()));
    return true;
  }
  for (double& p : probs) p /= s;
  return false;
}

/// Estimated opponent utility over the offer space.
class OpponentModel {
 public:
  virtual ~OpponentModel() = default;
  virtual void begin(const NegotiationDomain& d, int self) {
    domain_ = &d;
    self_ = self;
    dirty_ = true;
  }
  /// A proposal by the opponent observed at time t.
  virtual void observe(std::size_t offer, double t, double deadline) = 0;
  /// Estimated opponent utility of every offer, indexed by flat offer index.
  const std::vector<double>& estimates() {
    if (dirty_) {
      cache_ = compute();
      dirty_ = false;
    }
    return cache_;
  }
  double estimate(std::size_t offer) { return estimates()[offer]; }
  virtual std::string name() const = 0;

 protected:
  virtual std::vector<double> compute() const = 0;
  void touch() { dirty_ = true; }
  const NegotiationDomain* domain_ = nullptr;
  int self_ = 1;

 private:
  std::vector<double> cache_;
  bool dirty_ = true;
};

/// Peeks at the true opponent utility and adds fixed seeded noise per offer.
class DummyModel : public OpponentModel {
 public:
  explicit DummyModel(double noise = 0.0, std::uint64_t seed = 0) : noise_(noise), seed_(seed) {}
  void begin(const NegotiationDomain& d, int self) override {
    OpponentModel::begin(d, self);
    Rng rng(mix64(seed_));
    std::normal_distribution<double> N(0.0, 1.0);
    values_ = d.table(3 - self);
    if (noise_ > 0.0)
      for (double& v : values_) v += noise_ * N(rng);
  }
  void observe(std::size_t, double, double) override {}
  std::string name() const override { return "dummy"; }

 protected:
  std::vector<double> compute() const override { return values_; }

 private:
  double noise_;
  std::uint64_t seed_;
  std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// Full Bayesian learning over an explicit hypothesis set

struct HypothesisSet {
  std::vector<LinearUtility> hypotheses;
  std::vector<double> priors;
};

/**
 * Every combination of per-issue weight (from the grid) and triangular peak.
 * The weights are not renormalized across issues.
 */
inline HypothesisSet triangular_hypotheses(const OfferSpace& space, const std::vector<double>& weight_grid,
                                           std::size_t limit = 100000) {
  const std::size_t p = space.num_issues();
  double count = 1.0;
  for (std::size_t j = 0; j < p; ++j) count *= static_cast<double>(weight_grid.size() * space.issue_size(j));
  if (count > static_cast<double>(limit))
    throw PreconditionError("hypothesis set too large for full Bayes (" + std::to_string(count) +
                            "); use scalable_bayes");
  HypothesisSet hs;
  std::vector<std::size_t> wi(p, 0), peak(p, 1);
  while (true) {
    LinearUtility h;
    for (std::size_t j = 0; j < p; ++j) {
      h.weights.push_back(weight_grid[wi[j]]);
      std::vector<double> ev(space.issue_size(j));
      for (std::size_t l = 1; l <= ev.size(); ++l) ev[l - 1] = triangular_eval(ev.size(), peak[j], l);
      h.evaluations.push_back(std::move(ev));
    }
    hs.hypotheses.push_back(std::move(h));
    std::size_t j = p;
    while (j-- > 0) {
      if (++peak[j] <= space.issue_size(j)) break;
      peak[j] = 1;
      if (++wi[j] < weight_grid.size()) break;
      wi[j] = 0;
    }
    if (j == static_cast<std::size_t>(-1)) break;
  }
  hs.priors.assign(hs.hypotheses.size(), 1.0 / static_cast<double>(hs.hypotheses.size()));
  return hs;
}

inline std::vector<double> default_weight_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 10; ++i) g.push_back(i / 10.0);
  return g;
}

struct BayesPosterior {
  std::vector<double> probs;
  double c = 1.0;
  double sigma = 0.15;
  bool underflow_reset = false;
};

/// One step of Bayesian learning: weight each hypothesis by N(u(w) | 1 - c t/T, sigma).
inline void bayes_update(BayesPosterior& post, const HypothesisSet& hs, const Offer& received, double t,
                         double deadline) {
  if (t > deadline) throw PreconditionError("observation after the deadline");
  if (post.probs.empty()) post.probs = hs.priors;
  const double mu = 1.0 - post.c * (std::isinf(deadline) ? 0.0 : t / deadline);
  std::vector<double> lik(hs.hypotheses.size());
  for (std::size_t i = 0; i < lik.size(); ++i) lik[i] = normal_pdf(hs.hypotheses[i](received), mu, post.sigma);
  post.underflow_reset = bayes_rescale(post.probs, lik) || post.underflow_reset;
}

inline double bayes_expected_utility(const BayesPosterior& post, const HypothesisSet& hs, const Offer& o) {
  double u = 0.0;
  for (std::size_t i = 0; i < hs.hypotheses.size(); ++i) u += post.probs[i] * hs.hypotheses[i](o);
  return u;
}

class BayesModel : public OpponentModel {
 public:
  BayesModel(double c = 1.0, double sigma = 0.15, std::vector<double> grid = default_weight_grid())
      : grid_(std::move(grid)) {
    post_.c = c;
    post_.sigma = sigma;
  }
  void begin(const NegotiationDomain& d, int self) override {
    OpponentModel::begin(d, self);
    hs_ = triangular_hypotheses(d.space(), grid_);
    post_.probs = hs_.priors;
    offers_.clear();
    for (std::size_t k = 0; k < d.size(); ++k) offers_.push_back(d.space().offer_at(k));
  }
  void observe(std::size_t offer, double t, double deadline) override {
    bayes_update(post_, hs_, offers_[offer], std::min(t, deadline), deadline);
    touch();
  }
  const BayesPosterior& posterior() const { return post_; }
  const HypothesisSet& hypotheses() const { return hs_; }
  std::string name() const override { return "bayes"; }

 protected:
  std::vector<double> compute() const override {
    std::vector<double> out(offers_.size(), 0.0);
    for (std::size_t i = 0; i < hs_.hypotheses.size(); ++i) {
      for (std::size_t k = 0; k < offers_.size(); ++k) out[k] += post_.probs[i] * hs_.hypotheses[i](offers_[k]);
    }
    return out;
  }

 private:
  std::vector<double> grid_;
  HypothesisSet hs_;
  BayesPosterior post_;
  std::vector<Offer> offers_;
};

// ---------------------------------------------------------------------------
// Scalable Bayesian learning: independent posteriors per issue

struct ScalablePosterior {
  struct PerIssue {
    std::vector<double> weight_hyps;
    std::vector<double> weight_probs;
    std::vector<std::vector<double>> eval_hyps;  // [hyp][option]
    std::vector<double> eval_probs;
  };
  std::vector<PerIssue> issues;
  double c = 1.0;
  double sigma = 0.15;
  bool underflow_reset = false;

  double expected_weight(std::size_t j) const {
    double s = 0.0;
    for (std::size_t i = 0; i < issues[j].weight_hyps.size(); ++i)
      s += issues[j].weight_probs[i] * issues[j].weight_hyps[i];
    return s;
  }
  double expected_eval(std::size_t j, int option) const {
    double s = 0.0;
    for (std::size_t i = 0; i < issues[j].eval_hyps.size(); ++i)
      s += issues[j].eval_probs[i] * issues[j].eval_hyps[i][option];
    return s;
  }
};

/// Uniform per-issue posteriors over the weight grid and all triangular peaks.
inline ScalablePosterior make_scalable_posterior(const OfferSpace& space, const std::vector<double>& weight_grid,
                                                 double c = 1.0, double sigma = 0.15) {
  ScalablePosterior s;
  s.c = c;
  s.sigma = sigma;
  for (std::size_t j = 0; j < space.num_issues(); ++j) {
    ScalablePosterior::PerIssue pi;
    pi.weight_hyps = weight_grid;
    pi.weight_probs.assign(weight_grid.size(), 1.0 / static_cast<double>(weight_grid.size()));
    const std::size_t K = space.issue_size(j);
    for (std::size_t n = 1; n <= K; ++n) {
      std::vector<double> ev(K);
      for (std::size_t l = 1; l <= K; ++l) ev[l - 1] = triangular_eval(K, n, l);
      pi.eval_hyps.push_back(std::move(ev));
    }
    pi.eval_probs.assign(K, 1.0 / static_cast<double>(K));
    s.issues.push_back(std::move(pi));
  }
  return s;
}

/**
 * One scalable update. All expectations are taken from the state before the
 * update; each issue's weight and evaluator posteriors are then rescaled by the
 * likelihood of the utility obtained when only that one component is swapped
 * for the hypothesis.
 */
inline void scalable_update(ScalablePosterior& s, const Offer& received, double t, double deadline) {
  if (t > deadline) throw PreconditionError("observation after the deadline");
  const std::size_t p = s.issues.size();
  const double mu = 1.0 - s.c * (std::isinf(deadline) ? 0.0 : t / deadline);
  std::vector<double> ew(p), ev(p);
  double total = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    ew[j] = s.expected_weight(j);
    ev[j] = s.expected_eval(j, received[j]);
    total += ew[j] * ev[j];
  }
  for (std::size_t j = 0; j < p; ++j) {
    auto& pi = s.issues[j];
    const double rest = total - ew[j] * ev[j];
    std::vector<double> lw(pi.weight_hyps.size()), le(pi.eval_hyps.size());
    for (std::size_t i = 0; i < lw.size(); ++i) lw[i] = normal_pdf(rest + pi.weight_hyps[i] * ev[j], mu, s.sigma);
    for (std::size_t i = 0; i < le.size(); ++i)
      le[i] = normal_pdf(rest + ew[j] * pi.eval_hyps[i][received[j]], mu, s.sigma);
    bool r1 = bayes_rescale(pi.weight_probs, lw);
    bool r2 = bayes_rescale(pi.eval_probs, le);
    s.underflow_reset = s.underflow_reset || r1 || r2;
  }
}

inline double scalable_expected_utility(const ScalablePosterior& s, const Offer& o) {
  double u = 0.0;
  for (std::size_t j = 0; j < s.issues.size(); ++j) u += s.expected_weight(j) * s.expected_eval(j, o[j]);
  return u;
}

class ScalableBayesModel : public OpponentModel {
 public:
  ScalableBayesModel(double c = 1.0, double sigma = 0.15, std::vector<double> grid = default_weight_grid())
      : c_(c), sigma_(sigma), grid_(std::move(grid)) {}
  void begin(const NegotiationDomain& d, int self) override {
    OpponentModel::begin(d, self);
    state_ = make_scalable_posterior(d.space(), grid_, c_, sigma_);
  }
  void observe(std::size_t offer, double t, double deadline) override {
    scalable_update(state_, domain_->space().offer_at(offer), std::min(t, deadline), deadline);
    touch();
  }
  const ScalablePosterior& state() const { return state_; }
  std::string name() const override { return "scalable_bayes"; }

 protected:
  std::vector<double> compute() const override {
    const auto& sp = domain_->space();
    std::vector<double> out(sp.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = scalable_expected_utility(state_, sp.offer_at(k));
    return out;
  }

 private:
  double c_, sigma_;
  std::vector<double> grid_;
  ScalablePosterior state_;
};

// ---------------------------------------------------------------------------
// Frequency analysis

struct FrequencyState {
  std::vector<std::vector<long>> counts;  // [issue][option]
  long num_rec = 0;
};

inline FrequencyState make_frequency_state(const OfferSpace& space) {
  FrequencyState f;
  for (std::size_t j = 0; j < space.num_issues(); ++j) f.counts.emplace_back(space.issue_size(j), 0L);
  return f;
}

inline void frequency_update(FrequencyState& f, const Offer& received) {
  for (std::size_t j = 0; j < f.counts.size(); ++j) ++f.counts[j][received[j]];
  ++f.num_rec;
}

struct FrequencyEstimates {
  std::vector<double> raw_weights;  // before renormalization
  LinearUtility utility;            // renormalized weights, relative-frequency evaluations
};

inline FrequencyEstimates frequency_estimates(const FrequencyState& f) {
  FrequencyEstimates e;
  const std::size_t p = f.counts.size();
  for (std::size_t j = 0; j < p; ++j) {
    const std::size_t K = f.counts[j].size();
    std::vector<double> v(K);
    double wmax = 0.0;
    for (std::size_t l = 0; l < K; ++l) {
      v[l] = f.num_rec == 0 ? 1.0 / static_cast<double>(K)
                            : static_cast<double>(f.counts[j][l]) / static_cast<double>(f.num_rec);
      wmax = std::max(wmax, v[l]);
    }
    e.raw_weights.push_back(f.num_rec == 0 ? 1.0 / static_cast<double>(p) : wmax);
    e.utility.evaluations.push_back(std::move(v));
  }
  double s = 0.0;
  for (double w : e.raw_weights) s += w;
  for (double w : e.raw_weights) e.utility.weights.push_back(w / s);
  return e;
}

class FrequencyModel : public OpponentModel {
 public:
  void begin(const NegotiationDomain& d, int self) override {
    OpponentModel::begin(d, self);
    state_ = make_frequency_state(d.space());
  }
  void observe(std::size_t offer, double, double) override {
    frequency_update(state_, domain_->space().offer_at(offer));
    touch();
  }
  const FrequencyState& state() const { return state_; }
  std::string name() const override { return "frequency"; }

 protected:
  std::vector<double> compute() const override {
    auto est = frequency_estimates(state_);
    const auto& sp = domain_->space();
    std::vector<double> out(sp.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = est.utility(sp.offer_at(k));
    return out;
  }

 private:
  FrequencyState state_;
};

}  // namespace nego
