#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nego/domain.hpp"
#include "nego/gp.hpp"
#include "nego/opponent_model.hpp"
#include "nego/protocol.hpp"

namespace nego {

// ---------------------------------------------------------------------------
// Aspiration

struct AspirationFunction {
  double alpha = 1.0;
  double target = 0.0;  // beta
  double gamma = 0.2;
  double deadline = 1.0;
  std::optional<double> target_time;  // T', defaults to the deadline

  void check() const {
    if (!(gamma > 0.0)) throw ConfigError("aspiration gamma must be > 0");
    if (alpha < target) throw ConfigError("aspiration alpha must not be below the target");
    if (target_time && *target_time > deadline) throw ConfigError("target time must not exceed the deadline");
  }
};

/**
 * (alpha - beta)(1 - gamma^(1 - t/T'))/(1 - gamma) + beta before T', beta
 * after. gamma == 1 uses the linear limit. Endpoints are returned exactly.
 */
inline double aspiration_value(const AspirationFunction& f, double t) {
  if (t < 0.0 || t > f.deadline) throw std::out_of_range("aspiration queried outside [0, T]");
  const double tp = f.target_time.value_or(f.deadline);
  if (t == 0.0) return f.alpha;
  if (std::isinf(tp)) return f.alpha;
  if (t >= tp) return f.target;
  const double x = 1.0 - t / tp;
  double frac;
  if (f.gamma == 1.0) frac = x;
  else frac = std::expm1(x * std::log(f.gamma)) / (f.gamma - 1.0);
  return (f.alpha - f.target) * frac + f.target;
}

// ---------------------------------------------------------------------------
// Acceptance

struct AcceptanceRule {
  enum class Kind { ac_next, ac_asp, ac_low } kind = Kind::ac_next;
  double a = 1.0;
  double b = 0.0;
};

/**
 * a*u_rec + b compared against the rule's threshold. ac_low uses the strict
 * inequality against min(u over proposed and next); the others are >=.
 */
inline bool decide_accept(const AcceptanceRule& r, double u_received, double u_next,
                          std::optional<double> asp_now = std::nullopt,
                          std::optional<double> min_proposed_utility = std::nullopt) {
  const double lhs = r.a * u_received + r.b;
  switch (r.kind) {
    case AcceptanceRule::Kind::ac_next:
      return lhs >= u_next;
    case AcceptanceRule::Kind::ac_asp:
      if (!asp_now) throw ConfigError("ac_asp needs an aspiration level");
      return lhs >= *asp_now;
    case AcceptanceRule::Kind::ac_low:
      if (!min_proposed_utility) throw ConfigError("ac_low needs the minimum proposed utility");
      return lhs > std::min(*min_proposed_utility, u_next);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Shared bidding helpers. Offers are flat indices; ties go to the lowest index.

enum class BidMode { max_opponent, min_own };

/// Own-utility-maximal element of a list, or the global maximizer when empty.
inline std::size_t best_of(const std::vector<double>& own, const std::vector<std::size_t>& list) {
  if (list.empty()) return static_cast<std::size_t>(std::max_element(own.begin(), own.end()) - own.begin());
  std::size_t best = list.front();
  for (auto i : list)
    if (own[i] > own[best] || (own[i] == own[best] && i < best)) best = i;
  return best;
}

/**
 * Time-based choice among {u1 >= asp, not yet proposed}. `opp` may be null in
 * min_own mode. Falls back to the best already-proposed offer.
 */
inline std::size_t select_bid_timebased(const std::vector<double>& own, const std::vector<char>& proposed,
                                        const std::vector<std::size_t>& proposed_list,
                                        const std::vector<double>* opp, double asp, BidMode mode) {
  std::optional<std::size_t> pick;
  for (std::size_t i = 0; i < own.size(); ++i) {
    if (own[i] < asp || proposed[i]) continue;
    if (!pick) {
      pick = i;
      continue;
    }
    if (mode == BidMode::max_opponent) {
      if ((*opp)[i] > (*opp)[*pick]) pick = i;
    } else if (own[i] < own[*pick]) {
      pick = i;
    }
  }
  return pick ? *pick : best_of(own, proposed_list);
}

inline double adaptive_target(double estimated_optimal, double safety, double minimum_target) {
  return std::max(estimated_optimal + safety, minimum_target);
}

struct OptimalOfferEstimate {
  std::size_t offer = 0;
  bool fallback = false;
};

/// argmax u1 over {u2_hat >= beta2_hat}; if empty, the u2_hat maximizer (flagged).
inline OptimalOfferEstimate estimate_optimal_offer(const std::vector<double>& own, const std::vector<double>& opp,
                                                   double beta2_hat) {
  std::optional<std::size_t> pick;
  for (std::size_t i = 0; i < own.size(); ++i)
    if (opp[i] >= beta2_hat && (!pick || own[i] > own[*pick])) pick = i;
  if (pick) return {*pick, false};
  return {static_cast<std::size_t>(std::max_element(opp.begin(), opp.end()) - opp.begin()), true};
}

/// Rec \ Pro's best offer replaces `chosen` when it is at least as good for us.
inline std::size_t repropose_filter(const std::vector<double>& own, const std::vector<char>& proposed,
                                    const std::vector<std::size_t>& received_list, std::size_t chosen) {
  std::optional<std::size_t> rep;
  for (auto i : received_list)
    if (!proposed[i] && (!rep || own[i] > own[*rep] || (own[i] == own[*rep] && i < *rep))) rep = i;
  if (rep && own[*rep] >= own[chosen]) return *rep;
  return chosen;
}

// ---------------------------------------------------------------------------
// Tit-for-tat concession measures

enum class ConcessionBasis { own_utility, opponent_estimate, count, relative };

struct TftConfig {
  ConcessionBasis measure_self = ConcessionBasis::own_utility;
  ConcessionBasis measure_opponent = ConcessionBasis::own_utility;
  double e_min = 0.0;
  std::optional<double> e_max;
  enum class Selector { own_max, opponent_max } selector = Selector::own_max;
};

/// Everything the concession measures read.
struct TftView {
  const std::vector<double>& own;
  const std::vector<double>* opp = nullptr;  // estimated opponent utility
  std::optional<std::size_t> ideal;          // for relative measures
};

namespace detail {

inline double opp_at(const TftView& v, std::size_t i) {
  if (!v.opp) throw ConfigError("opponent-estimate concession measure needs an opponent model");
  return (*v.opp)[i];
}

// per-offer contribution to e1 (our concession)
inline double e1_term(const TftView& v, ConcessionBasis b, std::size_t i) {
  const double umax = *std::max_element(v.own.begin(), v.own.end());
  switch (b) {
    case ConcessionBasis::own_utility:
      return umax - v.own[i];
    case ConcessionBasis::opponent_estimate: {
      const double x = opp_at(v, i);
      return x - *std::min_element(v.opp->begin(), v.opp->end());
    }
    case ConcessionBasis::relative: {
      if (!v.ideal) throw ConfigError("relative concession needs an ideal offer");
      const double den = umax - v.own[*v.ideal];
      if (!(den != 0.0)) throw ConfigError("relative concession: ideal offer equals the best offer");
      return (umax - v.own[i]) / den;
    }
    case ConcessionBasis::count:
      break;
  }
  return 0.0;
}

// per-offer contribution to e2 (opponent concession)
inline double e2_term(const TftView& v, ConcessionBasis b, std::size_t i) {
  const double umin = *std::min_element(v.own.begin(), v.own.end());
  switch (b) {
    case ConcessionBasis::own_utility:
      return v.own[i] - umin;
    case ConcessionBasis::opponent_estimate: {
      const double x = opp_at(v, i);
      return *std::max_element(v.opp->begin(), v.opp->end()) - x;
    }
    case ConcessionBasis::relative: {
      if (!v.ideal) throw ConfigError("relative concession needs an ideal offer");
      const double den = v.own[*v.ideal] - umin;
      if (!(den != 0.0)) throw ConfigError("relative concession: ideal offer equals the worst offer");
      return (v.own[i] - umin) / den;
    }
    case ConcessionBasis::count:
      break;
  }
  return 0.0;
}

}  // namespace detail

/// e1 over a set of distinct offers; 0 for the empty set.
inline double tft_e1(const TftView& v, ConcessionBasis b, const std::vector<std::size_t>& pro) {
  if (b == ConcessionBasis::count) return static_cast<double>(pro.size());
  double e = 0.0;
  for (auto i : pro) e = std::max(e, detail::e1_term(v, b, i));
  return e;
}

inline double tft_e2(const TftView& v, ConcessionBasis b, const std::vector<std::size_t>& rec) {
  if (b == ConcessionBasis::count) return static_cast<double>(rec.size());
  double e = 0.0;
  for (auto i : rec) e = std::max(e, detail::e2_term(v, b, i));
  return e;
}

/// e1(Pro u {w}) - e2(Rec). Both lists hold distinct offers.
inline double tft_concession_gain(const TftConfig& cfg, const TftView& v, const std::vector<std::size_t>& pro,
                                  const std::vector<std::size_t>& rec, std::size_t candidate) {
  double e1;
  if (cfg.measure_self == ConcessionBasis::count) {
    const bool fresh = std::find(pro.begin(), pro.end(), candidate) == pro.end();
    e1 = static_cast<double>(pro.size() + (fresh ? 1 : 0));
  } else {
    e1 = std::max(tft_e1(v, cfg.measure_self, pro), detail::e1_term(v, cfg.measure_self, candidate));
  }
  return e1 - tft_e2(v, cfg.measure_opponent, rec);
}

/**
 * Selfish: argmax u1 over {gain > e_min, u1 > r}. Altruistic: argmax u2_hat
 * over {gain in (e_min, e_max), u1 > r}. No candidate: repeat our best
 * earlier proposal.
 */
inline std::size_t tft_select_bid(const TftConfig& cfg, const TftView& v, const std::vector<std::size_t>& pro,
                                  const std::vector<std::size_t>& rec, double reservation) {
  // e1(Pro) and e2(Rec) are fixed for this turn; only the candidate term varies
  const bool count = cfg.measure_self == ConcessionBasis::count;
  const double e1_pro = tft_e1(v, cfg.measure_self, pro);
  const double e2_rec = tft_e2(v, cfg.measure_opponent, rec);
  std::vector<char> in_pro;
  if (count) {
    in_pro.assign(v.own.size(), 0);
    for (auto i : pro) in_pro[i] = 1;
  }
  std::optional<std::size_t> pick;
  const double hi = cfg.e_max.value_or(std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < v.own.size(); ++i) {
    if (!(v.own[i] > reservation)) continue;
    const double e1 = count ? e1_pro + (in_pro[i] ? 0.0 : 1.0)
                            : std::max(e1_pro, detail::e1_term(v, cfg.measure_self, i));
    const double gain = e1 - e2_rec;
    if (!(gain > cfg.e_min)) continue;
    if (cfg.selector == TftConfig::Selector::own_max) {
      if (!pick || v.own[i] > v.own[*pick]) pick = i;
    } else {
      if (!(gain < hi)) continue;
      if (!pick || detail::opp_at(v, i) > detail::opp_at(v, *pick)) pick = i;
    }
  }
  return pick ? *pick : best_of(v.own, pro);
}

// ---------------------------------------------------------------------------
// MiCRO

struct MicroState {
  std::vector<std::size_t> sorted_offers;  // decreasing own utility, ties by index
  std::size_t m = 0;                       // distinct offers proposed
  std::size_t n = 0;                       // distinct offers received
};

inline MicroState make_micro_state(const std::vector<double>& own) {
  MicroState s;
  s.sorted_offers.resize(own.size());
  std::iota(s.sorted_offers.begin(), s.sorted_offers.end(), 0);
  std::stable_sort(s.sorted_offers.begin(), s.sorted_offers.end(),
                   [&](std::size_t a, std::size_t b) { return own[a] > own[b]; });
  return s;
}

struct MicroDecision {
  bool accept = false;
  std::size_t offer = 0;  // proposal when not accepting
  bool ready = false;
  bool safeguard = false;  // nothing acceptable to propose, best offer returned
};

inline MicroDecision micro_decide(const MicroState& s, const std::vector<double>& own, double reservation,
                                  std::optional<std::size_t> last_received, Rng& rng) {
  MicroDecision d;
  const auto& offers = s.sorted_offers;
  d.ready = s.m <= s.n && s.m < offers.size() && own[offers[s.m]] > reservation;
  if (d.ready) {
    d.offer = offers[s.m];
  } else if (s.m == 0) {
    d.offer = offers[0];
    d.safeguard = true;
    return d;
  } else {
    d.offer = offers[std::uniform_int_distribution<std::size_t>(0, s.m - 1)(rng)];
  }
  const double asp = d.ready ? own[offers[s.m]] : own[offers[s.m - 1]];
  d.accept = last_received && own[*last_received] >= asp;
  return d;
}

// ---------------------------------------------------------------------------
// BOA agents

/**
 * Bidding + opponent model + acceptance. Tracks the distinct offers proposed
 * and received, feeds opponent proposals to the model, and optionally applies
 * the reproposing filter between bidding and acceptance.
 */
class BoaNegotiator : public Negotiator {
 public:
  void set_model(std::unique_ptr<OpponentModel> m) { model_ = std::move(m); }
  void set_repropose(bool on) { repropose_ = on; }
  bool reproposes() const { return repropose_; }
  OpponentModel* model() { return model_.get(); }

  void begin(const NegotiationDomain& d, int self, const SessionConfig& cfg) override {
    d_ = &d;
    self_ = self;
    cfg_ = cfg;
    own_ = d.table(self);
    proposed_.assign(d.size(), 0);
    received_.assign(d.size(), 0);
    pro_.clear();
    rec_.clear();
    rec_log_.clear();
    seen_ = 0;
    if (model_) model_->begin(d, self);
    on_begin();
  }

  Decision respond(const StrategyContext& ctx) override {
    sync(ctx);
    std::optional<std::size_t> last;
    if (ctx.last_received) last = d_->space().index_of(*ctx.last_received);
    std::size_t next = bid(ctx, last);
    if (repropose_) next = repropose_filter(own_, proposed_, rec_, next);
    if (last && accept(ctx, *last, next)) return Decision::accept(*ctx.last_received);
    return Decision::propose(d_->space().offer_at(next));
  }

 protected:
  virtual void on_begin() {}
  virtual std::size_t bid(const StrategyContext& ctx, std::optional<std::size_t> last) = 0;
  virtual bool accept(const StrategyContext& ctx, std::size_t received, std::size_t next) = 0;

  double min_proposed() const {
    double m = std::numeric_limits<double>::infinity();
    for (auto i : pro_) m = std::min(m, own_[i]);
    return m;
  }
  const std::vector<double>* opp() { return model_ ? &model_->estimates() : nullptr; }

  const NegotiationDomain* d_ = nullptr;
  int self_ = 1;
  SessionConfig cfg_;
  std::vector<double> own_;
  std::vector<char> proposed_, received_;
  std::vector<std::size_t> pro_, rec_;  // distinct, in first-seen order
  std::vector<std::pair<double, std::size_t>> rec_log_;  // (arrival, offer) of every opponent proposal
  std::unique_ptr<OpponentModel> model_;
  bool repropose_ = false;

 private:
  void sync(const StrategyContext& ctx) {
    for (; seen_ < ctx.observed.size(); ++seen_) {
      const auto& a = ctx.observed[seen_];
      if (a.kind != ActionKind::propose) continue;
      const std::size_t idx = d_->space().index_of(a.offer);
      if (a.agent == self_) {
        if (!proposed_[idx]) pro_.push_back(idx);
        proposed_[idx] = 1;
      } else {
        if (!received_[idx]) rec_.push_back(idx);
        received_[idx] = 1;
        rec_log_.emplace_back(a.time, idx);
        if (model_) model_->observe(idx, a.time, cfg_.deadline);
      }
    }
  }
  std::size_t seen_ = 0;
};

struct TimeBasedParams {
  std::optional<double> alpha;
  std::optional<double> beta;
  double gamma = 0.2;
  double target_fraction = 0.95;  // T' = fraction * T
  BidMode mode = BidMode::min_own;
  AcceptanceRule accept{AcceptanceRule::Kind::ac_asp};
};

class TimeBasedNegotiator : public BoaNegotiator {
 public:
  explicit TimeBasedNegotiator(TimeBasedParams p = {}) : p_(p) {}
  std::string name() const override { return "timebased"; }
  const AspirationFunction& aspiration() const { return asp_; }
  double asp_at(double t) const { return aspiration_value(asp_, std::min(t, asp_.deadline)); }

 protected:
  void on_begin() override {
    const double umax = *std::max_element(own_.begin(), own_.end());
    const double r = d_->reservation(self_);
    asp_.alpha = p_.alpha.value_or(umax);
    asp_.target = std::max(p_.beta.value_or(r + 0.1 * (umax - r)), r);
    asp_.alpha = std::max(asp_.alpha, asp_.target);
    asp_.gamma = p_.gamma;
    asp_.deadline = cfg_.deadline;
    asp_.target_time = std::isinf(cfg_.deadline) ? cfg_.deadline : p_.target_fraction * cfg_.deadline;
    asp_.check();
    if (p_.mode == BidMode::max_opponent && !model_) set_model(std::make_unique<FrequencyModel>());
    if (model_) model_->begin(*d_, self_);
  }
  std::size_t bid(const StrategyContext& ctx, std::optional<std::size_t>) override {
    now_asp_ = asp_at(ctx.now);
    return select_bid_timebased(own_, proposed_, pro_, p_.mode == BidMode::max_opponent ? opp() : nullptr,
                                now_asp_, p_.mode);
  }
  bool accept(const StrategyContext&, std::size_t received, std::size_t next) override {
    return decide_accept(p_.accept, own_[received], own_[next], now_asp_, min_proposed());
  }

  TimeBasedParams p_;
  AspirationFunction asp_;
  double now_asp_ = 1.0;
};

struct AdaptiveParams {
  std::optional<double> alpha;
  std::optional<double> beta_min;
  double gamma = 0.2;
  double target_fraction = 0.95;
  double safety = 0.1;  // decays linearly to 0 at the deadline
  enum class Predictor { gp, lowest } predictor = Predictor::gp;
  double length_scale_fraction = 0.2;  // of T
  double window_fraction = 0.05;       // of T
  AcceptanceRule accept{AcceptanceRule::Kind::ac_asp};
};

/**
 * Time-based agent whose target is re-estimated every turn. With the gp
 * predictor the estimate is the grid argmax of b * P_acc(b) at the deadline;
 * with `lowest` it is u1 of the optimal offer against the lowest utility the
 * opponent has demanded so far.
 */
class AdaptiveNegotiator : public BoaNegotiator {
 public:
  explicit AdaptiveNegotiator(AdaptiveParams p = {}) : p_(p) {}
  std::string name() const override { return "adaptive"; }
  double current_target() const { return asp_.target; }

 protected:
  void on_begin() override {
    const double umax = *std::max_element(own_.begin(), own_.end());
    const double r = d_->reservation(self_);
    beta_min_ = std::max(p_.beta_min.value_or(r + 0.1 * (umax - r)), r);
    asp_.alpha = p_.alpha.value_or(umax);
    asp_.gamma = p_.gamma;
    asp_.deadline = cfg_.deadline;
    asp_.target_time = std::isinf(cfg_.deadline) ? cfg_.deadline : p_.target_fraction * cfg_.deadline;
    if (!model_) set_model(std::make_unique<ScalableBayesModel>());
    model_->begin(*d_, self_);
    grid_ = own_;
    std::sort(grid_.begin(), grid_.end());
    grid_.erase(std::unique(grid_.begin(), grid_.end()), grid_.end());
    const double T = std::isinf(cfg_.deadline) ? 1.0 : cfg_.deadline;
    gp_ = GpPredictor(MaternKernel{p_.length_scale_fraction * T, 0.04, 1e-8}, p_.window_fraction * T);
  }

  std::size_t bid(const StrategyContext& ctx, std::optional<std::size_t>) override {
    const double T = cfg_.deadline;
    const double frac = std::isinf(T) ? 0.0 : std::min(ctx.now / T, 1.0);
    double est;
    if (p_.predictor == AdaptiveParams::Predictor::gp) {
      std::vector<GpObservation> obs;
      for (auto [t, i] : rec_log_) obs.push_back({t, own_[i]});
      gp_.fit(obs);
      est = optimal_target(gp_, std::isinf(T) ? ctx.now : T, grid_);
    } else {
      const auto& o = *opp();
      double lowest = std::numeric_limits<double>::infinity();
      for (auto i : rec_) lowest = std::min(lowest, o[i]);
      if (rec_.empty()) lowest = *std::max_element(o.begin(), o.end());
      est = own_[estimate_optimal_offer(own_, o, lowest).offer];
    }
    asp_.target = std::min(adaptive_target(est, p_.safety * (1.0 - frac), beta_min_), asp_.alpha);
    now_asp_ = aspiration_value(asp_, std::min(ctx.now, T));
    return select_bid_timebased(own_, proposed_, pro_, opp(), now_asp_, BidMode::max_opponent);
  }
  bool accept(const StrategyContext&, std::size_t received, std::size_t next) override {
    return decide_accept(p_.accept, own_[received], own_[next], now_asp_, min_proposed());
  }

  AdaptiveParams p_;
  AspirationFunction asp_;
  GpPredictor gp_;
  std::vector<double> grid_;
  double beta_min_ = 0.0;
  double now_asp_ = 1.0;
};

class TftNegotiator : public BoaNegotiator {
 public:
  explicit TftNegotiator(TftConfig cfg = {}, AcceptanceRule acc = {}) : tft_(cfg), acc_(acc) {}
  std::string name() const override { return "tft"; }

 protected:
  bool needs_model() const {
    return tft_.measure_self == ConcessionBasis::opponent_estimate ||
           tft_.measure_opponent == ConcessionBasis::opponent_estimate ||
           tft_.measure_self == ConcessionBasis::relative || tft_.measure_opponent == ConcessionBasis::relative ||
           tft_.selector == TftConfig::Selector::opponent_max;
  }
  void on_begin() override {
    if (needs_model() && !model_) {
      set_model(std::make_unique<FrequencyModel>());
      model_->begin(*d_, self_);
    }
  }
  std::size_t bid(const StrategyContext&, std::optional<std::size_t>) override {
    TftView v{own_, opp(), std::nullopt};
    if (v.opp) {
      // ideal outcome: maximum estimated social welfare
      std::size_t best = 0;
      for (std::size_t i = 1; i < own_.size(); ++i)
        if (own_[i] + (*v.opp)[i] > own_[best] + (*v.opp)[best]) best = i;
      v.ideal = best;
    }
    return tft_select_bid(tft_, v, pro_, rec_, d_->reservation(self_));
  }
  bool accept(const StrategyContext&, std::size_t received, std::size_t next) override {
    return decide_accept(acc_, own_[received], own_[next], std::nullopt, min_proposed());
  }

  TftConfig tft_;
  AcceptanceRule acc_;
};

class MicroNegotiator : public BoaNegotiator {
 public:
  std::string name() const override { return "micro"; }
  const MicroState& state() const { return st_; }
  bool safeguard_triggered() const { return safeguard_; }

 protected:
  void on_begin() override {
    st_ = make_micro_state(own_);
    safeguard_ = false;
  }
  std::size_t bid(const StrategyContext& ctx, std::optional<std::size_t> last) override {
    st_.m = pro_.size();
    st_.n = rec_.size();
    dec_ = micro_decide(st_, own_, d_->reservation(self_), last, ctx.rng);
    safeguard_ = safeguard_ || dec_.safeguard;
    return dec_.offer;
  }
  bool accept(const StrategyContext&, std::size_t received, std::size_t next) override {
    if (!repropose_) return dec_.accept;
    // the proposal may have been swapped; keep the MiCRO threshold but never
    // refuse something at least as good as what we are about to send
    return dec_.accept || own_[received] >= own_[next];
  }

  MicroState st_;
  MicroDecision dec_;
  bool safeguard_ = false;
};

class RandomNegotiator : public BoaNegotiator {
 public:
  explicit RandomNegotiator(double threshold = 0.9) : threshold_(threshold) {}
  std::string name() const override { return "random"; }

 protected:
  std::size_t bid(const StrategyContext& ctx, std::optional<std::size_t>) override {
    const double r = d_->reservation(self_);
    std::uniform_int_distribution<std::size_t> pick(0, own_.size() - 1);
    for (int tries = 0; tries < 1000; ++tries) {
      const std::size_t i = pick(ctx.rng);
      if (own_[i] > r) return i;
    }
    // rational offers are rare; scan for one instead of guessing
    std::vector<std::size_t> ok;
    for (std::size_t i = 0; i < own_.size(); ++i)
      if (own_[i] > r) ok.push_back(i);
    if (ok.empty()) return best_of(own_, {});
    return ok[std::uniform_int_distribution<std::size_t>(0, ok.size() - 1)(ctx.rng)];
  }
  bool accept(const StrategyContext&, std::size_t received, std::size_t) override {
    return own_[received] >= threshold_;
  }

  double threshold_;
};

}  // namespace nego
