#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "nego/domain.hpp"
#include "nego/protocol.hpp"
#include "nego/strategies.hpp"

namespace nego {

/// One agent switches to a different time-based strategy; the other keeps its paired one.
struct Deviation {
  int agent = 1;
  double beta = 0.0;
  double gamma = 0.2;
  BidMode mode = BidMode::min_own;
  AcceptanceRule accept{AcceptanceRule::Kind::ac_asp};
};

struct NeCheckConfig {
  // actions that must fit between T' and T; 0 means 2|Omega|+2
  std::size_t rounds = 0;
  double target_fraction = 0.5;  // T' = fraction * T
  double gamma = 0.2;
  double think_time = 0.01;
  DelayModel delay{};
  std::uint64_t seed = 0;
  double payoff_tolerance = 1e-12;
  double improvement_tolerance = 1e-9;
};

struct DeviationResult {
  Deviation deviation;
  double payoff = 0.0;    // deviator's payoff
  double baseline = 0.0;  // deviator's payoff under the paired profile
  bool improved = false;
};

struct NeCheckReport {
  bool precondition_ok = false;
  std::string message;
  double deadline = 0.0;
  bool baseline_agreed = false;
  std::array<double, 2> baseline_payoffs{0.0, 0.0};
  bool baseline_ok = false;
  std::vector<DeviationResult> deviations;

  bool passed() const {
    if (!precondition_ok || !baseline_ok) return false;
    return std::none_of(deviations.begin(), deviations.end(), [](const auto& d) { return d.improved; });
  }
};

/**
 * Deadline large enough that `rounds` actions fit after T': each action costs
 * at most think_time plus the largest delay.
 */
inline double ne_check_deadline(std::size_t rounds, double target_fraction, double think_time, const DelayModel& delay) {
  const double tail = static_cast<double>(rounds) * (think_time + delay.upper());
  return tail / (1.0 - target_fraction) * 1.01;
}

/// 10 deviations per agent sweeping target, concession speed, bidding mode and acceptance.
inline std::vector<Deviation> default_deviation_grid(const NegotiationDomain& d, std::size_t per_agent = 10) {
  static const double gammas[] = {0.05, 0.2, 1.0, 3.0, 10.0};
  std::vector<Deviation> out;
  for (int agent = 1; agent <= 2; ++agent) {
    const double r = d.reservation(agent);
    const double umax = d.u(agent, d.argmax(agent));
    for (std::size_t k = 0; k < per_agent; ++k) {
      Deviation dv;
      dv.agent = agent;
      const double frac = per_agent > 1 ? static_cast<double>(k) / static_cast<double>(per_agent - 1) : 0.0;
      dv.beta = r + frac * (umax - r);
      dv.gamma = gammas[k % 5];
      dv.mode = (k % 2 == 0) ? BidMode::min_own : BidMode::max_opponent;
      if (k % 3 == 2) dv.accept = AcceptanceRule{AcceptanceRule::Kind::ac_next};
      out.push_back(dv);
    }
  }
  return out;
}

namespace detail {

inline std::unique_ptr<TimeBasedNegotiator> paired_agent(const NegotiationDomain& d, int agent, std::size_t target,
                                                         const NeCheckConfig& cfg) {
  TimeBasedParams p;
  p.beta = d.u(agent, target);
  p.gamma = cfg.gamma;
  p.target_fraction = cfg.target_fraction;
  p.mode = BidMode::min_own;
  p.accept = AcceptanceRule{AcceptanceRule::Kind::ac_asp};
  return std::make_unique<TimeBasedNegotiator>(p);
}

inline std::unique_ptr<TimeBasedNegotiator> deviating_agent(const Deviation& dv, const NeCheckConfig& cfg) {
  TimeBasedParams p;
  p.beta = dv.beta;
  p.gamma = dv.gamma;
  p.target_fraction = cfg.target_fraction;
  p.mode = dv.mode;
  p.accept = dv.accept;
  auto s = std::make_unique<TimeBasedNegotiator>(p);
  // bidding on the opponent's side uses its true utility, the most an agent could know
  if (dv.mode == BidMode::max_opponent) s->set_model(std::make_unique<DummyModel>());
  return s;
}

}  // namespace detail

/**
 * Empirical check of the equilibrium construction: both agents run time-based
 * strategies that never go below their share of `target`. The paired profile
 * must agree on target's utility vector and no deviation in the grid may pay
 * the deviator more. Finite grid only; not a proof.
 */
inline NeCheckReport negotiation_ne_check(const NegotiationDomain& d, std::size_t target,
                                          const std::vector<Deviation>& grid, const NeCheckConfig& cfg = {}) {
  NeCheckReport rep;
  if (target >= d.size()) {
    rep.message = "target offer index out of range";
    return rep;
  }
  const auto front = pareto_indices(d);
  if (!std::binary_search(front.begin(), front.end(), target)) {
    rep.message = "target offer is not Pareto-optimal";
    return rep;
  }
  if (!individually_rational(d, target)) {
    rep.message = "target offer is not individually rational";
    return rep;
  }
  if (!(cfg.target_fraction > 0.0 && cfg.target_fraction < 1.0)) {
    rep.message = "target_fraction must be in (0, 1)";
    return rep;
  }
  rep.precondition_ok = true;

  const std::size_t rounds = cfg.rounds ? cfg.rounds : 2 * d.size() + 2;
  rep.deadline = ne_check_deadline(rounds, cfg.target_fraction, cfg.think_time, cfg.delay);
  SessionConfig sc;
  sc.deadline = rep.deadline;
  sc.think_time = cfg.think_time;
  sc.delay = cfg.delay;
  sc.seed = cfg.seed;

  auto a1 = detail::paired_agent(d, 1, target, cfg);
  auto a2 = detail::paired_agent(d, 2, target, cfg);
  const auto base = run_session(d, *a1, *a2, sc);
  rep.baseline_agreed = base.outcome.agreed();
  rep.baseline_payoffs = base.outcome.payoffs;
  rep.baseline_ok = rep.baseline_agreed;
  for (int i = 1; i <= 2; ++i) {
    const double want = d.u(i, target) * std::pow(d.discount(i), base.outcome.agreement_time.value_or(0.0));
    rep.baseline_ok = rep.baseline_ok && std::abs(base.outcome.payoffs[i - 1] - want) <= cfg.payoff_tolerance;
  }
  if (!rep.baseline_ok) rep.message = "paired strategies did not agree on the target";

  for (const auto& dv : grid) {
    auto fixed = detail::paired_agent(d, 3 - dv.agent, target, cfg);
    auto dev = detail::deviating_agent(dv, cfg);
    const auto res = dv.agent == 1 ? run_session(d, *dev, *fixed, sc) : run_session(d, *fixed, *dev, sc);
    DeviationResult dr;
    dr.deviation = dv;
    dr.payoff = res.outcome.payoffs[dv.agent - 1];
    dr.baseline = rep.baseline_payoffs[dv.agent - 1];
    dr.improved = dr.payoff > dr.baseline + cfg.improvement_tolerance;
    rep.deviations.push_back(dr);
  }
  return rep;
}

}  // namespace nego
