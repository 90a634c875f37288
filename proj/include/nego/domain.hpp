#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "nego/rng.hpp"

namespace nego {

class InvalidOffer : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class DegenerateUtility : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Issue {
  std::string name;
  std::vector<std::string> options;
  bool ordered = true;

  std::size_t size() const { return options.size(); }
};

/// An offer is one option index per issue, 0-based.
using Offer = std::vector<int>;

/**
 * Cartesian product of issues. Offers are enumerated in lexicographic order
 * (first issue most significant), so an offer's flat index doubles as its
 * position in the tie-breaking order used everywhere else.
 */
class OfferSpace {
 public:
  OfferSpace() = default;
  explicit OfferSpace(std::vector<Issue> issues) : issues_(std::move(issues)) {
    if (issues_.empty()) throw PreconditionError("offer space needs at least one issue");
    for (const auto& is : issues_) {
      if (is.options.empty()) throw PreconditionError("issue '" + is.name + "' has no options");
      std::set<std::string> seen(is.options.begin(), is.options.end());
      if (seen.size() != is.options.size())
        throw PreconditionError("issue '" + is.name + "' has duplicate option labels");
    }
    size_ = 1;
    for (const auto& is : issues_) size_ *= is.size();
  }

  const std::vector<Issue>& issues() const { return issues_; }
  std::size_t num_issues() const { return issues_.size(); }
  std::size_t issue_size(std::size_t j) const { return issues_[j].size(); }
  std::size_t size() const { return size_; }

  bool valid(const Offer& o) const {
    if (o.size() != issues_.size()) return false;
    for (std::size_t j = 0; j < o.size(); ++j)
      if (o[j] < 0 || static_cast<std::size_t>(o[j]) >= issues_[j].size()) return false;
    return true;
  }

  std::size_t index_of(const Offer& o) const {
    if (!valid(o)) throw InvalidOffer("offer not in space");
    std::size_t idx = 0;
    for (std::size_t j = 0; j < o.size(); ++j) idx = idx * issues_[j].size() + o[j];
    return idx;
  }

  Offer offer_at(std::size_t idx) const {
    if (idx >= size_) throw InvalidOffer("offer index out of range");
    Offer o(issues_.size());
    for (std::size_t j = issues_.size(); j-- > 0;) {
      o[j] = static_cast<int>(idx % issues_[j].size());
      idx /= issues_[j].size();
    }
    return o;
  }

 private:
  std::vector<Issue> issues_;
  std::size_t size_ = 0;
};

inline std::size_t offer_space_size(const OfferSpace& space) { return space.size(); }

struct LinearUtility {
  std::vector<double> weights;
  std::vector<std::vector<double>> evaluations;  // [issue][option]

  double operator()(const Offer& o) const {
    double u = 0.0;
    for (std::size_t j = 0; j < weights.size(); ++j) u += weights[j] * evaluations[j][o[j]];
    return u;
  }
};

struct TabularUtility {
  std::vector<double> values;  // indexed by flat offer index
};

using Utility = std::variant<LinearUtility, TabularUtility>;

/// Throws if the utility does not fit the space shape.
inline void check_utility_shape(const Utility& u, const OfferSpace& space) {
  if (auto* lin = std::get_if<LinearUtility>(&u)) {
    if (lin->weights.size() != space.num_issues() || lin->evaluations.size() != space.num_issues())
      throw PreconditionError("linear utility issue count mismatch");
    for (std::size_t j = 0; j < space.num_issues(); ++j)
      if (lin->evaluations[j].size() != space.issue_size(j))
        throw PreconditionError("linear utility option count mismatch on issue " + std::to_string(j));
  } else if (std::get<TabularUtility>(u).values.size() != space.size()) {
    throw PreconditionError("tabular utility must cover every offer");
  }
}

/// Weight and normalization invariants of a linear utility; tolerance 1e-9 on the weight sum.
inline bool linear_utility_ok(const LinearUtility& u, bool normalized) {
  double s = 0.0;
  for (double w : u.weights) {
    if (!(w >= 0.0)) return false;
    s += w;
  }
  if (std::abs(s - 1.0) > 1e-9) return false;
  if (!normalized) return true;
  for (const auto& ev : u.evaluations) {
    if (ev.size() < 2) continue;  // a single option cannot be both 0 and 1
    auto [lo, hi] = std::minmax_element(ev.begin(), ev.end());
    if (*lo != 0.0 || *hi != 1.0) return false;
  }
  return true;
}

inline double evaluate(const Utility& u, const OfferSpace& space, const Offer& o) {
  if (!space.valid(o)) throw InvalidOffer("offer not in space");
  if (auto* lin = std::get_if<LinearUtility>(&u)) return (*lin)(o);
  return std::get<TabularUtility>(u).values[space.index_of(o)];
}

/// (u - min)/(max - min), tabulated over the whole space.
inline TabularUtility normalize_utility(const Utility& u, const OfferSpace& space) {
  std::vector<double> v(space.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = evaluate(u, space, space.offer_at(i));
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double mn = *lo, mx = *hi;
  if (!(mx > mn)) throw DegenerateUtility("utility is constant over the offer space");
  for (double& x : v) x = (x - mn) / (mx - mn);
  return TabularUtility{std::move(v)};
}

struct UtilityVector {
  double u1 = 0.0;
  double u2 = 0.0;
};

/**
 * Two-agent negotiation domain. Utilities are tabulated per offer on
 * construction; everything downstream reads the cache.
 */
class NegotiationDomain {
 public:
  NegotiationDomain() = default;
  NegotiationDomain(OfferSpace space, std::array<Utility, 2> utilities,
                    std::array<double, 2> reservation = {0.0, 0.0},
                    std::array<double, 2> discount = {1.0, 1.0})
      : space_(std::move(space)),
        utilities_(std::move(utilities)),
        reservation_(reservation),
        discount_(discount) {
    for (int i = 0; i < 2; ++i) {
      check_utility_shape(utilities_[i], space_);
      if (!(discount_[i] > 0.0 && discount_[i] <= 1.0))
        throw PreconditionError("discount factor must lie in (0,1]");
      cache_[i].resize(space_.size());
      for (std::size_t k = 0; k < space_.size(); ++k)
        cache_[i][k] = evaluate(utilities_[i], space_, space_.offer_at(k));
    }
  }

  const OfferSpace& space() const { return space_; }
  std::size_t size() const { return space_.size(); }
  const Utility& utility(int agent) const { return utilities_.at(agent - 1); }
  double reservation(int agent) const { return reservation_.at(agent - 1); }
  double discount(int agent) const { return discount_.at(agent - 1); }
  const std::vector<double>& table(int agent) const { return cache_.at(agent - 1); }

  /// agent is 1 or 2.
  double u(int agent, std::size_t idx) const { return cache_.at(agent - 1).at(idx); }
  double u(int agent, const Offer& o) const { return u(agent, space_.index_of(o)); }
  UtilityVector vec(std::size_t idx) const { return {cache_[0][idx], cache_[1][idx]}; }

  std::size_t argmax(int agent) const {
    const auto& t = table(agent);
    return static_cast<std::size_t>(std::max_element(t.begin(), t.end()) - t.begin());
  }
  std::size_t argmin(int agent) const {
    const auto& t = table(agent);
    return static_cast<std::size_t>(std::min_element(t.begin(), t.end()) - t.begin());
  }

 private:
  OfferSpace space_;
  std::array<Utility, 2> utilities_;
  std::array<double, 2> reservation_{0.0, 0.0};
  std::array<double, 2> discount_{1.0, 1.0};
  std::array<std::vector<double>, 2> cache_;
};

inline double evaluate_utility(const NegotiationDomain& d, int agent, const Offer& o) {
  return evaluate(d.utility(agent), d.space(), o);
}

inline double discounted_utility(const NegotiationDomain& d, int agent, const Offer& o, double t) {
  return evaluate_utility(d, agent, o) * std::pow(d.discount(agent), t);
}

inline bool dominates(const UtilityVector& a, const UtilityVector& b) {
  return a.u1 >= b.u1 && a.u2 >= b.u2 && (a.u1 > b.u1 || a.u2 > b.u2);
}

inline bool dominates(const NegotiationDomain& d, const Offer& a, const Offer& b) {
  return dominates(d.vec(d.space().index_of(a)), d.vec(d.space().index_of(b)));
}

/**
 * Indices of all non-dominated offers, ascending.
 *
 * Sweep in order of decreasing u1. Within a block of equal u1 only the
 * block's best u2 survives, and it survives only if it beats every u2 seen
 * at strictly higher u1.
 */
inline std::vector<std::size_t> pareto_indices(const NegotiationDomain& d) {
  const auto& a = d.table(1);
  const auto& b = d.table(2);
  std::vector<std::size_t> order(d.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (a[x] != a[y]) return a[x] > a[y];
    return b[x] > b[y];
  });
  std::vector<std::size_t> out;
  double best = -std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && a[order[j]] == a[order[i]]) ++j;
    const double top = b[order[i]];
    if (top > best) {
      for (std::size_t k = i; k < j && b[order[k]] == top; ++k) out.push_back(order[k]);
      best = top;
    }
    i = j;
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<Offer> pareto_set(const NegotiationDomain& d) {
  std::vector<Offer> out;
  for (auto i : pareto_indices(d)) out.push_back(d.space().offer_at(i));
  return out;
}

inline bool individually_rational(const NegotiationDomain& d, std::size_t idx) {
  return d.u(1, idx) > d.reservation(1) && d.u(2, idx) > d.reservation(2);
}
inline bool individually_rational(const NegotiationDomain& d, const Offer& o) {
  return individually_rational(d, d.space().index_of(o));
}

enum class OppositionMeasure { euclidean, min_utility, kalai_euclidean };

inline double opposition(const NegotiationDomain& d, OppositionMeasure m) {
  for (int ag = 1; ag <= 2; ++ag)
    for (double x : d.table(ag))
      if (!(x >= 0.0 && x <= 1.0)) throw PreconditionError("opposition needs utilities in [0,1]");
  auto dist = [&](std::size_t i) {
    const double p = 1.0 - d.u(1, i), q = 1.0 - d.u(2, i);
    return std::sqrt(p * p + q * q);
  };
  double best = std::numeric_limits<double>::infinity();
  switch (m) {
    case OppositionMeasure::euclidean:
      for (std::size_t i = 0; i < d.size(); ++i) best = std::min(best, dist(i));
      return best;
    case OppositionMeasure::min_utility:
      for (std::size_t i = 0; i < d.size(); ++i)
        best = std::min(best, 1.0 - std::min(d.u(1, i), d.u(2, i)));
      return best;
    case OppositionMeasure::kalai_euclidean: {
      auto par = pareto_indices(d);
      std::size_t pick = par.front();
      for (auto i : par) {
        const double gi = std::abs(d.u(1, i) - d.u(2, i));
        const double gp = std::abs(d.u(1, pick) - d.u(2, pick));
        if (gi < gp || (gi == gp && d.u(1, i) + d.u(2, i) > d.u(1, pick) + d.u(2, pick)))
          pick = i;
      }
      return dist(pick);
    }
  }
  return best;
}

inline NegotiationDomain generate_split_the_pie(std::size_t num_offers) {
  if (num_offers < 2) throw PreconditionError("split-the-pie needs at least 2 offers");
  Issue is{"share", {}, true};
  std::vector<double> u1(num_offers), u2(num_offers);
  for (std::size_t k = 0; k < num_offers; ++k) {
    is.options.push_back(std::to_string(k));
    u1[k] = static_cast<double>(k) / static_cast<double>(num_offers - 1);
    u2[k] = 1.0 - u1[k];
  }
  return NegotiationDomain(OfferSpace({is}),
                           {TabularUtility{std::move(u1)}, TabularUtility{std::move(u2)}});
}

namespace detail {

// rescale to min 0, max 1; constant rows become all 1
inline void unit_range(std::vector<double>& v) {
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double mn = *lo, mx = *hi;
  if (!(mx > mn)) {
    std::fill(v.begin(), v.end(), 1.0);
    return;
  }
  for (double& x : v) x = (x - mn) / (mx - mn);
  // pin the extremes exactly, rounding can land a hair off
  *std::min_element(v.begin(), v.end()) = 0.0;
  *std::max_element(v.begin(), v.end()) = 1.0;
}

inline std::vector<double> random_weights(std::size_t n, Rng& rng) {
  std::uniform_real_distribution<double> U(0.05, 1.0);
  std::vector<double> w(n);
  double s = 0.0;
  for (auto& x : w) s += (x = U(rng));
  for (auto& x : w) x /= s;
  return w;
}

}  // namespace detail

/**
 * Random domain with normalized linear utilities for both agents.
 * opposition_hint blends agent 2's evaluations between a copy of agent 1's
 * (0) and their mirror image (1), with noise peaking in the middle.
 */
inline NegotiationDomain generate_random_linear_domain(std::vector<std::size_t> options_per_issue,
                                                       std::uint64_t seed, double opposition_hint,
                                                       std::array<double, 2> reservation = {0.0, 0.0}) {
  if (options_per_issue.empty()) throw PreconditionError("need at least one issue");
  if (!(opposition_hint >= 0.0 && opposition_hint <= 1.0))
    throw PreconditionError("opposition_hint must lie in [0,1]");
  Rng rng(mix64(seed));
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<Issue> issues;
  LinearUtility a, b;
  const double h = opposition_hint;
  for (std::size_t j = 0; j < options_per_issue.size(); ++j) {
    const std::size_t k = options_per_issue[j];
    if (k < 1) throw PreconditionError("issue sizes must be >= 1");
    Issue is{"issue" + std::to_string(j), {}, false};
    for (std::size_t l = 0; l < k; ++l) is.options.push_back("o" + std::to_string(l));
    issues.push_back(std::move(is));
    std::vector<double> ea(k), eb(k);
    for (auto& x : ea) x = U(rng);
    detail::unit_range(ea);
    for (std::size_t l = 0; l < k; ++l)
      eb[l] = (1.0 - h) * ea[l] + h * (1.0 - ea[l]) + 4.0 * h * (1.0 - h) * (U(rng) - 0.5);
    if (h == 0.0) eb = ea;
    else detail::unit_range(eb);
    a.evaluations.push_back(std::move(ea));
    b.evaluations.push_back(std::move(eb));
  }
  a.weights = detail::random_weights(options_per_issue.size(), rng);
  b.weights = h == 0.0 && options_per_issue.size() == 1 ? a.weights
                                                          : detail::random_weights(options_per_issue.size(), rng);
  return NegotiationDomain(OfferSpace(std::move(issues)), {std::move(a), std::move(b)}, reservation);
}

inline NegotiationDomain generate_random_linear_domain(std::size_t num_issues, std::size_t options,
                                                       std::uint64_t seed, double opposition_hint) {
  return generate_random_linear_domain(std::vector<std::size_t>(num_issues, options), seed,
                                       opposition_hint);
}

}  // namespace nego
