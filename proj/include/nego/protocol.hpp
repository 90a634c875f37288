#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nego/domain.hpp"
#include "nego/domain_io.hpp"
#include "nego/rng.hpp"

namespace nego {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr long kUnlimitedRounds = std::numeric_limits<long>::max();

enum class ActionKind { propose, accept };

inline const char* to_string(ActionKind k) { return k == ActionKind::propose ? "propose" : "accept"; }

struct NegotiationAction {
  int agent = 1;  // 1 or 2
  ActionKind kind = ActionKind::propose;
  Offer offer;
  double time = 0.0;
};

/// One action followed by the delay before it reaches the other agent.
struct HistoryEntry {
  NegotiationAction action;
  double delay = 0.0;
};

using NegotiationHistory = std::vector<HistoryEntry>;
using ObservedHistory = std::vector<NegotiationAction>;

struct DelayModel {
  enum class Kind { constant, uniform } kind = Kind::uniform;
  double a = 0.001;
  double b = 0.01;

  static DelayModel constant(double v) { return {Kind::constant, v, v}; }
  static DelayModel uniform(double lo, double hi) { return {Kind::uniform, lo, hi}; }
  double upper() const { return kind == Kind::constant ? a : b; }
};

inline double sample_delay(const DelayModel& m, Rng& rng) {
  if (m.kind == DelayModel::Kind::constant) return m.a;
  return std::uniform_real_distribution<double>(m.a, m.b)(rng);
}

struct SessionConfig {
  double deadline = kInf;        // T
  long max_rounds = kUnlimitedRounds;  // mu, counted in actions
  DelayModel delay{};
  int starting_agent = 1;
  std::uint64_t seed = 0;
  double think_time = 0.01;

  void check() const {
    if (!(deadline > 0.0)) throw ConfigError("deadline must be > 0");
    if (max_rounds < 1) throw ConfigError("max_rounds must be >= 1");
    if (deadline == kInf && max_rounds == kUnlimitedRounds)
      throw ConfigError("either the deadline or the round cap must be finite");
    if (!(think_time > 0.0)) throw ConfigError("think_time must be > 0");
    if (!(delay.a > 0.0) || delay.b < delay.a) throw ConfigError("delays must be positive");
    if (starting_agent != 1 && starting_agent != 2) throw ConfigError("starting_agent must be 1 or 2");
  }
};

struct Violation {
  int rule = 0;  // 0 = malformed entry, otherwise the protocol rule number
  std::size_t index = 0;
  std::string message;
};

/**
 * Checks the alternating offers rules. Rule numbers: 1 alternation and strict
 * timing, 2 accept only last, 3 accept repeats the preceding proposal,
 * 4 times within the deadline, 5 round cap. Returns the first violation.
 */
inline std::optional<Violation> validate_history(const NegotiationHistory& h, const SessionConfig& cfg,
                                                 const OfferSpace& space) {
  for (std::size_t j = 0; j < h.size(); ++j) {
    const auto& a = h[j].action;
    if (a.agent != 1 && a.agent != 2) return Violation{0, j, "agent must be 1 or 2"};
    if (!space.valid(a.offer)) return Violation{0, j, "offer not in space"};
    if (!(a.time >= 0.0)) return Violation{0, j, "negative time"};
    if (!(h[j].delay > 0.0)) return Violation{0, j, "delay must be positive"};
    if (j > 0) {
      const auto& p = h[j - 1];
      if (p.action.agent == a.agent) return Violation{1, j, "agents must alternate"};
      if (!(p.action.time + p.delay < a.time)) return Violation{1, j, "action sent before previous arrived"};
    }
    if (a.kind == ActionKind::accept) {
      if (j + 1 != h.size()) return Violation{2, j, "accept must be the last action"};
      if (j == 0 || h[j - 1].action.kind != ActionKind::propose || h[j - 1].action.offer != a.offer)
        return Violation{3, j, "accepted offer differs from the preceding proposal"};
    }
    if (a.time > cfg.deadline) return Violation{4, j, "action after deadline"};
    if (static_cast<long>(j + 1) > cfg.max_rounds) return Violation{5, j, "too many actions"};
  }
  return std::nullopt;
}

/// The history as seen by `viewer`: opponent actions carry their arrival time.
inline ObservedHistory observed_view(const NegotiationHistory& h, int viewer) {
  ObservedHistory out;
  out.reserve(h.size());
  for (const auto& e : h) {
    auto a = e.action;
    if (a.agent != viewer) a.time += e.delay;
    out.push_back(std::move(a));
  }
  return out;
}

struct Outcome {
  enum class Status { agreement, failure } status = Status::failure;
  std::optional<Offer> accepted_offer;
  std::optional<double> agreement_time;
  std::array<double, 2> payoffs{0.0, 0.0};
  bool violation = false;
  int violator = 0;

  bool agreed() const { return status == Status::agreement; }
};

inline bool is_terminal(const NegotiationHistory& h, const SessionConfig& cfg) {
  if (h.empty()) return false;
  const auto& last = h.back();
  if (last.action.kind == ActionKind::accept) return true;
  if (static_cast<long>(h.size()) >= cfg.max_rounds) return true;
  return last.action.time + last.delay + cfg.think_time > cfg.deadline;
}

/**
 * Scores a finished history. Agreement requires a final accept that arrives
 * strictly before the deadline; payoffs are discounted at the accept's send
 * time.
 */
inline Outcome outcome_of(const NegotiationHistory& h, const NegotiationDomain& d, const SessionConfig& cfg) {
  if (!is_terminal(h, cfg)) throw std::logic_error("outcome_of needs a terminal history");
  Outcome o;
  const auto& last = h.back();
  if (last.action.kind == ActionKind::accept && last.action.time + last.delay < cfg.deadline) {
    o.status = Outcome::Status::agreement;
    o.accepted_offer = last.action.offer;
    o.agreement_time = last.action.time;
    for (int i = 1; i <= 2; ++i)
      o.payoffs[i - 1] = d.u(i, last.action.offer) * std::pow(d.discount(i), last.action.time);
  } else {
    o.payoffs = {d.reservation(1), d.reservation(2)};
  }
  return o;
}

// ---------------------------------------------------------------------------
// Strategy contract

struct StrategyContext {
  const NegotiationDomain& domain;
  int self;  // 1 or 2
  double deadline;
  double now;
  const ObservedHistory& observed;
  std::optional<Offer> last_received;
  Rng& rng;
};

struct Decision {
  ActionKind kind = ActionKind::propose;
  Offer offer;

  static Decision accept(Offer o) { return {ActionKind::accept, std::move(o)}; }
  static Decision propose(Offer o) { return {ActionKind::propose, std::move(o)}; }
};

class Negotiator {
 public:
  virtual ~Negotiator() = default;
  /// Called once before the first turn.
  virtual void begin(const NegotiationDomain&, int /*self*/, const SessionConfig&) {}
  virtual Decision respond(const StrategyContext& ctx) = 0;
  virtual std::string name() const = 0;
};

struct SessionResult {
  NegotiationHistory history;
  Outcome outcome;
};

/**
 * Runs one alternating offers session on a simulated clock. The first action
 * is stamped at t=0; each later one at (previous send time + its delay +
 * think_time). The session stops on an accept, on the round cap, or when the
 * next action could no longer be sent by the deadline.
 */
inline SessionResult run_session(const NegotiationDomain& d, Negotiator& s1, Negotiator& s2,
                                 const SessionConfig& cfg) {
  cfg.check();
  Rng delay_rng(derive_seed(cfg.seed, {0}));
  std::array<Rng, 2> agent_rng{Rng(derive_seed(cfg.seed, {1})), Rng(derive_seed(cfg.seed, {2}))};
  std::array<Negotiator*, 2> agents{&s1, &s2};
  std::array<ObservedHistory, 2> views;
  s1.begin(d, 1, cfg);
  s2.begin(d, 2, cfg);

  SessionResult res;
  auto& h = res.history;
  int turn = cfg.starting_agent;
  double now = 0.0;
  std::optional<Offer> pending;  // last proposal on the table
  while (now <= cfg.deadline) {
    StrategyContext ctx{d, turn, cfg.deadline, now, views[turn - 1], pending, agent_rng[turn - 1]};
    Decision dec = agents[turn - 1]->respond(ctx);
    bool bad = !d.space().valid(dec.offer);
    if (dec.kind == ActionKind::accept) bad = !pending || *pending != dec.offer;
    if (bad) {
      res.outcome = Outcome{};
      res.outcome.payoffs = {d.reservation(1), d.reservation(2)};
      res.outcome.violation = true;
      res.outcome.violator = turn;
      return res;
    }
    const double eps = sample_delay(cfg.delay, delay_rng);
    NegotiationAction act{turn, dec.kind, std::move(dec.offer), now};
    for (int v = 1; v <= 2; ++v) {
      auto seen = act;
      if (v != turn) seen.time += eps;
      views[v - 1].push_back(std::move(seen));
    }
    h.push_back({act, eps});
    if (act.kind == ActionKind::accept) break;
    if (static_cast<long>(h.size()) >= cfg.max_rounds) break;
    pending = act.offer;
    now = act.time + eps + cfg.think_time;
    turn = 3 - turn;
  }
  if (h.empty()) {
    res.outcome.payoffs = {d.reservation(1), d.reservation(2)};
    return res;
  }
  res.outcome = outcome_of(h, d, cfg);
  return res;
}

// ---------------------------------------------------------------------------
// History log: agent,kind,offer_key,t,epsilon

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_history_csv(std::ostream& out, const NegotiationHistory& h) {
  out << "agent,kind,offer_key,t,epsilon\n";
  for (const auto& e : h)
    out << e.action.agent << ',' << to_string(e.action.kind) << ',' << offer_key(e.action.offer) << ','
        << format_double(e.action.time) << ',' << format_double(e.delay) << '\n';
}

inline NegotiationHistory read_history_csv(std::istream& in) {
  NegotiationHistory h;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first && line.rfind("agent,", 0) == 0) {
      first = false;
      continue;
    }
    first = false;
    std::stringstream ss(line);
    std::string f[5];
    for (auto& x : f)
      if (!std::getline(ss, x, ',')) throw ConfigError("history line has fewer than 5 fields: " + line);
    HistoryEntry e;
    try {
      e.action.agent = std::stoi(f[0]);
      if (f[1] == "propose") e.action.kind = ActionKind::propose;
      else if (f[1] == "accept") e.action.kind = ActionKind::accept;
      else throw ConfigError("unknown action kind " + f[1]);
      e.action.offer = parse_offer_key(f[2]);
      e.action.time = std::stod(f[3]);
      e.delay = std::stod(f[4]);
    } catch (const std::invalid_argument&) {
      throw ConfigError("unparseable history line: " + line);
    }
    h.push_back(std::move(e));
  }
  return h;
}

}  // namespace nego
