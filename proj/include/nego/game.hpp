#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nego/domain_io.hpp"

namespace nego {

using Payoff = std::array<double, 2>;

struct NormalFormGame {
  std::array<std::vector<std::string>, 2> action_labels;
  std::vector<std::vector<Payoff>> payoffs;  // [row = player 1 action][column = player 2 action]

  std::size_t num_actions(int player) const { return action_labels.at(player - 1).size(); }
  double u(int player, std::size_t a1, std::size_t a2) const { return payoffs[a1][a2][player - 1]; }

  void check() const {
    if (action_labels[0].empty() || action_labels[1].empty()) throw ConfigError("each player needs an action");
    if (payoffs.size() != action_labels[0].size()) throw ConfigError("payoff rows must match player 1 actions");
    for (const auto& row : payoffs)
      if (row.size() != action_labels[1].size()) throw ConfigError("payoff columns must match player 2 actions");
  }
  std::size_t index_of(int player, const std::string& label) const {
    const auto& l = action_labels.at(player - 1);
    for (std::size_t i = 0; i < l.size(); ++i)
      if (l[i] == label) return i;
    throw std::out_of_range("no action '" + label + "'");
  }
};

/// Responder's utility-maximizing actions against a fixed opponent action.
inline std::vector<std::size_t> best_responses(const NormalFormGame& g, int responder, std::size_t opponent_action) {
  if (opponent_action >= g.num_actions(3 - responder)) throw std::out_of_range("opponent action index");
  auto val = [&](std::size_t a) {
    return responder == 1 ? g.u(1, a, opponent_action) : g.u(2, opponent_action, a);
  };
  const std::size_t n = g.num_actions(responder);
  double best = val(0);
  for (std::size_t a = 1; a < n; ++a) best = std::max(best, val(a));
  std::vector<std::size_t> out;
  for (std::size_t a = 0; a < n; ++a)
    if (val(a) == best) out.push_back(a);
  return out;
}

inline std::vector<std::pair<std::size_t, std::size_t>> pure_nash_equilibria(const NormalFormGame& g) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t a1 = 0; a1 < g.num_actions(1); ++a1)
    for (std::size_t a2 = 0; a2 < g.num_actions(2); ++a2) {
      auto b1 = best_responses(g, 1, a2);
      auto b2 = best_responses(g, 2, a1);
      if (std::find(b1.begin(), b1.end(), a1) != b1.end() && std::find(b2.begin(), b2.end(), a2) != b2.end())
        out.emplace_back(a1, a2);
    }
  return out;
}

struct MixedProfile {
  std::array<std::vector<double>, 2> probs;

  static MixedProfile pure(const NormalFormGame& g, std::size_t a1, std::size_t a2) {
    MixedProfile p;
    p.probs[0].assign(g.num_actions(1), 0.0);
    p.probs[1].assign(g.num_actions(2), 0.0);
    p.probs[0][a1] = p.probs[1][a2] = 1.0;
    return p;
  }
  void check(const NormalFormGame& g) const {
    for (int i = 0; i < 2; ++i) {
      if (probs[i].size() != g.num_actions(i + 1)) throw std::invalid_argument("profile size mismatch");
      double s = 0.0;
      for (double x : probs[i]) {
        if (!(x >= 0.0)) throw std::invalid_argument("negative probability");
        s += x;
      }
      if (std::abs(s - 1.0) > 1e-9) throw std::invalid_argument("probabilities must sum to 1");
    }
  }
};

inline double expected_utility(const NormalFormGame& g, const MixedProfile& p, int player) {
  p.check(g);
  double s = 0.0;
  for (std::size_t a1 = 0; a1 < g.num_actions(1); ++a1)
    for (std::size_t a2 = 0; a2 < g.num_actions(2); ++a2) s += p.probs[0][a1] * p.probs[1][a2] * g.u(player, a1, a2);
  return s;
}

/// Scans pure deviations; enough for bilinear payoffs.
inline bool is_nash_equilibrium(const NormalFormGame& g, const MixedProfile& p, double tolerance) {
  for (int i = 1; i <= 2; ++i) {
    const double base = expected_utility(g, p, i);
    for (std::size_t a = 0; a < g.num_actions(i); ++a) {
      MixedProfile q = p;
      q.probs[i - 1].assign(g.num_actions(i), 0.0);
      q.probs[i - 1][a] = 1.0;
      if (expected_utility(g, q, i) > base + tolerance) return false;
    }
  }
  return true;
}

inline bool is_symmetric(const NormalFormGame& g) {
  const std::size_t n = g.num_actions(1);
  if (g.num_actions(2) != n) return false;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (g.u(1, a, b) != g.u(2, b, a)) return false;
  return true;
}

struct SymmetricSelection {
  std::optional<std::vector<double>> strategy;  // empty when no candidate is symmetric
  bool tie = false;
};

/// Best symmetric profile (sigma, sigma) among the supplied equilibria by u1.
inline SymmetricSelection select_symmetric_equilibrium(const NormalFormGame& g,
                                                       const std::vector<MixedProfile>& equilibria) {
  if (!is_symmetric(g)) throw std::invalid_argument("game is not symmetric");
  SymmetricSelection sel;
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& p : equilibria) {
    bool same = p.probs[0].size() == p.probs[1].size();
    for (std::size_t k = 0; same && k < p.probs[0].size(); ++k) same = std::abs(p.probs[0][k] - p.probs[1][k]) <= 1e-9;
    if (!same) continue;
    const double v = expected_utility(g, p, 1);
    if (!sel.strategy || v > best) {
      sel.strategy = p.probs[0];
      sel.tie = false;
      best = v;
    } else if (v == best) {
      sel.tie = true;
      if (p.probs[0] < *sel.strategy) sel.strategy = p.probs[0];
    }
  }
  return sel;
}

// ---------------------------------------------------------------------------
// Turn-taking games

struct GameNode {
  int player = 0;  // 1|2 at decision nodes, 0 at leaves
  std::vector<std::pair<std::string, std::size_t>> children;  // edge label, node index
  Payoff payoff{0.0, 0.0};
  bool leaf() const { return children.empty(); }
};

/// Node 0 is the root.
struct TurnTakingGame {
  std::vector<GameNode> nodes;

  std::size_t add_leaf(Payoff p) {
    nodes.push_back({0, {}, p});
    return nodes.size() - 1;
  }
  std::size_t add_decision(int player, std::vector<std::pair<std::string, std::size_t>> children) {
    nodes.push_back({player, std::move(children), {0.0, 0.0}});
    return nodes.size() - 1;
  }
  void check() const {
    if (nodes.empty()) throw ConfigError("empty game tree");
    std::vector<int> seen(nodes.size(), 0);
    std::vector<std::size_t> stack{0};
    while (!stack.empty()) {
      const std::size_t n = stack.back();
      stack.pop_back();
      if (n >= nodes.size()) throw ConfigError("child index out of range");
      if (seen[n]++) throw ConfigError("game tree has a shared or cyclic node");
      const auto& nd = nodes[n];
      if (!nd.leaf() && nd.player != 1 && nd.player != 2) throw ConfigError("decision node needs player 1 or 2");
      for (auto& c : nd.children) stack.push_back(c.second);
    }
  }
};

/// Decision node of `player` -> chosen child position.
struct PureStrategyProfile {
  std::array<std::map<std::size_t, std::size_t>, 2> choice;
};

/// Decision nodes of a player in depth-first preorder.
inline std::vector<std::size_t> decision_nodes(const TurnTakingGame& g, int player) {
  std::vector<std::size_t> out, stack{0};
  while (!stack.empty()) {
    const std::size_t n = stack.back();
    stack.pop_back();
    const auto& nd = g.nodes[n];
    if (!nd.leaf() && nd.player == player) out.push_back(n);
    for (auto it = nd.children.rbegin(); it != nd.children.rend(); ++it) stack.push_back(it->second);
  }
  return out;
}

inline Payoff play_out(const TurnTakingGame& g, const PureStrategyProfile& p) {
  std::size_t n = 0;
  while (!g.nodes[n].leaf()) n = g.nodes[n].children[p.choice[g.nodes[n].player - 1].at(n)].second;
  return g.nodes[n].payoff;
}

struct SpeResult {
  PureStrategyProfile profile;
  Payoff payoff{0.0, 0.0};
  bool multiple = false;  // some node had a tie, so other SPE may exist
};

/// Leaf-to-root induction; ties go to the first child.
inline SpeResult backward_induction(const TurnTakingGame& g) {
  g.check();
  SpeResult r;
  std::vector<Payoff> value(g.nodes.size());
  // children always have larger preorder positions, so process preorder reversed
  std::vector<std::size_t> order, stack{0};
  while (!stack.empty()) {
    const std::size_t n = stack.back();
    stack.pop_back();
    order.push_back(n);
    for (auto& c : g.nodes[n].children) stack.push_back(c.second);
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto& nd = g.nodes[*it];
    if (nd.leaf()) {
      value[*it] = nd.payoff;
      continue;
    }
    const int p = nd.player - 1;
    std::size_t best = 0;
    for (std::size_t k = 1; k < nd.children.size(); ++k) {
      const double v = value[nd.children[k].second][p], b = value[nd.children[best].second][p];
      if (v > b) best = k;
    }
    for (std::size_t k = 0; k < nd.children.size(); ++k)
      if (k != best && value[nd.children[k].second][p] == value[nd.children[best].second][p]) r.multiple = true;
    r.profile.choice[p][*it] = best;
    value[*it] = value[nd.children[best].second];
  }
  r.payoff = value[0];
  return r;
}

inline constexpr std::size_t kMaxStrategies = 10000;

struct InducedGame {
  NormalFormGame game;
  std::array<std::vector<std::size_t>, 2> nodes;  // decision nodes per player, preorder
};

namespace detail {

inline std::size_t strategy_count(const TurnTakingGame& g, const std::vector<std::size_t>& nodes) {
  std::size_t n = 1;
  for (auto v : nodes) {
    n *= g.nodes[v].children.size();
    if (n > kMaxStrategies) throw std::length_error("too many pure strategies for the induced normal form");
  }
  return n;
}

// mixed radix, first node most significant
inline std::map<std::size_t, std::size_t> strategy_at(const TurnTakingGame& g, const std::vector<std::size_t>& nodes,
                                                      std::size_t k) {
  std::map<std::size_t, std::size_t> m;
  for (auto it = nodes.rbegin(); it != nodes.rend(); ++it) {
    const std::size_t b = g.nodes[*it].children.size();
    m[*it] = k % b;
    k /= b;
  }
  return m;
}

}  // namespace detail

/// Row/column index of a player's strategy in the induced normal form.
inline std::size_t strategy_index(const TurnTakingGame& g, const std::vector<std::size_t>& nodes,
                                  const std::map<std::size_t, std::size_t>& choice) {
  std::size_t k = 0;
  for (auto v : nodes) k = k * g.nodes[v].children.size() + choice.at(v);
  return k;
}

/// One row/column per pure strategy; labels concatenate the chosen edge labels.
inline InducedGame induced_normal_form(const TurnTakingGame& g) {
  g.check();
  InducedGame ig;
  std::array<std::size_t, 2> count{};
  for (int p = 0; p < 2; ++p) {
    ig.nodes[p] = decision_nodes(g, p + 1);
    count[p] = detail::strategy_count(g, ig.nodes[p]);
    for (std::size_t k = 0; k < count[p]; ++k) {
      auto m = detail::strategy_at(g, ig.nodes[p], k);
      std::string label;
      for (auto v : ig.nodes[p]) label += g.nodes[v].children[m[v]].first;
      ig.game.action_labels[p].push_back(label.empty() ? "-" : label);
    }
  }
  ig.game.payoffs.assign(count[0], std::vector<Payoff>(count[1]));
  for (std::size_t a = 0; a < count[0]; ++a)
    for (std::size_t b = 0; b < count[1]; ++b) {
      PureStrategyProfile prof;
      prof.choice[0] = detail::strategy_at(g, ig.nodes[0], a);
      prof.choice[1] = detail::strategy_at(g, ig.nodes[1], b);
      ig.game.payoffs[a][b] = play_out(g, prof);
    }
  return ig;
}

// ---------------------------------------------------------------------------
// JSON

inline NormalFormGame normal_form_from_json(const json& j) {
  NormalFormGame g;
  try {
    for (int p = 0; p < 2; ++p) g.action_labels[p] = j.at("actions").at(p).get<std::vector<std::string>>();
    for (const auto& row : j.at("payoffs")) {
      std::vector<Payoff> r;
      for (const auto& cell : row) r.push_back({cell.at(0).get<double>(), cell.at(1).get<double>()});
      g.payoffs.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad normal-form game: ") + e.what());
  }
  g.check();
  return g;
}

inline json normal_form_to_json(const NormalFormGame& g) {
  json j;
  j["type"] = "normal";
  j["actions"] = json::array({json(g.action_labels[0]), json(g.action_labels[1])});
  j["payoffs"] = json::array();
  for (const auto& row : g.payoffs) {
    json r = json::array();
    for (const auto& c : row) r.push_back({c[0], c[1]});
    j["payoffs"].push_back(r);
  }
  return j;
}

namespace detail {

inline std::size_t tree_node_from_json(TurnTakingGame& g, const json& j) {
  if (j.contains("payoff")) return g.add_leaf({j["payoff"].at(0).get<double>(), j["payoff"].at(1).get<double>()});
  const std::size_t me = g.add_decision(j.at("player").get<int>(), {});
  for (const auto& c : j.at("children")) {
    const std::size_t child = tree_node_from_json(g, c.at("node"));
    g.nodes[me].children.emplace_back(c.at("action").get<std::string>(), child);
  }
  if (g.nodes[me].children.empty()) throw ConfigError("decision node without children");
  return me;
}

inline json tree_node_to_json(const TurnTakingGame& g, std::size_t n) {
  const auto& nd = g.nodes[n];
  if (nd.leaf()) return json{{"payoff", {nd.payoff[0], nd.payoff[1]}}};
  json j{{"player", nd.player}, {"children", json::array()}};
  for (const auto& [label, c] : nd.children) j["children"].push_back({{"action", label}, {"node", tree_node_to_json(g, c)}});
  return j;
}

}  // namespace detail

inline TurnTakingGame tree_from_json(const json& j) {
  TurnTakingGame g;
  try {
    detail::tree_node_from_json(g, j.at("root"));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad game tree: ") + e.what());
  }
  g.check();
  return g;
}

inline json tree_to_json(const TurnTakingGame& g) {
  return json{{"type", "tree"}, {"root", detail::tree_node_to_json(g, 0)}};
}

}  // namespace nego
