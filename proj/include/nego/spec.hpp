#pragma once

// Strategy and model spec strings, e.g.
//   timebased(beta=0.9,gamma=0.1,mode=min_own)
//   repropose:adaptive(beta_min=0.5,model=bayes(c=1,sigma=0.2))

#include <cctype>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "nego/domain_io.hpp"
#include "nego/opponent_model.hpp"
#include "nego/strategies.hpp"

namespace nego {

struct ParsedSpec {
  std::string name;
  std::map<std::string, std::string> args;  // values kept verbatim, nested specs included
  bool repropose = false;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline bool ident(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

}  // namespace detail

inline ParsedSpec parse_spec(const std::string& text) {
  ParsedSpec p;
  std::string s = detail::trim(text);
  const std::string prefix = "repropose:";
  if (s.rfind(prefix, 0) == 0) {
    p.repropose = true;
    s = detail::trim(s.substr(prefix.size()));
  }
  const auto open = s.find('(');
  if (open == std::string::npos) {
    p.name = s;
  } else {
    if (s.back() != ')') throw ConfigError("spec '" + text + "': missing closing ')'");
    p.name = detail::trim(s.substr(0, open));
    const std::string body = s.substr(open + 1, s.size() - open - 2);
    int depth = 0;
    std::string cur;
    std::vector<std::string> parts;
    for (char c : body) {
      if (c == '(') ++depth;
      if (c == ')' && --depth < 0) throw ConfigError("spec '" + text + "': unbalanced ')'");
      if (c == ',' && depth == 0) {
        parts.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (depth != 0) throw ConfigError("spec '" + text + "': unbalanced '('");
    if (!detail::trim(cur).empty() || !parts.empty()) parts.push_back(cur);
    for (auto& part : parts) {
      const auto eq = part.find('=');
      if (eq == std::string::npos) throw ConfigError("spec '" + text + "': expected key=value, got '" + part + "'");
      const std::string k = detail::trim(part.substr(0, eq));
      const std::string v = detail::trim(part.substr(eq + 1));
      if (!detail::ident(k) || v.empty()) throw ConfigError("spec '" + text + "': bad argument '" + part + "'");
      if (!p.args.emplace(k, v).second) throw ConfigError("spec '" + text + "': duplicate argument '" + k + "'");
    }
  }
  if (!detail::ident(p.name)) throw ConfigError("spec '" + text + "': bad name '" + p.name + "'");
  return p;
}

/// Reads typed arguments and rejects anything left unread.
class SpecArgs {
 public:
  explicit SpecArgs(const ParsedSpec& p) : p_(p), left_(p.args) {}

  bool has(const std::string& k) const { return p_.args.count(k) > 0; }

  std::optional<double> num(const std::string& k) {
    auto it = left_.find(k);
    if (it == left_.end()) return std::nullopt;
    std::string v = it->second;
    left_.erase(it);
    if (v == "inf") return std::numeric_limits<double>::infinity();
    try {
      std::size_t used = 0;
      double x = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (const std::exception&) {
      throw ConfigError("spec '" + p_.name + "': '" + k + "=" + v + "' is not a number");
    }
  }
  double num(const std::string& k, double def) { return num(k).value_or(def); }

  std::optional<std::string> str(const std::string& k) {
    auto it = left_.find(k);
    if (it == left_.end()) return std::nullopt;
    std::string v = it->second;
    left_.erase(it);
    return v;
  }

  template <class E>
  E choice(const std::string& k, const std::map<std::string, E>& options, E def) {
    auto v = str(k);
    if (!v) return def;
    auto it = options.find(*v);
    if (it == options.end()) throw ConfigError("spec '" + p_.name + "': unknown value '" + *v + "' for " + k);
    return it->second;
  }

  void done() const {
    if (!left_.empty())
      throw ConfigError("spec '" + p_.name + "': unknown argument '" + left_.begin()->first + "'");
  }

 private:
  const ParsedSpec& p_;
  std::map<std::string, std::string> left_;
};

/// `seed` feeds models that draw noise (dummy).
inline std::unique_ptr<OpponentModel> make_model(const std::string& text, std::uint64_t seed = 0) {
  const ParsedSpec p = parse_spec(text);
  if (p.repropose) throw ConfigError("model spec '" + text + "' cannot be reproposing");
  SpecArgs a(p);
  std::unique_ptr<OpponentModel> m;
  if (p.name == "bayes") {
    const double c = a.num("c", 1.0), sigma = a.num("sigma", 0.15);
    m = std::make_unique<BayesModel>(c, sigma);
  } else if (p.name == "scalable_bayes") {
    const double c = a.num("c", 1.0), sigma = a.num("sigma", 0.15);
    m = std::make_unique<ScalableBayesModel>(c, sigma);
  } else if (p.name == "frequency") {
    m = std::make_unique<FrequencyModel>();
  } else if (p.name == "dummy") {
    m = std::make_unique<DummyModel>(a.num("noise", 0.0), seed);
  } else {
    throw ConfigError("unknown opponent model '" + p.name + "'");
  }
  a.done();
  return m;
}

namespace detail {

inline AcceptanceRule parse_acceptance(SpecArgs& a, AcceptanceRule::Kind def) {
  AcceptanceRule r;
  r.kind = a.choice<AcceptanceRule::Kind>("accept",
                                          {{"ac_next", AcceptanceRule::Kind::ac_next},
                                           {"ac_asp", AcceptanceRule::Kind::ac_asp},
                                           {"ac_low", AcceptanceRule::Kind::ac_low}},
                                          def);
  r.a = a.num("a", 1.0);
  r.b = a.num("b", 0.0);
  return r;
}

inline ConcessionBasis parse_basis(SpecArgs& a, const std::string& key) {
  return a.choice<ConcessionBasis>(key,
                                   {{"own", ConcessionBasis::own_utility},
                                    {"opp", ConcessionBasis::opponent_estimate},
                                    {"count", ConcessionBasis::count},
                                    {"relative", ConcessionBasis::relative}},
                                   ConcessionBasis::own_utility);
}

}  // namespace detail

/**
 * Builds a fresh strategy instance. Throws ConfigError naming the offending
 * token. `seed` only reaches models that need their own noise stream.
 */
inline std::unique_ptr<BoaNegotiator> make_strategy(const std::string& text, std::uint64_t seed = 0) {
  const ParsedSpec p = parse_spec(text);
  SpecArgs a(p);
  std::unique_ptr<BoaNegotiator> s;
  std::optional<std::string> model = a.str("model");

  if (p.name == "timebased") {
    TimeBasedParams tp;
    tp.alpha = a.num("alpha");
    tp.beta = a.num("beta");
    tp.gamma = a.num("gamma", tp.gamma);
    tp.target_fraction = a.num("tprime", tp.target_fraction);
    tp.mode = a.choice<BidMode>("mode", {{"min_own", BidMode::min_own}, {"max_opponent", BidMode::max_opponent}},
                                BidMode::min_own);
    tp.accept = detail::parse_acceptance(a, AcceptanceRule::Kind::ac_asp);
    if (!(tp.gamma > 0.0)) throw ConfigError("timebased: gamma must be > 0");
    if (!(tp.target_fraction > 0.0 && tp.target_fraction <= 1.0))
      throw ConfigError("timebased: tprime must be in (0, 1]");
    s = std::make_unique<TimeBasedNegotiator>(tp);
  } else if (p.name == "adaptive") {
    AdaptiveParams ap;
    ap.alpha = a.num("alpha");
    ap.beta_min = a.num("beta_min");
    ap.gamma = a.num("gamma", ap.gamma);
    ap.target_fraction = a.num("tprime", ap.target_fraction);
    ap.safety = a.num("safety", ap.safety);
    ap.predictor = a.choice<AdaptiveParams::Predictor>(
        "predictor", {{"gp", AdaptiveParams::Predictor::gp}, {"lowest", AdaptiveParams::Predictor::lowest}},
        AdaptiveParams::Predictor::gp);
    if (auto g = a.str("gp")) {
      const ParsedSpec gp = parse_spec(*g);
      if (gp.name != "gp") throw ConfigError("adaptive: gp= expects gp(...), got '" + *g + "'");
      SpecArgs ga(gp);
      ap.length_scale_fraction = ga.num("lengthscale", ap.length_scale_fraction);
      ap.window_fraction = ga.num("window", ap.window_fraction);
      ga.done();
    }
    ap.accept = detail::parse_acceptance(a, AcceptanceRule::Kind::ac_asp);
    if (!(ap.gamma > 0.0)) throw ConfigError("adaptive: gamma must be > 0");
    if (!(ap.length_scale_fraction > 0.0) || !(ap.window_fraction > 0.0))
      throw ConfigError("adaptive: gp lengthscale and window must be > 0");
    if (!model) model = "scalable_bayes";
    s = std::make_unique<AdaptiveNegotiator>(ap);
  } else if (p.name == "tft") {
    TftConfig tc;
    tc.measure_self = detail::parse_basis(a, "measure_self");
    tc.measure_opponent = detail::parse_basis(a, "measure_opp");
    tc.e_min = a.num("emin", 0.0);
    tc.e_max = a.num("emax");
    tc.selector = a.choice<TftConfig::Selector>(
        "selector", {{"own_max", TftConfig::Selector::own_max}, {"opponent_max", TftConfig::Selector::opponent_max}},
        TftConfig::Selector::own_max);
    if (tc.e_min < 0.0) throw ConfigError("tft: emin must be >= 0");
    if (tc.e_max && !(*tc.e_max > tc.e_min)) throw ConfigError("tft: emax must exceed emin");
    s = std::make_unique<TftNegotiator>(tc, detail::parse_acceptance(a, AcceptanceRule::Kind::ac_next));
  } else if (p.name == "micro") {
    s = std::make_unique<MicroNegotiator>();
  } else if (p.name == "random") {
    s = std::make_unique<RandomNegotiator>(a.num("threshold", 0.9));
  } else {
    throw ConfigError("unknown strategy '" + p.name + "'");
  }
  a.done();
  if (model) s->set_model(make_model(*model, seed));
  s->set_repropose(p.repropose);
  return s;
}

}  // namespace nego
