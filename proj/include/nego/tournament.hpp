#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nego/domain.hpp"
#include "nego/domain_io.hpp"
#include "nego/protocol.hpp"
#include "nego/spec.hpp"

namespace nego {

struct TournamentDomain {
  std::string id;
  NegotiationDomain domain;
};

struct TournamentConfig {
  std::vector<TournamentDomain> domains;
  std::vector<std::string> strategies;
  std::size_t sessions_per_pairing = 1;
  SessionConfig session;  // seed is ignored, each session derives its own
  std::uint64_t base_seed = 0;
  bool side_swap = true;

  void check() const {
    if (domains.empty()) throw ConfigError("tournament needs at least one domain");
    if (strategies.empty()) throw ConfigError("tournament needs at least one strategy");
    if (sessions_per_pairing < 1) throw ConfigError("sessions_per_pairing must be >= 1");
    session.check();
    for (const auto& s : strategies) make_strategy(s);  // parse errors surface here
  }
};

/**
 * Domain entry: a file path, or an object with "generator":
 *   {"generator": "split_the_pie", "offers": 101}
 *   {"generator": "random_linear", "issues": [4, 5], "seed": 3, "opposition": 0.5, "reservation": [0, 0]}
 * An optional "name" overrides the id.
 */
inline TournamentDomain domain_from_entry(const json& e, const std::string& base_dir = "") {
  try {
    if (e.is_string()) {
      std::string path = e.get<std::string>();
      if (!base_dir.empty() && !path.empty() && path[0] != '/') path = base_dir + "/" + path;
      return {e.get<std::string>(), load_domain(path)};
    }
    const std::string gen = e.at("generator").get<std::string>();
    if (gen == "split_the_pie") {
      const auto n = e.at("offers").get<std::size_t>();
      return {e.value("name", "split_the_pie(" + std::to_string(n) + ")"), generate_split_the_pie(n)};
    }
    if (gen == "random_linear") {
      const auto issues = e.at("issues").get<std::vector<std::size_t>>();
      const auto seed = e.value("seed", std::uint64_t{0});
      const double hint = e.value("opposition", 0.5);
      std::array<double, 2> r{0.0, 0.0};
      if (e.contains("reservation")) r = {e["reservation"].at(0).get<double>(), e["reservation"].at(1).get<double>()};
      std::string id = "random_linear(";
      for (std::size_t k = 0; k < issues.size(); ++k) id += (k ? "x" : "") + std::to_string(issues[k]);
      id += ",seed=" + std::to_string(seed) + ")";
      return {e.value("name", id), generate_random_linear_domain(issues, seed, hint, r)};
    }
    throw ConfigError("unknown domain generator '" + gen + "'");
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("bad domain entry: ") + ex.what());
  } catch (const PreconditionError& ex) {
    throw ConfigError(std::string("bad domain entry: ") + ex.what());
  }
}

inline DelayModel delay_from_json(const json& j) {
  const std::string kind = j.value("kind", "uniform");
  if (kind == "constant") return DelayModel::constant(j.at("value").get<double>());
  if (kind == "uniform") return DelayModel::uniform(j.value("a", 0.001), j.value("b", 0.01));
  throw ConfigError("unknown delay kind '" + kind + "'");
}

inline TournamentConfig tournament_config_from_json(const json& j, const std::string& base_dir = "") {
  TournamentConfig c;
  try {
    for (const auto& e : j.at("domains")) c.domains.push_back(domain_from_entry(e, base_dir));
    c.strategies = j.at("strategies").get<std::vector<std::string>>();
    c.sessions_per_pairing = j.value("sessions_per_pairing", std::size_t{1});
    if (j.contains("deadline")) {
      const auto& d = j["deadline"];
      c.session.deadline = d.is_null() || (d.is_string() && d.get<std::string>() == "inf") ? kInf : d.get<double>();
    } else {
      c.session.deadline = 10.0;
    }
    if (j.contains("max_rounds") && !j["max_rounds"].is_null()) c.session.max_rounds = j["max_rounds"].get<long>();
    if (j.contains("delay")) c.session.delay = delay_from_json(j["delay"]);
    c.session.think_time = j.value("think_time", c.session.think_time);
    c.base_seed = j.value("base_seed", std::uint64_t{0});
    c.side_swap = j.value("side_swap", true);
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("bad tournament config: ") + ex.what());
  }
  c.check();
  return c;
}

inline TournamentConfig load_tournament_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& ex) {
    throw ConfigError(path + ": " + ex.what());
  }
  const auto slash = path.find_last_of('/');
  return tournament_config_from_json(j, slash == std::string::npos ? "" : path.substr(0, slash));
}

// ---------------------------------------------------------------------------

struct MatchRecord {
  std::string domain;
  std::size_t domain_index = 0;
  std::string strategy_a, strategy_b;  // side a is agent 1
  std::uint64_t seed = 0;
  bool agreement = false;
  bool violation = false;
  std::array<double, 2> payoffs{0.0, 0.0};
  std::optional<std::array<double, 2>> utilities;  // undiscounted, agreements only
  std::optional<double> time;
  std::optional<std::string> offer;  // offer key of the agreement
  std::size_t rounds = 0;
  bool pareto = false;

  bool operator==(const MatchRecord&) const = default;
};

inline MatchRecord make_record(const TournamentDomain& td, std::size_t domain_index, const std::string& a,
                               const std::string& b, std::uint64_t seed, const SessionResult& res) {
  MatchRecord r;
  r.domain = td.id;
  r.domain_index = domain_index;
  r.strategy_a = a;
  r.strategy_b = b;
  r.seed = seed;
  r.agreement = res.outcome.agreed();
  r.violation = res.outcome.violation;
  r.payoffs = res.outcome.payoffs;
  r.rounds = res.history.size();
  if (r.agreement) {
    const Offer& o = *res.outcome.accepted_offer;
    r.utilities = std::array<double, 2>{td.domain.u(1, o), td.domain.u(2, o)};
    r.time = res.outcome.agreement_time;
    r.offer = offer_key(o);
    const auto front = pareto_indices(td.domain);
    r.pareto = std::binary_search(front.begin(), front.end(), td.domain.space().index_of(o));
  }
  return r;
}

/// Session seed from the tournament coordinates.
inline std::uint64_t session_seed(std::uint64_t base, std::size_t domain, std::size_t pairing, std::size_t session,
                                  std::size_t order) {
  return derive_seed(base, {domain, pairing, session, order});
}

/**
 * Round robin over unordered strategy pairs including self-play, both seatings
 * when side_swap is on. Fresh strategy instances per session. Output is sorted
 * by seed.
 */
inline std::vector<MatchRecord> run_tournament(const TournamentConfig& cfg) {
  cfg.check();
  std::vector<MatchRecord> out;
  const std::size_t n = cfg.strategies.size();
  for (std::size_t di = 0; di < cfg.domains.size(); ++di) {
    const auto& td = cfg.domains[di];
    std::size_t pairing = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j, ++pairing)
        for (std::size_t s = 0; s < cfg.sessions_per_pairing; ++s)
          for (std::size_t order = 0; order < (cfg.side_swap ? 2u : 1u); ++order) {
            const std::string& a = order == 0 ? cfg.strategies[i] : cfg.strategies[j];
            const std::string& b = order == 0 ? cfg.strategies[j] : cfg.strategies[i];
            SessionConfig sc = cfg.session;
            sc.seed = session_seed(cfg.base_seed, di, pairing, s, order);
            auto s1 = make_strategy(a, derive_seed(sc.seed, {3}));
            auto s2 = make_strategy(b, derive_seed(sc.seed, {4}));
            out.push_back(make_record(td, di, a, b, sc.seed, run_session(td.domain, *s1, *s2, sc)));
          }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.seed < y.seed; });
  return out;
}

// ---------------------------------------------------------------------------
// Metrics

struct Aggregate {
  std::size_t count = 0;
  double mean_payoff = 0.0;
  double stddev_payoff = 0.0;  // population
  double agreement_rate = 0.0;
  std::optional<double> mean_agreement_time;
  double pareto_rate = 0.0;  // among agreements
};

struct DomainMetrics {
  std::string id;
  double opposition_euclidean = 0.0;
  double opposition_min_utility = 0.0;
  double opposition_kalai = 0.0;
};

struct MetricsSummary {
  std::map<std::string, Aggregate> per_strategy;  // over every seat the strategy took
  std::map<std::string, Aggregate> per_pairing;   // key "a | b", seat a's payoffs
  std::vector<DomainMetrics> per_domain;
};

namespace detail {

struct Samples {
  std::vector<double> payoffs, times;
  std::size_t agreements = 0, pareto = 0;

  void add(double payoff, const MatchRecord& r, bool pareto_flag) {
    payoffs.push_back(payoff);
    if (r.agreement) {
      ++agreements;
      times.push_back(*r.time);
      if (pareto_flag) ++pareto;
    }
  }
  Aggregate finish() const {
    Aggregate a;
    a.count = payoffs.size();
    if (a.count == 0) return a;
    double s = 0.0;
    for (double x : payoffs) s += x;
    a.mean_payoff = s / static_cast<double>(a.count);
    double v = 0.0;
    for (double x : payoffs) v += (x - a.mean_payoff) * (x - a.mean_payoff);
    a.stddev_payoff = std::sqrt(v / static_cast<double>(a.count));
    a.agreement_rate = static_cast<double>(agreements) / static_cast<double>(a.count);
    if (!times.empty()) {
      double t = 0.0;
      for (double x : times) t += x;
      a.mean_agreement_time = t / static_cast<double>(times.size());
    }
    if (agreements) a.pareto_rate = static_cast<double>(pareto) / static_cast<double>(agreements);
    return a;
  }
};

}  // namespace detail

inline std::string pairing_key(const std::string& a, const std::string& b) { return a + " | " + b; }

/// Pareto flags are recomputed from the domains rather than trusted from the records.
inline MetricsSummary compute_metrics(const std::vector<MatchRecord>& records,
                                      const std::vector<TournamentDomain>& domains) {
  if (records.empty()) throw std::invalid_argument("no records");
  std::vector<std::vector<std::size_t>> fronts;
  for (const auto& td : domains) fronts.push_back(pareto_indices(td.domain));
  std::map<std::string, detail::Samples> st, pr;
  for (const auto& r : records) {
    bool par = false;
    if (r.agreement) {
      const auto& d = domains.at(r.domain_index).domain;
      const auto idx = d.space().index_of(parse_offer_key(*r.offer));
      const auto& f = fronts[r.domain_index];
      par = std::binary_search(f.begin(), f.end(), idx);
    }
    st[r.strategy_a].add(r.payoffs[0], r, par);
    st[r.strategy_b].add(r.payoffs[1], r, par);
    pr[pairing_key(r.strategy_a, r.strategy_b)].add(r.payoffs[0], r, par);
  }
  MetricsSummary m;
  for (auto& [k, s] : st) m.per_strategy[k] = s.finish();
  for (auto& [k, s] : pr) m.per_pairing[k] = s.finish();
  for (const auto& td : domains)
    m.per_domain.push_back({td.id, opposition(td.domain, OppositionMeasure::euclidean),
                            opposition(td.domain, OppositionMeasure::min_utility),
                            opposition(td.domain, OppositionMeasure::kalai_euclidean)});
  return m;
}

// ---------------------------------------------------------------------------
// Output

inline const char* kRecordCsvHeader = "domain,strategy_a,strategy_b,seed,status,payoff_a,payoff_b,u_a,u_b,time,rounds,pareto";

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

inline const char* status_string(const MatchRecord& r) {
  if (r.violation) return "violation";
  return r.agreement ? "agreement" : "failure";
}

inline void write_records_csv(std::ostream& out, const std::vector<MatchRecord>& records) {
  out << kRecordCsvHeader << '\n';
  for (const auto& r : records) {
    out << csv_field(r.domain) << ',' << csv_field(r.strategy_a) << ',' << csv_field(r.strategy_b) << ',' << r.seed
        << ',' << status_string(r) << ',' << format_double(r.payoffs[0]) << ',' << format_double(r.payoffs[1]) << ',';
    if (r.utilities) out << format_double((*r.utilities)[0]) << ',' << format_double((*r.utilities)[1]) << ',';
    else out << ",,";
    if (r.time) out << format_double(*r.time);
    out << ',' << r.rounds << ',' << (r.pareto ? 1 : 0) << '\n';
  }
}

inline json record_to_json(const MatchRecord& r) {
  json j{{"domain", r.domain},
         {"domain_index", r.domain_index},
         {"strategy_a", r.strategy_a},
         {"strategy_b", r.strategy_b},
         {"seed", r.seed},
         {"status", status_string(r)},
         {"payoff_a", r.payoffs[0]},
         {"payoff_b", r.payoffs[1]},
         {"u_a", nullptr},
         {"u_b", nullptr},
         {"time", nullptr},
         {"offer", nullptr},
         {"rounds", r.rounds},
         {"pareto", r.pareto}};
  if (r.utilities) {
    j["u_a"] = (*r.utilities)[0];
    j["u_b"] = (*r.utilities)[1];
  }
  if (r.time) j["time"] = *r.time;
  if (r.offer) j["offer"] = *r.offer;
  return j;
}

inline MatchRecord record_from_json(const json& j) {
  MatchRecord r;
  r.domain = j.at("domain").get<std::string>();
  r.domain_index = j.at("domain_index").get<std::size_t>();
  r.strategy_a = j.at("strategy_a").get<std::string>();
  r.strategy_b = j.at("strategy_b").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  const auto status = j.at("status").get<std::string>();
  r.agreement = status == "agreement";
  r.violation = status == "violation";
  r.payoffs = {j.at("payoff_a").get<double>(), j.at("payoff_b").get<double>()};
  if (!j.at("u_a").is_null()) r.utilities = std::array<double, 2>{j["u_a"].get<double>(), j["u_b"].get<double>()};
  if (!j.at("time").is_null()) r.time = j["time"].get<double>();
  if (!j.at("offer").is_null()) r.offer = j["offer"].get<std::string>();
  r.rounds = j.at("rounds").get<std::size_t>();
  r.pareto = j.at("pareto").get<bool>();
  return r;
}

inline void write_records_jsonl(std::ostream& out, const std::vector<MatchRecord>& records) {
  for (const auto& r : records) out << record_to_json(r).dump() << '\n';
}

inline std::vector<MatchRecord> read_records_jsonl(std::istream& in) {
  std::vector<MatchRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(record_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw ConfigError(std::string("bad record line: ") + e.what());
    }
  }
  return out;
}

inline json metrics_to_json(const MetricsSummary& m) {
  auto agg = [](const Aggregate& a) {
    json j{{"count", a.count},
           {"mean_payoff", a.mean_payoff},
           {"stddev_payoff", a.stddev_payoff},
           {"agreement_rate", a.agreement_rate},
           {"mean_agreement_time", nullptr},
           {"pareto_rate", a.pareto_rate}};
    if (a.mean_agreement_time) j["mean_agreement_time"] = *a.mean_agreement_time;
    return j;
  };
  json j{{"per_strategy", json::object()}, {"per_pairing", json::object()}, {"per_domain", json::array()}};
  for (const auto& [k, a] : m.per_strategy) j["per_strategy"][k] = agg(a);
  for (const auto& [k, a] : m.per_pairing) j["per_pairing"][k] = agg(a);
  for (const auto& d : m.per_domain)
    j["per_domain"].push_back({{"id", d.id},
                               {"opposition_euclidean", d.opposition_euclidean},
                               {"opposition_min_utility", d.opposition_min_utility},
                               {"opposition_kalai", d.opposition_kalai}});
  return j;
}

enum class EmitFormat { csv, jsonl };

/// Writes the records; the summary goes next to them as <path>.metrics.json.
inline void emit(const std::vector<MatchRecord>& records, const std::optional<MetricsSummary>& summary,
                 EmitFormat fmt, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  if (fmt == EmitFormat::csv) write_records_csv(out, records);
  else write_records_jsonl(out, records);
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
  if (summary) {
    std::ofstream ms(path + ".metrics.json", std::ios::binary);
    if (!ms) throw std::runtime_error("cannot write " + path + ".metrics.json");
    ms << metrics_to_json(*summary).dump(2) << '\n';
    if (!ms) throw std::runtime_error("write failed: " + path + ".metrics.json");
  }
}

}  // namespace nego
