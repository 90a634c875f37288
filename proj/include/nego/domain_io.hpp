#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "nego/domain.hpp"

namespace nego {

using json = nlohmann::json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// "i/j/k" form of an offer, used as a table key and in history logs.
inline std::string offer_key(const Offer& o) {
  std::string s;
  for (std::size_t j = 0; j < o.size(); ++j) {
    if (j) s += '/';
    s += std::to_string(o[j]);
  }
  return s;
}

inline Offer parse_offer_key(const std::string& key) {
  Offer o;
  std::stringstream ss(key);
  std::string part;
  while (std::getline(ss, part, '/')) {
    try {
      std::size_t used = 0;
      o.push_back(std::stoi(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw ConfigError("bad offer key '" + key + "'");
    }
  }
  return o;
}

inline json domain_to_json(const NegotiationDomain& d) {
  json j;
  j["issues"] = json::array();
  for (const auto& is : d.space().issues())
    j["issues"].push_back({{"name", is.name}, {"options", is.options}, {"ordered", is.ordered}});
  j["agents"] = json::array();
  for (int ag = 1; ag <= 2; ++ag) {
    json a;
    if (auto* lin = std::get_if<LinearUtility>(&d.utility(ag))) {
      a["weights"] = lin->weights;
      a["evaluations"] = lin->evaluations;
    } else {
      const auto& vals = std::get<TabularUtility>(d.utility(ag)).values;
      json t = json::object();
      for (std::size_t k = 0; k < vals.size(); ++k) t[offer_key(d.space().offer_at(k))] = vals[k];
      a["table"] = std::move(t);
    }
    a["reservation_value"] = d.reservation(ag);
    a["discount_factor"] = d.discount(ag);
    j["agents"].push_back(std::move(a));
  }
  return j;
}

inline NegotiationDomain domain_from_json(const json& j) {
  try {
    std::vector<Issue> issues;
    for (const auto& ji : j.at("issues")) {
      Issue is;
      is.name = ji.at("name").get<std::string>();
      is.options = ji.at("options").get<std::vector<std::string>>();
      is.ordered = ji.value("ordered", true);
      issues.push_back(std::move(is));
    }
    OfferSpace space(std::move(issues));
    const auto& agents = j.at("agents");
    if (agents.size() != 2) throw ConfigError("domain must define exactly 2 agents");
    std::array<Utility, 2> us;
    std::array<double, 2> rv{0.0, 0.0}, df{1.0, 1.0};
    for (int i = 0; i < 2; ++i) {
      const auto& a = agents[i];
      if (a.contains("table")) {
        TabularUtility t;
        t.values.assign(space.size(), std::numeric_limits<double>::quiet_NaN());
        std::vector<bool> seen(space.size(), false);
        for (auto it = a["table"].begin(); it != a["table"].end(); ++it) {
          auto idx = space.index_of(parse_offer_key(it.key()));
          t.values[idx] = it.value().get<double>();
          seen[idx] = true;
        }
        for (bool s : seen)
          if (!s) throw ConfigError("utility table does not cover every offer");
        us[i] = std::move(t);
      } else {
        LinearUtility l;
        l.weights = a.at("weights").get<std::vector<double>>();
        l.evaluations = a.at("evaluations").get<std::vector<std::vector<double>>>();
        if (!linear_utility_ok(l, false)) throw ConfigError("weights must be >= 0 and sum to 1");
        us[i] = std::move(l);
      }
      rv[i] = a.value("reservation_value", 0.0);
      df[i] = a.value("discount_factor", 1.0);
    }
    return NegotiationDomain(std::move(space), std::move(us), rv, df);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed domain: ") + e.what());
  } catch (const std::logic_error& e) {
    throw ConfigError(std::string("invalid domain: ") + e.what());
  }
}

inline NegotiationDomain load_domain(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open domain file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("domain file " + path + " is not JSON: " + e.what());
  }
  return domain_from_json(j);
}

inline void save_domain(const NegotiationDomain& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << domain_to_json(d).dump(2) << '\n';
}

}  // namespace nego
