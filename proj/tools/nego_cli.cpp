// nego: command-line front end for domains, sessions, tournaments and games.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "nego/nego.hpp"

using namespace nego;

namespace {

std::vector<std::size_t> parse_sizes(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stoul(tok));
    } catch (const std::exception&) {
      throw ConfigError("bad issue size '" + tok + "'");
    }
  }
  if (out.empty()) throw ConfigError("no issue sizes given");
  return out;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

void print_game(const NormalFormGame& g) {
  std::cout << "payoffs (row = player 1):\n";
  std::cout << std::string(10, ' ');
  for (const auto& l : g.action_labels[1]) std::printf("%-16s", l.c_str());
  std::cout << '\n';
  for (std::size_t a = 0; a < g.num_actions(1); ++a) {
    std::printf("%-10s", g.action_labels[0][a].c_str());
    for (std::size_t b = 0; b < g.num_actions(2); ++b) {
      const std::string cell = "(" + fmt(g.u(1, a, b)) + "," + fmt(g.u(2, a, b)) + ")";
      std::printf("%-16s", cell.c_str());
    }
    std::cout << '\n';
  }
  const auto ne = pure_nash_equilibria(g);
  std::cout << "pure Nash equilibria: " << ne.size() << '\n';
  for (auto [a, b] : ne)
    std::cout << "  (" << g.action_labels[0][a] << ", " << g.action_labels[1][b] << ")  payoff (" << fmt(g.u(1, a, b))
              << ", " << fmt(g.u(2, a, b)) << ")\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bilateral negotiation engine"};
  app.require_subcommand(1);

  // gen-domain
  auto* gen = app.add_subcommand("gen-domain", "Generate a domain file");
  std::string gen_kind = "random_linear", gen_issues = "4,4", gen_out;
  std::size_t gen_offers = 101;
  std::uint64_t gen_seed = 0;
  double gen_opp = 0.5;
  std::vector<double> gen_res{0.0, 0.0};
  gen->add_option("--kind", gen_kind, "split_the_pie or random_linear")
      ->check(CLI::IsMember({"split_the_pie", "random_linear"}));
  gen->add_option("--offers", gen_offers, "number of offers (split_the_pie)");
  gen->add_option("--issues", gen_issues, "comma-separated option counts (random_linear)");
  gen->add_option("--seed", gen_seed);
  gen->add_option("--opposition", gen_opp, "0 = aligned, 1 = opposed")->check(CLI::Range(0.0, 1.0));
  gen->add_option("--reservation", gen_res)->expected(2);
  gen->add_option("-o,--out", gen_out, "output path (default stdout)");

  // run
  auto* run = app.add_subcommand("run", "Run one session and print the transcript");
  std::string run_domain, run_a = "micro()", run_b = "micro()", run_hist;
  std::size_t run_split = 0;
  double run_deadline = 10.0, run_think = 0.01;
  long run_rounds = 0;
  std::uint64_t run_seed = 0;
  run->add_option("--domain", run_domain, "domain file");
  run->add_option("--split", run_split, "use split-the-pie with this many offers instead");
  run->add_option("--a", run_a, "strategy spec for agent 1");
  run->add_option("--b", run_b, "strategy spec for agent 2");
  run->add_option("--deadline", run_deadline, "seconds; inf for none");
  run->add_option("--max-rounds", run_rounds, "action cap, 0 = unlimited");
  run->add_option("--think-time", run_think);
  run->add_option("--seed", run_seed);
  run->add_option("--history", run_hist, "write the history CSV here");

  // tournament
  auto* tour = app.add_subcommand("tournament", "Run a round-robin tournament from a config file");
  std::string tour_cfg, tour_out, tour_fmt = "csv";
  tour->add_option("--config", tour_cfg)->required();
  tour->add_option("-o,--out", tour_out, "records path (default stdout)");
  tour->add_option("--format", tour_fmt)->check(CLI::IsMember({"csv", "jsonl"}));

  // analyze
  auto* ana = app.add_subcommand("analyze", "Pareto set and opposition of a domain");
  std::string ana_domain;
  ana->add_option("--domain", ana_domain)->required();

  // nash
  auto* nash = app.add_subcommand("nash", "Equilibria of a normal-form or turn-taking game");
  std::string nash_game;
  nash->add_option("--game", nash_game)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*gen) {
      const auto d = gen_kind == "split_the_pie"
                         ? generate_split_the_pie(gen_offers)
                         : generate_random_linear_domain(parse_sizes(gen_issues), gen_seed, gen_opp,
                                                         {gen_res[0], gen_res[1]});
      if (gen_out.empty()) std::cout << domain_to_json(d).dump(2) << '\n';
      else save_domain(d, gen_out);
    } else if (*run) {
      if (run_domain.empty() == (run_split == 0)) throw ConfigError("give exactly one of --domain and --split");
      const auto d = run_split ? generate_split_the_pie(run_split) : load_domain(run_domain);
      SessionConfig sc;
      sc.deadline = run_deadline;
      sc.think_time = run_think;
      if (run_rounds > 0) sc.max_rounds = run_rounds;
      sc.seed = run_seed;
      sc.check();
      auto a = make_strategy(run_a, derive_seed(run_seed, {3}));
      auto b = make_strategy(run_b, derive_seed(run_seed, {4}));
      const auto res = run_session(d, *a, *b, sc);
      std::printf("%-4s %-6s %-8s %-14s %-10s %-10s %s\n", "#", "agent", "kind", "t", "u1", "u2", "offer");
      for (std::size_t k = 0; k < res.history.size(); ++k) {
        const auto& act = res.history[k].action;
        std::printf("%-4zu %-6d %-8s %-14.6f %-10s %-10s %s\n", k, act.agent, to_string(act.kind), act.time,
                    fmt(d.u(1, act.offer)).c_str(), fmt(d.u(2, act.offer)).c_str(), offer_key(act.offer).c_str());
      }
      const auto& o = res.outcome;
      std::cout << (o.violation ? "protocol violation by agent " + std::to_string(o.violator)
                                : (o.agreed() ? std::string("agreement") : std::string("failure")))
                << "  payoffs (" << fmt(o.payoffs[0]) << ", " << fmt(o.payoffs[1]) << ")\n";
      if (!run_hist.empty()) {
        std::ofstream out(run_hist);
        if (!out) throw ConfigError("cannot write " + run_hist);
        write_history_csv(out, res.history);
      }
    } else if (*tour) {
      const auto cfg = load_tournament_config(tour_cfg);
      const auto recs = run_tournament(cfg);
      const auto fmt_kind = tour_fmt == "csv" ? EmitFormat::csv : EmitFormat::jsonl;
      if (tour_out.empty()) {
        if (fmt_kind == EmitFormat::csv) write_records_csv(std::cout, recs);
        else write_records_jsonl(std::cout, recs);
      } else {
        emit(recs, recs.empty() ? std::nullopt : std::optional(compute_metrics(recs, cfg.domains)), fmt_kind, tour_out);
      }
    } else if (*ana) {
      const auto d = load_domain(ana_domain);
      const auto front = pareto_indices(d);
      std::cout << "offers: " << d.size() << "  Pareto-optimal: " << front.size() << '\n';
      std::printf("%-20s %-10s %-10s\n", "offer", "u1", "u2");
      for (auto i : front)
        std::printf("%-20s %-10s %-10s\n", offer_key(d.space().offer_at(i)).c_str(), fmt(d.u(1, i)).c_str(),
                    fmt(d.u(2, i)).c_str());
      std::cout << "opposition\n";
      std::printf("  %-16s %s\n", "euclidean", fmt(opposition(d, OppositionMeasure::euclidean)).c_str());
      std::printf("  %-16s %s\n", "min_utility", fmt(opposition(d, OppositionMeasure::min_utility)).c_str());
      std::printf("  %-16s %s\n", "kalai_euclidean", fmt(opposition(d, OppositionMeasure::kalai_euclidean)).c_str());
    } else if (*nash) {
      const json j = read_json(nash_game);
      const std::string type = j.value("type", "normal");
      if (type == "normal") {
        print_game(normal_form_from_json(j));
      } else if (type == "tree") {
        const auto g = tree_from_json(j);
        const auto ig = induced_normal_form(g);
        print_game(ig.game);
        const auto spe = backward_induction(g);
        std::cout << "subgame-perfect equilibrium: (";
        for (int p = 0; p < 2; ++p) {
          const auto k = strategy_index(g, ig.nodes[p], spe.profile.choice[p]);
          std::cout << (p ? ", " : "") << ig.game.action_labels[p][k];
        }
        std::cout << ")  payoff (" << fmt(spe.payoff[0]) << ", " << fmt(spe.payoff[1]) << ")"
                  << (spe.multiple ? "  [ties: other SPE may exist]" : "") << '\n';
      } else {
        throw ConfigError("unknown game type '" + type + "'");
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const PreconditionError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
