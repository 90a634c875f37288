#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "nego/strategies.hpp"
#include "support.hpp"

using namespace nego;
using nego::testing::vector_domain;

namespace {

// straight pow form of the aspiration curve
double asp_oracle(double a, double b, double g, double tp, double t) {
  if (t >= tp) return b;
  if (g == 1.0) return (a - b) * (1 - t / tp) + b;
  return (a - b) * (1 - std::pow(g, 1 - t / tp)) / (1 - g) + b;
}

std::vector<double> grid(int n) {
  std::vector<double> v(n);
  for (int k = 0; k < n; ++k) v[k] = static_cast<double>(k) / (n - 1);
  return v;
}

std::vector<char> flags(std::size_t n, const std::vector<std::size_t>& on) {
  std::vector<char> f(n, 0);
  for (auto i : on) f[i] = 1;
  return f;
}

SessionConfig session_cfg(double T, std::uint64_t seed = 0) {
  SessionConfig c;
  c.deadline = T;
  c.seed = seed;
  return c;
}

}  // namespace

TEST(Aspiration, Endpoints) {
  AspirationFunction f{0.95, 0.4, 0.2, 3.0, std::nullopt};
  EXPECT_EQ(aspiration_value(f, 0.0), 0.95);
  EXPECT_EQ(aspiration_value(f, 3.0), 0.4);
}

TEST(Aspiration, LinearWhenGammaIsOne) {
  AspirationFunction f{1.0, 0.0, 1.0, 1.0, std::nullopt};
  EXPECT_DOUBLE_EQ(aspiration_value(f, 0.25), 0.75);
}

TEST(Aspiration, OutsideSessionThrows) {
  AspirationFunction f{1.0, 0.5, 0.2, 2.0, std::nullopt};
  EXPECT_THROW(aspiration_value(f, -0.01), std::out_of_range);
  EXPECT_THROW(aspiration_value(f, 2.01), std::out_of_range);
}

TEST(Aspiration, ConfigChecks) {
  EXPECT_THROW((AspirationFunction{1.0, 0.5, 0.0, 1.0, std::nullopt}.check()), ConfigError);
  EXPECT_THROW((AspirationFunction{0.4, 0.5, 0.2, 1.0, std::nullopt}.check()), ConfigError);
  EXPECT_THROW((AspirationFunction{1.0, 0.5, 0.2, 1.0, 1.5}.check()), ConfigError);
  EXPECT_NO_THROW((AspirationFunction{1.0, 0.5, 0.2, 1.0, 0.8}.check()));
}

TEST(Aspiration, MatchesPowFormAndIsMonotone) {
  for (double g : {0.01, 0.2, 0.9, 1.0, 1.1, 5.0, 100.0}) {
    for (double tp_frac : {0.5, 0.95, 1.0}) {
      const double T = 2.0;
      AspirationFunction f{0.97, 0.31, g, T, tp_frac * T};
      double prev = aspiration_value(f, 0.0);
      for (int k = 0; k <= 400; ++k) {
        const double t = T * k / 400.0;
        const double v = aspiration_value(f, t);
        EXPECT_NEAR(v, asp_oracle(0.97, 0.31, g, tp_frac * T, t), 1e-12) << "g=" << g << " t=" << t;
        EXPECT_LE(v, prev + 1e-15);
        if (t >= tp_frac * T) {
          EXPECT_EQ(v, 0.31);
        }
        prev = v;
      }
    }
  }
}

TEST(Aspiration, BoulwareStaysHighConcederDropsFast) {
  AspirationFunction boulware{1.0, 0.0, 0.01, 1.0, std::nullopt};
  AspirationFunction conceder{1.0, 0.0, 100.0, 1.0, std::nullopt};
  EXPECT_GT(aspiration_value(boulware, 0.5), 0.85);
  EXPECT_LT(aspiration_value(conceder, 0.5), 0.15);
}

TEST(TimeBasedBid, MaxOpponentPicksBestForOpponent) {
  const std::vector<double> own{0.85, 0.9, 0.5};
  const std::vector<double> opp{0.2, 0.1, 0.9};
  EXPECT_EQ(select_bid_timebased(own, flags(3, {}), {}, &opp, 0.8, BidMode::max_opponent), 0u);
}

TEST(TimeBasedBid, RepeatsWhenEverythingAboveAspWasProposed) {
  const std::vector<double> own{0.85, 0.9, 0.5};
  const std::vector<double> opp{0.2, 0.1, 0.9};
  const std::vector<std::size_t> pro{1, 0};
  const auto pick = select_bid_timebased(own, flags(3, pro), pro, &opp, 0.8, BidMode::max_opponent);
  EXPECT_EQ(pick, 1u);
  EXPECT_EQ(select_bid_timebased(own, flags(3, {}), {}, &opp, 0.95, BidMode::min_own), 1u);
}

TEST(TimeBasedBid, MinOwnOnSplitThePie) {
  const auto own = grid(11);
  EXPECT_NEAR(own[select_bid_timebased(own, flags(11, {}), {}, nullptr, 0.62, BidMode::min_own)], 0.7, 1e-12);
}

TEST(AdaptiveTarget, Arithmetic) {
  EXPECT_DOUBLE_EQ(adaptive_target(0.4, 0.1, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(adaptive_target(0.8, 0.05, 0.5), 0.85);
  EXPECT_EQ(adaptive_target(0.37, 0.0, -1e300), 0.37);
}

TEST(OptimalOffer, SplitThePie) {
  const auto d = generate_split_the_pie(11);
  const auto r = estimate_optimal_offer(d.table(1), d.table(2), 0.3);
  EXPECT_FALSE(r.fallback);
  EXPECT_NEAR(d.u(1, r.offer), 0.7, 1e-12);
  EXPECT_NEAR(d.u(2, r.offer), 0.3, 1e-12);
  const auto z = estimate_optimal_offer(d.table(1), d.table(2), 0.0);
  EXPECT_EQ(z.offer, d.argmax(1));
  const auto f = estimate_optimal_offer(d.table(1), d.table(2), 1.5);
  EXPECT_TRUE(f.fallback);
  EXPECT_EQ(f.offer, d.argmax(2));
}

TEST(TftGain, OwnUtilityHandEvaluation) {
  // u: 0.7 proposed, 0.3 received, candidate 0.65
  const std::vector<double> own{0.0, 0.3, 0.65, 0.7, 1.0};
  TftConfig cfg;
  TftView v{own, nullptr, std::nullopt};
  EXPECT_NEAR(tft_concession_gain(cfg, v, {3}, {1}, 2), 0.05, 1e-12);
  EXPECT_EQ(tft_concession_gain(cfg, v, {}, {}, 4), 0.0);
}

TEST(TftGain, CountMeasures) {
  const std::vector<double> own{0.0, 0.5, 1.0};
  TftConfig cfg;
  cfg.measure_self = cfg.measure_opponent = ConcessionBasis::count;
  TftView v{own, nullptr, std::nullopt};
  EXPECT_EQ(tft_concession_gain(cfg, v, {2}, {0}, 1), 1.0);
  EXPECT_EQ(tft_concession_gain(cfg, v, {2}, {0}, 2), 0.0);
  EXPECT_EQ(tft_concession_gain(cfg, v, {2, 1}, {0}, 0), 2.0);
}

TEST(TftGain, OpponentEstimateAndRelative) {
  const std::vector<double> own{0.0, 0.4, 0.6, 1.0};
  const std::vector<double> opp{1.0, 0.7, 0.5, 0.0};
  TftConfig cfg;
  cfg.measure_self = cfg.measure_opponent = ConcessionBasis::opponent_estimate;
  TftView v{own, &opp, std::nullopt};
  // e1 = 0.7 - 0 ; e2 = 1 - 0.5
  EXPECT_NEAR(tft_concession_gain(cfg, v, {3}, {2}, 1), 0.2, 1e-12);

  TftConfig rel;
  rel.measure_self = rel.measure_opponent = ConcessionBasis::relative;
  TftView rv{own, &opp, std::size_t{2}};
  // e1 = (1-0.4)/(1-0.6) ; e2 = (0.4-0)/(0.6-0)
  EXPECT_NEAR(tft_concession_gain(rel, rv, {}, {1}, 1), 0.6 / 0.4 - 0.4 / 0.6, 1e-12);
  TftView bad{own, &opp, std::size_t{3}};
  EXPECT_THROW(tft_concession_gain(rel, bad, {}, {}, 1), ConfigError);
  TftView none{own, nullptr, std::nullopt};
  EXPECT_THROW(tft_concession_gain(cfg, none, {}, {}, 1), ConfigError);
}

TEST(TftSelect, StrictGainExcludesZero) {
  // after receiving 0.5 the mirror offer 0.5 gives gain 0 exactly
  const std::vector<double> own{0.0, 0.25, 0.5, 0.75, 1.0};
  TftConfig cfg;
  TftView v{own, nullptr, std::nullopt};
  EXPECT_EQ(tft_concession_gain(cfg, v, {4}, {2}, 2), 0.0);
  EXPECT_EQ(tft_select_bid(cfg, v, {4}, {2}, -1.0), 1u);
}

TEST(TftSelect, MirrorsOpponentConcession) {
  // received 0.1 for us: the reply is the best offer conceding strictly more
  // than 0.1, which is 0.9 less one grid step; finer grids approach 0.9
  TftConfig cfg;
  for (int n : {11, 101, 1001}) {
    const auto own = grid(n);
    TftView v{own, nullptr, std::nullopt};
    const std::size_t rec = static_cast<std::size_t>((n - 1) / 10);
    ASSERT_NEAR(own[rec], 0.1, 1e-12);
    const auto pick = tft_select_bid(cfg, v, {static_cast<std::size_t>(n - 1)}, {rec}, 0.0);
    const double step = 1.0 / (n - 1);
    EXPECT_LT(own[pick], 0.9);
    EXPECT_NEAR(own[pick], 0.9, step + 1e-12) << n;
    for (std::size_t i = 0; i < own.size(); ++i) {
      if (own[i] > own[pick]) {
        EXPECT_LE(tft_concession_gain(cfg, v, {static_cast<std::size_t>(n - 1)}, {rec}, i), 0.0);
      }
    }
  }
}

TEST(TftSelect, FallbackRepeatsBestProposal) {
  const std::vector<double> own{0.0, 0.3, 0.6, 1.0};
  TftConfig cfg;
  cfg.e_min = 5.0;
  TftView v{own, nullptr, std::nullopt};
  EXPECT_EQ(tft_select_bid(cfg, v, {2, 1}, {0}, 0.0), 2u);
  EXPECT_EQ(tft_select_bid(cfg, v, {}, {0}, 0.0), 3u);
}

TEST(TftSelect, AltruisticRespectsWindowAndReservation) {
  const std::vector<double> own{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  const std::vector<double> opp{1.0, 0.8, 0.6, 0.4, 0.2, 0.0};
  TftConfig cfg;
  cfg.selector = TftConfig::Selector::opponent_max;
  cfg.e_max = 0.3;
  TftView v{own, &opp, std::nullopt};
  // pro {1.0}, rec {0.2}: gain(w) = 1 - u(w) - 0.2 must lie in (0, 0.3)
  EXPECT_EQ(tft_select_bid(cfg, v, {5}, {1}, 0.0), 3u);
  // 0.4 concedes too much for the window
  EXPECT_EQ(tft_select_bid(cfg, v, {5}, {1}, 0.3), 3u);
  // above the reservation only 0.8 (gain 0) and 1.0 remain, so repeat
  EXPECT_EQ(tft_select_bid(cfg, v, {5}, {1}, 0.65), 5u);
}

TEST(Micro, FirstTurnProposesBest) {
  const std::vector<double> own{0.3, 1.0, 0.6};
  auto s = make_micro_state(own);
  EXPECT_EQ(s.sorted_offers, (std::vector<std::size_t>{1, 2, 0}));
  Rng rng(1);
  const auto d = micro_decide(s, own, 0.0, std::nullopt, rng);
  EXPECT_TRUE(d.ready);
  EXPECT_EQ(d.offer, 1u);
  EXPECT_FALSE(d.accept);
}

TEST(Micro, RepeatsWhenAhead) {
  const auto own = grid(11);
  auto s = make_micro_state(own);
  s.m = 2;
  s.n = 1;
  std::set<std::size_t> seen;
  for (std::uint64_t k = 0; k < 64; ++k) {
    Rng rng(k);
    const auto d = micro_decide(s, own, 0.0, std::size_t{3}, rng);
    EXPECT_FALSE(d.ready);
    seen.insert(d.offer);
  }
  EXPECT_EQ(seen, (std::set<std::size_t>{10, 9}));
}

TEST(Micro, AcceptsAtOrAboveNextConcession) {
  const std::vector<double> own{1.0, 0.9, 0.6, 0.65, 0.55, 0.2};
  auto s = make_micro_state(own);
  // sorted: 1.0 0.9 0.65 0.6 0.55 0.2 ; m = 3 -> offers[3] = 0.6
  s.m = 3;
  s.n = 3;
  Rng rng(0);
  auto d = micro_decide(s, own, 0.0, std::size_t{3}, rng);
  EXPECT_TRUE(d.ready);
  EXPECT_EQ(own[d.offer], 0.6);
  EXPECT_TRUE(d.accept);
  d = micro_decide(s, own, 0.0, std::size_t{4}, rng);
  EXPECT_FALSE(d.accept);
}

TEST(Micro, SafeguardWhenNothingIsRational) {
  const std::vector<double> own{0.1, 0.2};
  const auto s = make_micro_state(own);
  Rng rng(0);
  const auto d = micro_decide(s, own, 0.5, std::nullopt, rng);
  EXPECT_TRUE(d.safeguard);
  EXPECT_EQ(d.offer, 1u);
}

TEST(Micro, SessionInvariants) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto d = generate_random_linear_domain({3, 4}, seed, 0.8, {0.2, 0.3});
    auto cfg = session_cfg(kInf, seed);
    cfg.max_rounds = static_cast<long>(2 * d.size() + 2);
    MicroNegotiator a, b;
    const auto res = run_session(d, a, b, cfg);
    ASSERT_FALSE(res.outcome.violation);
    const auto order = make_micro_state(d.table(1)).sorted_offers;
    std::set<std::size_t> uniq;
    std::size_t n = 0;
    std::set<std::size_t> recv;
    for (const auto& e : res.history) {
      const auto& act = e.action;
      const auto idx = d.space().index_of(act.offer);
      if (act.agent == 2) {
        if (act.kind == ActionKind::propose) recv.insert(idx);
        n = recv.size();
        continue;
      }
      if (act.kind != ActionKind::propose) continue;
      EXPECT_GT(d.u(1, idx), d.reservation(1));
      uniq.insert(idx);
      EXPECT_LE(uniq.size(), n + 1);
      // unique proposals form a prefix of the sorted order
      std::set<std::size_t> prefix(order.begin(), order.begin() + static_cast<long>(uniq.size()));
      EXPECT_EQ(uniq, prefix) << "seed " << seed;
    }
  }
}

TEST(Accept, Rules) {
  using K = AcceptanceRule::Kind;
  EXPECT_FALSE(decide_accept({K::ac_next}, 0.71, 0.73));
  EXPECT_TRUE(decide_accept({K::ac_next}, 0.73, 0.73));
  EXPECT_TRUE(decide_accept({K::ac_low}, 0.71, 0.9, std::nullopt, 0.70));
  EXPECT_FALSE(decide_accept({K::ac_low}, 0.70, 0.9, std::nullopt, 0.70));
  EXPECT_TRUE(decide_accept({K::ac_asp}, 0.6, 0.9, 0.6));
  EXPECT_FALSE(decide_accept({K::ac_asp}, 0.59, 0.1, 0.6));
  EXPECT_TRUE(decide_accept({K::ac_next, 1.2, -0.1}, 0.5, 0.5));
  EXPECT_THROW(decide_accept({K::ac_asp}, 0.5, 0.5), ConfigError);
  EXPECT_THROW(decide_accept({K::ac_low}, 0.5, 0.5, 0.3), ConfigError);
}

TEST(Accept, ParamDefaultIsAcNext) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0, 1);
  for (int k = 0; k < 1000; ++k) {
    const double a = U(rng), b = k % 10 == 0 ? a : U(rng);
    EXPECT_EQ(decide_accept({AcceptanceRule::Kind::ac_next, 1.0, 0.0}, a, b), a >= b);
  }
}

TEST(Accept, LowNeverRejectsSomethingBetter) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> U(0, 1);
  for (int k = 0; k < 1000; ++k) {
    const double lo = U(rng), next = U(rng), rec = U(rng);
    if (rec > std::min(lo, next)) {
      EXPECT_TRUE(decide_accept({AcceptanceRule::Kind::ac_low}, rec, next, std::nullopt, lo));
    }
  }
}

TEST(Repropose, TenOfferTrace) {
  // offer k has utility (k+1)/10; we proposed 10,9,8 and received 4,6,2
  std::vector<double> own(10);
  for (int k = 0; k < 10; ++k) own[k] = (k + 1) / 10.0;
  const auto pro = flags(10, {9, 8, 7});
  EXPECT_EQ(repropose_filter(own, pro, {3, 5, 1}, 4), 5u);
}

TEST(Repropose, UnchangedWhenReceivedAlreadyProposed) {
  const auto own = grid(6);
  EXPECT_EQ(repropose_filter(own, flags(6, {5, 4, 3}), {3, 4}, 2), 2u);
  EXPECT_EQ(repropose_filter(own, flags(6, {5}), {}, 2), 2u);
}

TEST(Repropose, TieGoesToReceived) {
  const std::vector<double> own{0.5, 0.5, 1.0};
  EXPECT_EQ(repropose_filter(own, flags(3, {2}), {1}, 0), 1u);
}

TEST(Repropose, NeverLowersUtility) {
  std::mt19937_64 rng(9);
  for (int rep = 0; rep < 300; ++rep) {
    const auto d = nego::testing::random_grid_domain(12, rep);
    const auto& own = d.table(1);
    std::vector<std::size_t> pro, rec;
    for (std::size_t i = 0; i < own.size(); ++i) {
      if (rng() % 3 == 0) pro.push_back(i);
      if (rng() % 3 == 0) rec.push_back(i);
    }
    const std::size_t chosen = rng() % own.size();
    EXPECT_GE(own[repropose_filter(own, flags(own.size(), pro), rec, chosen)], own[chosen]);
  }
}

TEST(RandomStrategy, NeverAcceptsAboveOne) {
  const auto d = generate_random_linear_domain({4, 4}, 2, 0.5, {0.3, 0.3});
  RandomNegotiator a(1.01), b(1.01);
  auto cfg = session_cfg(kInf, 4);
  cfg.max_rounds = 200;
  const auto res = run_session(d, a, b, cfg);
  EXPECT_FALSE(res.outcome.agreed());
  EXPECT_EQ(res.history.size(), 200u);
  for (const auto& e : res.history) {
    EXPECT_EQ(e.action.kind, ActionKind::propose);
    EXPECT_GT(d.u(e.action.agent, e.action.offer), 0.3);
  }
}

TEST(RandomStrategy, Reproducible) {
  const auto d = generate_random_linear_domain({5, 3}, 8, 0.5);
  auto run = [&] {
    RandomNegotiator a(0.8), b(0.8);
    auto cfg = session_cfg(kInf, 17);
    cfg.max_rounds = 100;
    std::ostringstream out;
    write_history_csv(out, run_session(d, a, b, cfg).history);
    return out.str();
  };
  EXPECT_EQ(run(), run());
}

TEST(TimeBasedAgent, ProposalsMeetAspiration) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto d = generate_random_linear_domain({4, 5}, seed, 0.7, {0.1, 0.1});
    TimeBasedParams p;
    p.gamma = 0.05 + 0.5 * static_cast<double>(seed % 4);
    p.mode = seed % 2 ? BidMode::max_opponent : BidMode::min_own;
    TimeBasedNegotiator a(p), b(p);
    const auto res = run_session(d, a, b, session_cfg(1.0, seed));
    double lowest = kInf;
    for (const auto& e : res.history) {
      const auto& act = e.action;
      if (act.agent != 1 || act.kind != ActionKind::propose) continue;
      const double u = d.u(1, act.offer);
      const double asp = a.asp_at(act.time);
      if (u < asp) {
        // only a repeat of an earlier proposal, which cannot lower the minimum
        EXPECT_GE(u, lowest);
      }
      lowest = std::min(lowest, u);
    }
  }
}

TEST(TimeBasedAgent, DefaultsFollowReservation) {
  const auto d = generate_split_the_pie(11);
  TimeBasedNegotiator a;
  auto cfg = session_cfg(4.0);
  a.begin(d, 1, cfg);
  EXPECT_EQ(a.aspiration().alpha, 1.0);
  EXPECT_NEAR(a.aspiration().target, 0.1, 1e-12);
  EXPECT_NEAR(*a.aspiration().target_time, 3.8, 1e-12);
}

TEST(TftAgent, SelfPlayConvergesToHalf) {
  const auto d = generate_split_the_pie(101);
  int agreed = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    TftNegotiator a, b;
    const auto res = run_session(d, a, b, session_cfg(10.0, seed));
    if (!res.outcome.agreed()) continue;
    ++agreed;
    EXPECT_NEAR(d.u(1, *res.outcome.accepted_offer), 0.5, 0.05);
  }
  EXPECT_GT(agreed, 0);
}

TEST(MicroAgent, ReproposeVariantAgreesOnSplitThePie) {
  const auto d = generate_split_the_pie(21);
  MicroNegotiator a, b;
  a.set_repropose(true);
  auto cfg = session_cfg(kInf, 3);
  cfg.max_rounds = 2 * 21 + 2;
  const auto res = run_session(d, a, b, cfg);
  EXPECT_TRUE(res.outcome.agreed());
}
