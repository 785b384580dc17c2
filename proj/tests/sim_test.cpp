#include "flpf/sim.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "test_networks.hpp"

namespace flpf {
namespace {

using testing::example_b_fading;
using testing::path_abc;

Rational r(std::int64_t n, std::int64_t d = 1) { return make_rational(n, d); }

// Weights of (1/3)e over Example B: ab serves a, bc serves c, abc serves b.
std::vector<std::vector<Rational>> example_b_weights() {
  return {{r(1), r(0)}, {r(0), r(1)}, {r(0), r(1)}};
}

ScriptedPattern example_b_pattern(Rational eps = r(1, 50)) {
  auto g = path_abc();
  AdversarialOptions o;
  o.epsilon = eps;
  return build_adversarial_pattern(g, example_b_fading(), g.all_links(), RateVector(3, r(1, 3)), example_b_weights(),
                                   o);
}

TEST(GmsTest, Examples) {
  auto g = path_abc();
  const Counts on{1, 1, 1};
  EXPECT_EQ(gms_schedule({5, 1, 5}, on, g), (LinkSet{0, 2}));
  EXPECT_EQ(gms_schedule({0, 0, 0}, on, g), LinkSet{});
  EXPECT_EQ(gms_schedule({1, 9, 1}, on, g), LinkSet{1});
}

TEST(GmsTest, OffLinksNeverScheduled) {
  auto g = path_abc();
  EXPECT_EQ(gms_schedule({5, 3, 5}, {0, 1, 1}, g), LinkSet{2});
}

TEST(GmsTest, TieBreaks) {
  auto g = path_abc();
  const Counts on{1, 1, 1};
  EXPECT_EQ(gms_schedule({2, 2, 0}, on, g, identity_weight(), TieBreak::LowestIndex), LinkSet{0});
  EXPECT_EQ(gms_schedule({2, 2, 0}, on, g, identity_weight(), TieBreak::HighestIndex), LinkSet{1});
  std::mt19937_64 a(5), b(5);
  for (int i = 0; i < 20; ++i)
    EXPECT_EQ(gms_schedule({2, 2, 2}, on, g, identity_weight(), TieBreak::Random, &a),
              gms_schedule({2, 2, 2}, on, g, identity_weight(), TieBreak::Random, &b));
}

TEST(GmsTest, MaximalityAndWeightInvariance) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::int64_t> qd(0, 6);
  std::uniform_int_distribution<std::int64_t> cd(0, 2);
  std::vector<InterferenceGraph> graphs{path_abc(), testing::hexagon_graph(), testing::fig1_graph()};
  for (int i = 0; i < 3; ++i) graphs.push_back(testing::random_graph(6, 0.4, rng));
  for (const auto& g : graphs) {
    for (int trial = 0; trial < 10000; ++trial) {
      Queues q(g.size());
      Counts c(g.size());
      for (std::size_t l = 0; l < g.size(); ++l) {
        q[l] = qd(rng);
        c[l] = cd(rng);
      }
      LinkSet s = gms_schedule(q, c, g);
      ASSERT_TRUE(g.is_independent(s));
      for (std::size_t l = 0; l < g.size(); ++l) {
        if (s.contains(l)) {
          ASSERT_GT(q[l] * c[l], 0);
        } else if (q[l] * c[l] > 0) {
          ASSERT_TRUE(g.interferers(l).intersects(s)) << "link " << l << " could be added";
        }
      }
      ASSERT_EQ(s, gms_schedule(q, c, g, power_weight(3)));
    }
  }
}

TEST(StepTest, Examples) {
  EXPECT_EQ(step({3}, {1}, LinkSet{0}, {0}, SlotOrder::ServiceFirst).next[0], 2);
  EXPECT_EQ(step({0}, {1}, LinkSet{0}, {1}, SlotOrder::ServiceFirst).next[0], 1);
  EXPECT_EQ(step({0}, {1}, LinkSet{0}, {1}, SlotOrder::ArrivalFirst).next[0], 0);
  EXPECT_EQ(step({5}, {2}, LinkSet{0}, {1}, SlotOrder::ServiceFirst).next[0], 4);
  EXPECT_EQ(step({5}, {2}, LinkSet{}, {1}, SlotOrder::ArrivalFirst).next[0], 6);
}

void expect_conservation(const SimTrace& t, SlotOrder order) {
  ASSERT_FALSE(t.records.empty());
  for (std::size_t i = 0; i + 1 < t.records.size(); ++i) {
    const auto& cur = t.records[i];
    const auto& nxt = t.records[i + 1];
    ASSERT_EQ(nxt.slot, cur.slot + 1);
    for (std::size_t l = 0; l < t.num_links; ++l) {
      const std::int64_t offer = cur.s.contains(l) ? cur.c[l] : 0;
      const std::int64_t avail = order == SlotOrder::ServiceFirst ? cur.q[l] : cur.q[l] + cur.a[l];
      ASSERT_LE(cur.served[l], offer);
      ASSERT_LE(cur.served[l], avail);
      ASSERT_EQ(nxt.q[l] - cur.q[l], cur.a[l] - cur.served[l]);
      if (order == SlotOrder::ServiceFirst) {
        ASSERT_EQ(nxt.q[l], std::max<std::int64_t>(cur.q[l] - offer, 0) + cur.a[l]);
      }
    }
  }
}

TEST(RunIidTest, ConservationBothOrders) {
  auto g = path_abc();
  for (SlotOrder order : {SlotOrder::ServiceFirst, SlotOrder::ArrivalFirst}) {
    SimOptions o;
    o.order = order;
    o.record_every = 1;
    auto t = run_iid(g, example_b_fading(), {0.3, 0.3, 0.3}, 5000, 7, o);
    expect_conservation(t, order);
  }
}

TEST(RunIidTest, DeterministicGivenSeed) {
  auto g = path_abc();
  auto a = run_iid(g, example_b_fading(), {0.3, 0.4, 0.3}, 20000, 42);
  auto b = run_iid(g, example_b_fading(), {0.3, 0.4, 0.3}, 20000, 42);
  EXPECT_EQ(a.max_queue, b.max_queue);
  EXPECT_EQ(a.final_queues, b.final_queues);
}

TEST(RunIidTest, ArrivalMeans) {
  auto g = path_abc();
  const std::uint64_t n = 200000;
  auto t = run_iid(g, example_b_fading(), {0.25, 1.5, 0.0}, n, 3);
  EXPECT_NEAR(static_cast<double>(t.arrivals_total[0]) / n, 0.25, 0.01);
  EXPECT_NEAR(static_cast<double>(t.arrivals_total[1]) / n, 1.5, 0.01);
  EXPECT_EQ(t.arrivals_total[2], 0U);
}

TEST(RunIidTest, MultiStateNeedsIntegerValues) {
  auto g = path_abc();
  auto f = from_explicit_values(3, {0, r(1, 2)}, {{r(1, 2), r(0), r(0)}}, {r(1)});
  EXPECT_THROW(run_iid(g, f, {0.1, 0.1, 0.1}, 10, 1), Error);
}

TEST(VerdictTest, SingleLinkUnderAndOverload) {
  auto g = testing::single_link();
  auto under = stability_verdict(run_iid(g, no_fading(1), {0.4}, 100000, 1));
  EXPECT_EQ(under.verdict, Verdict::Stable);
  auto over = stability_verdict(run_iid(g, no_fading(1), {1.2}, 100000, 1));
  EXPECT_EQ(over.verdict, Verdict::Unstable);
  EXPECT_GE(over.slope, 0.15);
  EXPECT_LE(over.slope, 0.25);
}

TEST(VerdictTest, TooShort) {
  try {
    stability_verdict(std::vector<std::int64_t>(9999, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TraceTooShort);
  }
}

TEST(VerdictTest, JsonShape) {
  auto v = stability_verdict(std::vector<std::int64_t>(20000, 3));
  EXPECT_EQ(v.verdict, Verdict::Stable);
  auto j = verdict_json(v);
  EXPECT_EQ(j["verdict"], "stable");
  EXPECT_EQ(j["window_max"], 3);
}

TEST(AdversarialTest, ExampleBPatternShape) {
  auto p = example_b_pattern();
  ASSERT_EQ(p.frames.size(), 3U);
  for (const auto& fr : p.frames) {
    EXPECT_EQ(fr.length, 1U);
    EXPECT_EQ(fr.repetitions, 1U);
  }
  for (const auto& x : p.channel_fractions) EXPECT_EQ(x, r(1, 3));
  EXPECT_EQ(p.period_slots(), 3U);
  EXPECT_EQ(p.surge_every, 50U);
  for (const auto& rate : p.realized_rate) {
    EXPECT_GT(rate, r(1, 3));
    EXPECT_LE(rate, r(1, 3) + r(1, 50));
  }
}

TEST(AdversarialTest, ExactFractionsForUnevenFrames) {
  // Half-weights make T_J = 2; fractions stay exact.
  auto g = path_abc();
  auto f = example_b_fading();
  std::vector<std::vector<Rational>> w{{r(1, 2), r(1, 2)}, {r(1, 2), r(1, 2)}, {r(1, 2), r(1, 2)}};
  RateVector nu{r(1, 3), r(1, 2), r(1, 3)};
  AdversarialOptions o;
  auto p = build_adversarial_pattern(g, f, g.all_links(), nu, w, o);
  for (std::size_t s = 0; s < p.frames.size(); ++s) EXPECT_EQ(p.channel_fractions[s], f.states()[s].probability);
  for (const auto& fr : p.frames) EXPECT_EQ(fr.length, 2U);
}

TEST(AdversarialTest, BadDecompositionRejected) {
  auto g = path_abc();
  auto f = example_b_fading();
  auto expect_code = [&](std::vector<std::vector<Rational>> w, RateVector nu) {
    try {
      build_adversarial_pattern(g, f, g.all_links(), nu, w);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::DecompositionNotInPhi);
    }
  };
  expect_code({{r(1), r(1)}, {r(0), r(1)}, {r(0), r(1)}}, RateVector(3, r(1, 3)));
  expect_code(example_b_weights(), RateVector(3, r(1, 2)));
  expect_code({{r(1), r(0)}}, RateVector(3, r(1, 3)));
}

TEST(AdversarialTest, CoarseRoundingOverrunsTarget) {
  auto g = path_abc();
  auto f = example_b_fading();
  std::vector<std::vector<Rational>> w{{r(1), r(0)}, {r(0), r(1)}, {r(1, 7), r(6, 7)}};
  RateVector nu{r(1, 3) + r(1, 21), r(2, 7), r(1, 3) + r(1, 21)};
  AdversarialOptions coarse;
  coarse.delta = r(1, 4);
  try {
    build_adversarial_pattern(g, f, g.all_links(), nu, w, coarse);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DeltaTooLargeForTargetRate);
  }
  AdversarialOptions fine;
  fine.delta = r(1, 1000);
  auto p = build_adversarial_pattern(g, f, g.all_links(), nu, w, fine);
  EXPECT_EQ(p.frames[2].length, 7U);
}

TEST(AdversarialTest, EqualQueuesAndGrowth) {
  auto g = path_abc();
  auto p = example_b_pattern();
  for (TieBreak tie : {TieBreak::LowestIndex, TieBreak::HighestIndex, TieBreak::Random}) {
    SimOptions o{SlotOrder::ArrivalFirst};
    o.tie = tie;
    auto t = run_scripted(g, p, 200 * p.period_slots(), 1, o);
    EXPECT_TRUE(equal_queues_at_boundaries(t, p.links)) << to_string(tie);
    ASSERT_EQ(t.frame_snapshots.size(), 600U);
    for (std::size_t f = 0; f < t.frame_snapshots.size(); ++f)
      EXPECT_EQ(t.frame_snapshots[f][0], static_cast<std::int64_t>((f + 1) / 50));
  }
}

TEST(AdversarialTest, NoSurgeNoGrowth) {
  auto g = path_abc();
  auto p = example_b_pattern(r(0));
  auto t = run_scripted(g, p, 300, 1);
  for (const auto& q : t.frame_snapshots) EXPECT_EQ(q, Queues(3, 0));
  EXPECT_EQ(t.surges, 0U);
}

TEST(AdversarialTest, SingleLinkConstantQueue) {
  auto g = testing::single_link();
  AdversarialOptions o;
  o.epsilon = 0;
  auto p = build_adversarial_pattern(g, no_fading(1), g.all_links(), {r(1)}, {{r(1)}}, o);
  auto t = run_scripted(g, p, 1000, 1);
  for (auto m : t.trace.max_queue) EXPECT_EQ(m, 0);
}

TEST(AdversarialTest, ProbabilisticSurgeRate) {
  auto g = path_abc();
  auto gp = path_abc();
  AdversarialOptions o;
  o.surge = SurgeMode::Probabilistic;
  auto p = build_adversarial_pattern(gp, example_b_fading(), gp.all_links(), RateVector(3, r(1, 3)),
                                     example_b_weights(), o);
  auto t = run_scripted(g, p, 300000, 17);
  EXPECT_NEAR(static_cast<double>(t.surges) / 300000.0, 0.02, 0.002);
  EXPECT_TRUE(equal_queues_at_boundaries(t, p.links));
  EXPECT_EQ(stability_verdict(t.trace).verdict, Verdict::Unstable);
}

TEST(TraceExportTest, Csv) {
  auto g = path_abc();
  SimOptions o;
  o.record_every = 2;
  auto t = run_iid(g, example_b_fading(), {0.3, 0.3, 0.3}, 4, 1, o);
  std::ostringstream os;
  write_trace_csv(os, t, g);
  std::string csv = os.str();
  EXPECT_EQ(csv.rfind("slot,link,Q,C,S,A\n", 0), 0U);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 2 * 3);
}

}  // namespace
}  // namespace flpf
