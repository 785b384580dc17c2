#include "flpf/pooling.hpp"

#include <gtest/gtest.h>

#include <random>

#include "test_networks.hpp"

namespace flpf {
namespace {

using testing::example_b_fading;
using testing::hexagon_graph;
using testing::path_abc;
using testing::single_link;

Rational r(std::int64_t n, std::int64_t d = 1) { return make_rational(n, d); }

// Schedule sizes by plain subset scan, independent of the library's MIS code.
std::pair<std::size_t, std::size_t> brute_min_max_mis(const InterferenceGraph& g, LinkSet active) {
  if (active.empty()) return {0, 0};
  std::size_t lo = 64, hi = 0;
  for_each_subset(active, [&](LinkSet s) {
    for (std::size_t a : s.members())
      for (std::size_t b : s.members())
        if (g.interfere(a, b)) return;
    for (std::size_t l : (active - s).members()) {
      bool blocked = false;
      for (std::size_t m : s.members()) blocked = blocked || g.interfere(l, m);
      if (!blocked) return;
    }
    lo = std::min(lo, s.size());
    hi = std::max(hi, s.size());
  });
  return {lo, hi};
}

// Ratio of expected smallest to largest schedule size, marginal built by hand.
std::optional<Rational> brute_thm3(const InterferenceGraph& g, const FadingStructure& f, LinkSet links) {
  Rational num = 0, den = 0;
  for (const auto& ws : f.states()) {
    auto [lo, hi] = brute_min_max_mis(g, ws.state.on_set() & links);
    num += ws.probability * static_cast<long>(lo);
    den += ws.probability * static_cast<long>(hi);
  }
  if (is_zero(den)) return std::nullopt;
  return num / den;
}

RateVector uniform(std::size_t k, Rational v) { return RateVector(k, v); }

TEST(SigmaExactTest, HexagonNoFading) {
  auto g = hexagon_graph();
  EXPECT_EQ(sigma_L_exact(g, no_fading(6), g.all_links()), r(2, 3));
}

TEST(SigmaExactTest, SingleLink) {
  auto g = single_link();
  EXPECT_EQ(sigma_L_exact(g, no_fading(1), g.all_links()), 1);
  auto f = from_explicit(1, {LinkSet{0}, LinkSet{}}, {r(1, 4), r(3, 4)});
  EXPECT_EQ(sigma_graph_exact(g, f).value, 1);
}

TEST(SigmaExactTest, ExampleBWithinPublishedBounds) {
  auto g = path_abc();
  Rational s = sigma_L_exact(g, example_b_fading(), g.all_links());
  EXPECT_GE(s, r(3, 4));
  EXPECT_LE(s, r(4, 5));
}

TEST(SigmaExactTest, EmptyLinkSetRejected) {
  auto g = path_abc();
  try {
    sigma_L_exact(g, example_b_fading(), LinkSet{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyActiveSet);
  }
}

TEST(SigmaExactTest, NeverOnSetIsUnconstrained) {
  auto g = path_abc();
  auto f = from_explicit(3, {LinkSet{0, 1}}, {r(1)});
  EXPECT_EQ(sigma_L_exact(g, f, LinkSet{2}), 1);
  EXPECT_EQ(sigma_L_bisection(g, f, LinkSet{2}, r(1, 1000)).lo, 1);
}

TEST(SigmaGraphTest, HexagonArgminIsFullSet) {
  auto g = hexagon_graph();
  auto res = sigma_graph_exact(g, no_fading(6));
  EXPECT_EQ(res.value, r(2, 3));
  EXPECT_EQ(res.argmin, g.all_links());
}

TEST(SigmaGraphTest, ExampleBMatchesExhaustiveScan) {
  auto g = path_abc();
  auto f = example_b_fading();
  auto res = sigma_graph_exact(g, f);
  Rational best = 2;
  for_each_subset(g.all_links(), [&](LinkSet s) {
    if (!s.empty()) best = std::min(best, sigma_L_exact(g, f, s));
  });
  EXPECT_EQ(res.value, best);
  EXPECT_EQ(sigma_L_exact(g, f, res.argmin), res.value);
  EXPECT_LT(res.value, 1);
}

TEST(SigmaGraphTest, CapEnforced) {
  auto g = hexagon_graph();
  Limits lim;
  lim.max_links = 5;
  EXPECT_THROW(sigma_graph_exact(g, no_fading(6), lim), Error);
}

TEST(BisectionTest, BracketsExactValue) {
  const Rational tol = r(1, 1000000);
  auto hex = hexagon_graph();
  auto iv = sigma_L_bisection(hex, no_fading(6), hex.all_links(), tol);
  EXPECT_LE(iv.width(), tol);
  EXPECT_LE(iv.lo, r(2, 3));
  EXPECT_GE(iv.hi, r(2, 3));

  auto one = single_link();
  auto iv1 = sigma_L_bisection(one, no_fading(1), one.all_links(), tol);
  EXPECT_LE(iv1.lo, 1);
  EXPECT_GE(iv1.hi, 1);

  auto g = path_abc();
  auto f = example_b_fading();
  auto ivb = sigma_L_bisection(g, f, g.all_links(), tol);
  Rational exact = sigma_L_exact(g, f, g.all_links());
  EXPECT_LE(ivb.lo, exact);
  EXPECT_GE(ivb.hi, exact);
  EXPECT_GE(ivb.lo, r(3, 4) - tol);
  EXPECT_LE(ivb.hi, r(4, 5) + tol);
}

TEST(BisectionTest, RejectsNonPositiveTolerance) {
  auto g = single_link();
  EXPECT_THROW(sigma_L_bisection(g, no_fading(1), g.all_links(), 0), Error);
}

TEST(WitnessPairTest, ExampleBPair) {
  auto g = path_abc();
  EXPECT_EQ(upper_bound_witness_pair(g, example_b_fading(), g.all_links(), uniform(3, r(1, 3)), uniform(3, r(5, 12))),
            r(4, 5));
}

TEST(WitnessPairTest, IdenticalVectorsGiveOne) {
  auto g = path_abc();
  auto v = uniform(3, r(5, 12));
  EXPECT_EQ(upper_bound_witness_pair(g, example_b_fading(), g.all_links(), v, v), 1);
}

TEST(WitnessPairTest, HexagonPairDominatesExact) {
  auto g = hexagon_graph();
  // Alternating triples versus the three antipodal pairs.
  Rational bound = upper_bound_witness_pair(g, no_fading(6), g.all_links(), uniform(6, r(1, 3)), uniform(6, r(1, 2)));
  EXPECT_EQ(bound, r(2, 3));
  EXPECT_GE(bound, sigma_graph_exact(g, no_fading(6)).value);
}

TEST(WitnessPairTest, Errors) {
  auto g = path_abc();
  auto f = example_b_fading();
  try {
    upper_bound_witness_pair(g, f, g.all_links(), uniform(3, r(1, 3)), uniform(3, r(1)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotInPhi);
  }
  // Only a serves: (2/3, 0, 0) versus only b: (0, 1, 0).
  try {
    upper_bound_witness_pair(g, f, g.all_links(), {r(2, 3), r(0), r(0)}, {r(0), r(1), r(0)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotInPhi);
  }
  auto f1 = no_fading(3);
  try {
    upper_bound_witness_pair(g, f1, g.all_links(), {r(1), r(0), r(1)}, {r(0), r(1), r(0)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UndefinedRatio);
  }
}

TEST(PhiTest, ExampleBDecomposition) {
  auto g = path_abc();
  auto d = describe_phi(g, example_b_fading(), g.all_links());
  auto w = phi_decomposition(d, uniform(3, r(5, 12)));
  ASSERT_TRUE(w.has_value());
  EXPECT_EQ(w->size(), 3U);
  for (const auto& ws : *w) {
    Rational sum = 0;
    for (const auto& x : ws) sum += x;
    EXPECT_EQ(sum, 1);
  }
  EXPECT_FALSE(in_phi(d, uniform(3, r(1, 2))));
}

TEST(Thm2Test, DegenerateTriplesGiveOne) {
  auto g = path_abc();
  auto f = example_b_fading();
  std::vector<Thm2Triple> triples;
  for (const auto& ws : f.states()) {
    auto m = schedule_matrix_for_state(g, ws.state, g.all_links());
    RateVector mu(3, r(0));
    for (std::size_t row = 0; row < 3; ++row) mu[row] = m.entry(row, 0);
    triples.push_back({mu, mu, r(1)});
  }
  EXPECT_EQ(upper_bound_thm2(g, f, triples), 1);
}

TEST(Thm2Test, SingleStateReducesToH) {
  auto g = hexagon_graph();
  Thm2Triple t{uniform(6, r(1, 2)), uniform(6, r(1, 3)), r(2, 3)};
  EXPECT_EQ(upper_bound_thm2(g, no_fading(6), {t}), r(2, 3));
}

TEST(Thm2Test, ExampleBPairTriples) {
  // Per-state pieces of (5/12)e: ab -> (1/2,1/2,0), bc -> (0,1/2,1/2),
  // abc -> (3/4,1/4,3/4). Pieces of (1/3)e put each state on b alone where
  // possible, the all-ON state on {a,c}.
  auto g = path_abc();
  auto f = example_b_fading();
  std::vector<Thm2Triple> triples{
      {{r(1, 2), r(1, 2), r(0)}, {r(0), r(1), r(0)}, r(2)},
      {{r(0), r(1, 2), r(1, 2)}, {r(0), r(1), r(0)}, r(2)},
      {{r(3, 4), r(1, 4), r(3, 4)}, {r(1), r(0), r(1)}, r(4, 3)},
  };
  Rational bound = upper_bound_thm2(g, f, triples);
  EXPECT_GE(bound, sigma_graph_exact(g, f).value);
}

TEST(Thm2Test, InvalidTriples) {
  auto g = path_abc();
  auto f = no_fading(3);
  auto expect_invalid = [&](Thm2Triple t) {
    try {
      upper_bound_thm2(g, f, {t});
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidTriple);
    }
  };
  expect_invalid({{r(1), r(1), r(0)}, {r(0), r(1), r(0)}, r(1)});      // mu not a schedule mix
  expect_invalid({{r(1), r(0), r(1)}, {r(0), r(1), r(0)}, r(1)});      // nu > H mu on b
  auto f2 = from_explicit(3, {LinkSet{0, 1}}, {r(1)});
  try {
    upper_bound_thm2(g, f2, {{{r(1), r(0), r(1)}, {r(1), r(0), r(1)}, r(1)}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidTriple);
  }
  EXPECT_THROW(upper_bound_thm2(g, f, {}), Error);
}

TEST(Thm2Test, DefaultTriplesValid) {
  auto g = hexagon_graph();
  for (const Rational& p : {r(1, 5), r(1, 2), r(1)}) {
    auto f = from_iid_bernoulli(g, p);
    Rational bound = upper_bound_thm2(g, f, default_thm2_triples(g, f));
    EXPECT_GE(bound, sigma_L_exact(g, f, g.all_links()));
  }
  EXPECT_EQ(upper_bound_thm2(g, no_fading(6), default_thm2_triples(g, no_fading(6))), r(2, 3));
}

TEST(Thm3Test, Examples) {
  auto g = path_abc();
  EXPECT_EQ(lower_bound_thm3(g, example_b_fading(), g.all_links()).value, r(3, 4));
  auto hex = hexagon_graph();
  EXPECT_EQ(lower_bound_thm3(hex, no_fading(6), hex.all_links()).value, r(2, 3));
  auto one = single_link();
  EXPECT_EQ(lower_bound_thm3(one, no_fading(1), one.all_links()).value, 1);
}

TEST(Thm3Test, VacuousWhenAllOff) {
  auto g = path_abc();
  auto f = from_explicit(3, {LinkSet{0}}, {r(1)});
  auto b = lower_bound_thm3(g, f, LinkSet{1, 2});
  EXPECT_TRUE(b.vacuous);
  EXPECT_EQ(b.value, 1);
}

TEST(Thm3Test, MultiStateUnsupported) {
  auto g = path_abc();
  auto f = from_explicit_values(3, {0, 1, 2}, {{r(1), r(2), r(0)}}, {r(1)});
  EXPECT_THROW(lower_bound_thm3(g, f, g.all_links()), Error);
}

TEST(Corollary1Test, Examples) {
  EXPECT_EQ(corollary1_bound(testing::fig1_graph()), r(1, 2));
  EXPECT_EQ(corollary1_bound(hexagon_graph()), r(1, 2));
  EXPECT_EQ(corollary1_bound(testing::clique(4)), 1);
}

TEST(BoundReportTest, OrderingOnNamedNetworks) {
  auto check = [](const InterferenceGraph& g, const FadingStructure& f) {
    auto rep = bound_report(g, f);
    ASSERT_TRUE(rep.lower && rep.upper && rep.exact);
    EXPECT_LE(rep.corollary1, *rep.lower);
    EXPECT_LE(*rep.lower, *rep.exact);
    EXPECT_LE(*rep.exact, *rep.upper);
    EXPECT_LE(*rep.upper, 1);
  };
  check(hexagon_graph(), no_fading(6));
  check(path_abc(), example_b_fading());
  check(testing::fig1_graph(), from_iid_bernoulli(4, r(1, 2)));
}

TEST(BoundReportTest, MultiStateOnlyExactAndCorollary) {
  auto g = path_abc();
  auto f = from_explicit_values(3, {0, 1, 2}, {{r(1), r(2), r(0)}, {r(2), r(1), r(1)}}, {r(1, 2), r(1, 2)});
  auto rep = bound_report(g, f);
  EXPECT_FALSE(rep.lower.has_value());
  EXPECT_FALSE(rep.upper.has_value());
  ASSERT_TRUE(rep.exact.has_value());
  EXPECT_GT(*rep.exact, 0);
  EXPECT_LE(*rep.exact, 1);
}

TEST(RegionTest, InterferenceDegreeVersusUniformScaling) {
  auto g = path_abc();
  auto f = example_b_fading();
  RateVector lambda{r(0), r(5, 6), r(0)};
  auto in = region_membership(g, f, lambda, RegionScaling::interference_degree());
  EXPECT_TRUE(in.inside);
  auto out = region_membership(g, f, lambda, RegionScaling::uniform(r(4, 5)));
  EXPECT_FALSE(out.inside);
  EXPECT_EQ(out.position, RegionPosition::Exterior);
  // Separating weights: c'lambda = 1 while every scaled service has c' <= t* < 1.
  ASSERT_EQ(out.certificate.size(), 3U);
  Rational dot = 0;
  for (std::size_t l = 0; l < 3; ++l) dot += out.certificate[l] * lambda[l];
  EXPECT_EQ(dot, 1);
  EXPECT_LT(*out.max_scaling, 1);
}

TEST(RegionTest, ZeroRateInside) {
  auto g = hexagon_graph();
  auto v = region_membership(g, no_fading(6), RateVector(6, r(0)), RegionScaling::none());
  EXPECT_TRUE(v.inside);
}

TEST(RegionTest, BoundaryAndInterior) {
  auto g = path_abc();
  auto f = example_b_fading();
  // Link b is ON in every state, so the full region reaches rate 1 on b alone.
  auto edge = region_membership(g, f, {r(0), r(1), r(0)}, RegionScaling::none());
  EXPECT_EQ(edge.position, RegionPosition::Boundary);
  EXPECT_TRUE(edge.inside);
  auto inner = region_membership(g, f, uniform(3, r(1, 3)), RegionScaling::none());
  EXPECT_EQ(inner.position, RegionPosition::Interior);
  auto per = region_membership(g, f, {r(0), r(1, 2), r(0)},
                               RegionScaling::per_state_factors({r(1, 2), r(1, 2), r(1, 2)}));
  EXPECT_EQ(per.position, RegionPosition::Boundary);
}

TEST(RegionTest, ScalingMonotone) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> num(0, 6);
  auto g = path_abc();
  auto f = example_b_fading();
  for (int trial = 0; trial < 40; ++trial) {
    RateVector lambda{r(num(rng), 12), r(num(rng), 12), r(num(rng), 12)};
    bool prev = false;
    for (const Rational& gamma : {r(1, 4), r(1, 2), r(3, 4), r(1)}) {
      bool now = region_membership(g, f, lambda, RegionScaling::uniform(gamma)).inside;
      EXPECT_TRUE(!prev || now);
      prev = now;
    }
  }
}

TEST(PropertyTest, RandomInstancesSandwichAndOracle) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> size(1, 4);
  const Rational tol = r(1, 1000000);
  for (int trial = 0; trial < 40; ++trial) {
    auto g = testing::random_graph(size(rng), 0.5, rng);
    auto f = testing::random_explicit_fading(g.size(), 4, rng);
    for_each_subset(g.all_links(), [&](LinkSet s) {
      if (s.empty()) return;
      Rational exact = sigma_L_exact(g, f, s);
      EXPECT_LE(exact, 1);
      auto lb = lower_bound_thm3(g, f, s);
      auto oracle = brute_thm3(g, f, s);
      EXPECT_EQ(lb.vacuous, !oracle.has_value());
      if (oracle) {
        EXPECT_EQ(lb.value, *oracle);
        EXPECT_LE(lb.value, exact);
      }
      auto iv = sigma_L_bisection(g, f, s, tol);
      EXPECT_LE(abs(exact - iv.midpoint()), tol);
    });
    EXPECT_GE(sigma_graph_exact(g, f).value, corollary1_bound(g));
  }
}

}  // namespace
}  // namespace flpf
