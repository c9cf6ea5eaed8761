#include <gtest/gtest.h>

#include "support.hpp"

using namespace rideshare;
using test_support::cost_graph;

namespace {

Preferences manual_prefs(const std::vector<std::vector<Index>>& lists) {
  Preferences prefs(lists.size());
  for (Index i = 0; i < lists.size(); ++i) {
    prefs[i].owner = i;
    for (Index j : lists[i]) prefs[i].ranked_options.push_back({j, 0, 0.0});
  }
  return prefs;
}

// Every feasible assignment of a small graph, as partner tables.
void all_partner_tables(const MatchingGraph& g, std::vector<Index>& partner, Index from,
                        std::vector<std::vector<Index>>& out) {
  while (from < g.size() && partner[from] != kNoIndex) ++from;
  if (from == g.size()) {
    auto table = partner;
    for (Index i = 0; i < table.size(); ++i) {
      if (table[i] == i) table[i] = kNoIndex;
    }
    out.push_back(table);
    return;
  }
  partner[from] = from;
  all_partner_tables(g, partner, from + 1, out);
  for (Index e : g.incident(from)) {
    const Index o = g.partner(e, from);
    if (partner[o] != kNoIndex) continue;
    partner[from] = o;
    partner[o] = from;
    all_partner_tables(g, partner, from + 1, out);
    partner[o] = kNoIndex;
  }
  partner[from] = kNoIndex;
}

}  // namespace

TEST(StableMatch, WorkedExampleRow) {
  const auto f = test_support::load_fig2();
  const auto& g = f.graph;
  const auto run = [&](Mechanism m) { return std::get<StableMatch>(stable_match(build_preferences(m, g), g)); };
  const auto eq = run(Mechanism::kEqual).assignment;
  ASSERT_EQ(eq.pairs.size(), 1u);
  EXPECT_EQ(eq.pairs[0], std::pair(f.i(), f.j()));
  EXPECT_NEAR(eq.social_cost, 16.3, 1e-9);
  const auto ega = run(Mechanism::kEgalitarian).assignment;
  EXPECT_EQ(ega.pairs.size(), 2u);
  EXPECT_NEAR(ega.social_cost, 14.0, 1e-9);
  EXPECT_EQ(run(Mechanism::kProportional).assignment, ega);
  EXPECT_EQ(run(Mechanism::kSegmentBased).assignment, eq);

  // The optimum is not stable under equal split: i and j both gain by leaving.
  const auto blocking = find_blocking_pair(ega, Mechanism::kEqual, g);
  ASSERT_TRUE(blocking);
  EXPECT_EQ(*blocking, std::pair(f.i(), f.j()));
}

TEST(StableMatch, TraceReplaysToResult) {
  const auto f = test_support::load_fig2();
  const auto& g = f.graph;
  for (auto m : kAllMechanisms) {
    const auto out = std::get<StableMatch>(stable_match(build_preferences(m, g), g));
    EXPECT_EQ(assignment_from_partners(g, replay(out.trace, g.size())), out.assignment);
    EXPECT_EQ(out.proposals, out.trace.rounds.size());
  }
}

TEST(StableMatch, EmptyAndSingle) {
  const auto empty = cost_graph({}, {});
  const auto out = std::get<StableMatch>(stable_match(build_preferences(Mechanism::kEqual, empty), empty));
  EXPECT_TRUE(out.assignment.pairs.empty());
  EXPECT_TRUE(out.assignment.singletons.empty());
  const auto one = cost_graph({3}, {});
  const auto single = std::get<StableMatch>(stable_match(build_preferences(Mechanism::kEqual, one), one));
  EXPECT_EQ(single.assignment.singletons, std::vector<Index>{0});
  EXPECT_DOUBLE_EQ(single.assignment.social_cost, 3.0);
}

TEST(Cycles, RockPaperScissors) {
  const auto prefs = manual_prefs({{1, 2}, {2, 0}, {0, 1}});
  const auto cycles = detect_cycles(prefs);
  ASSERT_EQ(cycles.size(), 1u);
  EXPECT_EQ(cycles[0], (std::vector<Index>{0, 2, 1}));
  EXPECT_TRUE(is_cyclic_preference(prefs, cycles[0]));
  EXPECT_FALSE(is_cyclic_preference(prefs, {0, 1, 2}));

  const auto g = cost_graph({10, 10, 10}, {{0, 1, 15}, {0, 2, 15}, {1, 2, 15}});
  const auto out = stable_match(prefs, g);
  ASSERT_TRUE(std::holds_alternative<CyclicFailure>(out));
  EXPECT_EQ(std::get<CyclicFailure>(out).cycles, cycles);
}

TEST(Cycles, ConsistentRankingIsAcyclic) {
  const auto prefs = manual_prefs({{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}});
  EXPECT_TRUE(detect_cycles(prefs).empty());
}

TEST(Cycles, OnlyMutuallyAcceptablePairsCount) {
  // The 0-2 link is one-sided, so the rotation is not a cyclic preference.
  const auto prefs = manual_prefs({{1, 2}, {2, 0}, {1}});
  EXPECT_TRUE(detect_cycles(prefs).empty());
}

TEST(Cycles, LimitsBoundEnumeration) {
  const auto prefs = manual_prefs({{1, 2}, {2, 0}, {0, 1}});
  EXPECT_TRUE(detect_cycles(prefs, {0, 5'000'000}).empty());
}

TEST(Cycles, WitnessSurvivesExhaustedStepBudget) {
  const auto prefs = manual_prefs({{1, 2}, {2, 0}, {0, 1}});
  const auto cycles = detect_cycles(prefs, {1000, 0});
  ASSERT_EQ(cycles.size(), 1u);
  EXPECT_EQ(cycles[0], (std::vector<Index>{0, 2, 1}));
}

TEST(Cycles, ClosedWalkIsShortenedToElementaryCycle) {
  // Two rock-paper-scissors triangles sharing commuter 0; the walk visits 0 twice.
  const auto prefs = manual_prefs({{1, 3, 2, 4}, {2, 0}, {0, 1}, {4, 0}, {0, 3}});
  const detail::RankTable ranks(prefs);
  const auto cycle = detail::elementary_cycle(ranks, {0, 2, 1, 0, 4, 3});
  EXPECT_EQ(cycle, (std::vector<Index>{0, 2, 1}));
  EXPECT_TRUE(is_cyclic_preference(prefs, cycle));
  EXPECT_FALSE(is_cyclic_preference(prefs, {0, 2, 1, 0, 4, 3}));
  const auto all = detect_cycles(prefs);
  EXPECT_EQ(all.size(), 2u);
  for (const auto& c : all) EXPECT_TRUE(is_cyclic_preference(prefs, c));
}

TEST(Trace, TruncatedTraceIsNotReplayed) {
  MatchTrace trace;
  trace.truncated = true;
  EXPECT_THROW(replay(trace, 3), InputError);
}

TEST(BlockingPair, RespectsCurrentPartners) {
  const auto prefs = manual_prefs({{1, 2}, {0}, {0}});
  EXPECT_FALSE(find_blocking_pair_in(prefs, {1, 0, kNoIndex}));
  EXPECT_EQ(find_blocking_pair_in(prefs, {2, kNoIndex, 0}), std::pair(Index{0}, Index{1}));
}

class SmallRandom : public ::testing::TestWithParam<int> {};

TEST_P(SmallRandom, OutputIsAmongEnumeratedStableAssignments) {
  const auto inst = test_support::random_geo_instance(7000 + GetParam(), 3 + GetParam() % 6);
  const auto& g = inst.graph;
  std::vector<std::vector<Index>> tables;
  std::vector<Index> scratch(g.size(), kNoIndex);
  all_partner_tables(g, scratch, 0, tables);
  for (auto m : kAllMechanisms) {
    const auto prefs = build_preferences(m, g);
    std::size_t stable_count = 0;
    for (const auto& t : tables) stable_count += !find_blocking_pair_in(prefs, t);
    const auto out = stable_match(prefs, g);
    if (const auto* ok = std::get_if<StableMatch>(&out)) {
      EXPECT_FALSE(find_blocking_pair_in(prefs, partners_of(g, ok->assignment)));
      EXPECT_FALSE(find_blocking_pair(ok->assignment, m, g));
      EXPECT_GT(stable_count, 0u);
    } else {
      EXPECT_EQ(m, Mechanism::kSegmentBased);
      for (const auto& c : std::get<CyclicFailure>(out).cycles) EXPECT_TRUE(is_cyclic_preference(prefs, c));
    }
    if (m != Mechanism::kSegmentBased) {
      EXPECT_TRUE(detect_cycles(prefs).empty());
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, SmallRandom, ::testing::Range(0, 60));
