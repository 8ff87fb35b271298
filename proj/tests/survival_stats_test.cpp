#include "smellsurv/survival_stats.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles/km_oracle.hpp"
#include "oracles/logrank_oracle.hpp"
#include "smellsurv/error.hpp"
#include "test_support.hpp"

namespace smellsurv {
namespace {

using Obs = std::vector<Observation>;

Obs random_obs(std::mt19937_64& rng, std::size_t n, bool integer_times = true) {
  std::uniform_int_distribution<int> t(0, 100);
  std::uniform_real_distribution<double> tr(0, 100);
  std::bernoulli_distribution ev(0.6);
  Obs out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({integer_times ? static_cast<double>(t(rng)) : tr(rng), ev(rng)});
  }
  return out;
}

void expect_valid_curve(const SurvivalCurve& c) {
  double prev_s = 1.0, prev_t = -1;
  for (const auto& p : c.points) {
    EXPECT_GT(p.time_days, prev_t);
    EXPECT_LE(p.survival, prev_s);
    EXPECT_GE(p.survival, 0.0);
    EXPECT_LE(p.survival, 1.0);
    prev_s = p.survival;
    prev_t = p.time_days;
  }
  if (!c.points.empty()) EXPECT_EQ(c.survival_at(c.points.front().time_days - 1e-9), 1.0);
}

TEST(KaplanMeier, NoEventsStaysAtOne) {
  const Obs obs = {{3, false}, {7, false}, {7, false}};
  const auto c = kaplan_meier(obs);
  for (const auto& p : c.points) EXPECT_EQ(p.survival, 1.0);
  EXPECT_EQ(c.tau, 7);
  EXPECT_FALSE(median_survival(c));
}

TEST(KaplanMeier, EventThenCensoring) {
  const Obs obs = {{5, true}, {8, false}};
  const auto c = kaplan_meier(obs);
  EXPECT_EQ(c.survival_at(0), 1.0);
  EXPECT_EQ(c.survival_at(4.999), 1.0);
  EXPECT_EQ(c.survival_at(5), 0.5);
  EXPECT_EQ(c.survival_at(8), 0.5);
  EXPECT_EQ(c.tau, 8);
}

TEST(KaplanMeier, EventsBeforeCensoringsAtTies) {
  const Obs obs = {{2, true}, {2, false}, {4, true}};
  const auto c = kaplan_meier(obs);
  ASSERT_EQ(c.points.size(), 2u);
  EXPECT_EQ(c.points[0].n_at_risk, 3);
  EXPECT_EQ(c.points[0].n_events, 1);
  EXPECT_DOUBLE_EQ(c.survival_at(2), 2.0 / 3.0);
  EXPECT_EQ(c.points[1].n_at_risk, 1);
  EXPECT_EQ(c.survival_at(4), 0.0);
}

TEST(KaplanMeier, EmptyInputIsAnError) {
  try {
    kaplan_meier(Obs{});
    FAIL();
  } catch (const StatsError& e) {
    EXPECT_STREQ(e.what(), "no records");
  }
}

TEST(KaplanMeierProperty, MatchesBruteForceOracle) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 300; ++trial) {
    const auto obs = random_obs(rng, 1 + trial % 20, trial % 3 != 0);
    const auto c = kaplan_meier(obs);
    const auto ref = oracle::kaplan_meier(obs);
    ASSERT_EQ(c.points.size(), ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
      EXPECT_EQ(c.points[i].time_days, ref[i].time);
      EXPECT_EQ(c.points[i].n_at_risk, ref[i].at_risk);
      EXPECT_EQ(c.points[i].n_events, ref[i].events);
      EXPECT_NEAR(c.points[i].survival, ref[i].survival, 1e-12);
    }
    expect_valid_curve(c);
  }
}

TEST(Median, SingleEvent) {
  EXPECT_EQ(*median_survival(kaplan_meier(Obs{{5, true}})), 5.0);
}

TEST(Median, CurveThatNeverHalvesIsNa) {
  // 8 subjects, 3 events: S floors at 5/8 = 0.625.
  const Obs obs = {{10, true}, {20, true}, {30, true}, {40, false}, {40, false},
                   {50, false}, {60, false}, {70, false}};
  const auto c = kaplan_meier(obs);
  EXPECT_NEAR(c.points.back().survival, 0.625, 1e-15);
  EXPECT_FALSE(median_survival(c));
}

TEST(Median, ExactHalfCountsAsReached) {
  const Obs obs = {{100, true}, {1418, true}, {2000, false}, {2500, false}};
  const auto c = kaplan_meier(obs);
  EXPECT_DOUBLE_EQ(c.survival_at(1418), 0.5);
  EXPECT_EQ(*median_survival(c), 1418.0);
}

TEST(RestrictedMean, NoCensoringGivesArithmeticMean) {
  const Obs obs = {{3, true}, {5, true}, {10, true}, {10, true}, {22, true}};
  const auto rm = restricted_mean(kaplan_meier(obs));
  EXPECT_NEAR(rm.rmean, 10.0, 1e-12);
}

TEST(RestrictedMean, StepIntegration) {
  const auto rm = restricted_mean(kaplan_meier(Obs{{5, true}, {8, false}}), 8.0);
  EXPECT_DOUBLE_EQ(rm.rmean, 6.5);
  // One event at t=5 with n=2, d=1; area after it is 3 * 0.5.
  EXPECT_NEAR(rm.se, std::sqrt(1.5 * 1.5 * 1 / (2.0 * 1.0)), 1e-12);
}

TEST(RestrictedMean, SingleRecordHasZeroSe) {
  const auto rm = restricted_mean(kaplan_meier(Obs{{5, true}}), 5.0);
  EXPECT_EQ(rm.rmean, 5.0);
  EXPECT_EQ(rm.se, 0.0);
}

TEST(RestrictedMean, HorizonValidation) {
  const auto c = kaplan_meier(Obs{{5, true}, {8, false}});
  EXPECT_THROW(restricted_mean(c, 0.0), StatsError);
  EXPECT_THROW(restricted_mean(c, -1.0), StatsError);
  EXPECT_THROW(restricted_mean(c, 9.0), StatsError);
  EXPECT_DOUBLE_EQ(restricted_mean(c, 3.0).rmean, 3.0);
}

TEST(RestrictedMeanProperty, MatchesOracleArea) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const auto obs = random_obs(rng, 2 + trial % 19, false);
    const auto c = kaplan_meier(obs);
    if (c.tau <= 0) continue;
    std::uniform_real_distribution<double> h(1e-3, c.tau);
    const double tau = h(rng);
    EXPECT_NEAR(restricted_mean(c, tau).rmean, oracle::area_under(oracle::kaplan_meier(obs), tau), 1e-9);
  }
}

TEST(LogRank, IdenticalGroupsGiveZero) {
  const Obs a = {{1, true}, {4, false}, {4, true}, {9, true}};
  const auto r = log_rank(a, a);
  EXPECT_NEAR(r.statistic, 0.0, 1e-15);
  EXPECT_EQ(r.p_value, 1.0);
}

TEST(LogRank, SwapIsSymmetric) {
  const Obs a = {{1, true}, {3, false}, {6, true}};
  const Obs b = {{2, true}, {2, true}, {8, true}, {9, false}};
  const auto ab = log_rank(a, b);
  const auto ba = log_rank(b, a);
  EXPECT_NEAR(ab.statistic, ba.statistic, 1e-12);
  EXPECT_NEAR(ab.p_value, ba.p_value, 1e-12);
}

TEST(LogRank, SeparatedGroupsMatchOracle) {
  const Obs a = {{1, true}, {2, true}, {3, true}};
  const Obs b = {{4, true}, {5, true}, {6, true}};
  const auto r = log_rank(a, b);
  const auto ref = oracle::log_rank(a, b);
  // Hand sums: O-E = 3 - 1.15, V = 0.6775.
  EXPECT_NEAR(ref.statistic, 1.85 * 1.85 / 0.6775, 1e-12);
  EXPECT_NEAR(r.statistic, ref.statistic, 1e-6);
  EXPECT_NEAR(r.p_value, ref.p_value, 1e-6);
  EXPECT_LT(r.p_value, 0.05);
}

TEST(LogRank, ErrorsAndWarnings) {
  EXPECT_THROW(log_rank(Obs{}, Obs{{1, true}}), StatsError);
  EXPECT_THROW(log_rank(Obs{{1, false}}, Obs{{2, false}}), StatsError);
  const auto r = log_rank(Obs{{1, true}, {2, true}}, Obs{{3, false}, {5, false}});
  EXPECT_TRUE(r.warning);
}

TEST(LogRankProperty, MatchesOracle) {
  std::mt19937_64 rng(23);
  int checked = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const auto a = random_obs(rng, 1 + trial % 20, trial % 2 == 0);
    const auto b = random_obs(rng, 1 + (trial * 7) % 20, trial % 2 == 0);
    const auto ref = oracle::log_rank(a, b);
    if (ref.observed_a + ref.observed_b == 0) {
      EXPECT_THROW(log_rank(a, b), StatsError);
      continue;
    }
    const auto r = log_rank(a, b);
    EXPECT_NEAR(r.statistic, ref.statistic, 1e-9);
    EXPECT_NEAR(r.p_value, ref.p_value, 1e-9);
    EXPECT_NEAR(r.observed[0] + r.observed[1], r.expected[0] + r.expected[1], 1e-9);
    EXPECT_NEAR(r.expected[0], ref.expected_a, 1e-9);
    ++checked;
  }
  EXPECT_GT(checked, 300);
}

TEST(LogRankProperty, RankInvariantUnderMonotoneTransforms) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    auto a = random_obs(rng, 3 + trial % 15);
    auto b = random_obs(rng, 3 + (trial * 5) % 15);
    a.push_back({50, true});
    const auto base = log_rank(a, b);
    for (auto transform : {+[](double t) { return t * t; }, +[](double t) { return std::log1p(t); }}) {
      auto ta = a, tb = b;
      for (auto& o : ta) o.time = transform(o.time);
      for (auto& o : tb) o.time = transform(o.time);
      const auto r = log_rank(ta, tb);
      EXPECT_NEAR(r.statistic, base.statistic, 1e-9);
      EXPECT_NEAR(r.p_value, base.p_value, 1e-9);
    }
  }
}

TEST(SummarizeProperty, ScaleEquivariance) {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> scale(0.1, 10);
  for (int trial = 0; trial < 200; ++trial) {
    auto obs = random_obs(rng, 2 + trial % 19);
    obs.push_back({60, true});
    const double c = scale(rng);
    auto scaled = obs;
    for (auto& o : scaled) o.time *= c;
    const auto s0 = summarize(obs);
    const auto s1 = summarize(scaled);
    EXPECT_EQ(s0.pct_removed, s1.pct_removed);
    ASSERT_EQ(s0.median_days.has_value(), s1.median_days.has_value());
    if (s0.median_days) EXPECT_NEAR(*s1.median_days, c * *s0.median_days, 1e-9 * c * 100);
    EXPECT_NEAR(s1.rmean_days, c * s0.rmean_days, 1e-9 * c * 100);
    EXPECT_NEAR(s1.se_rmean, c * s0.se_rmean, 1e-9 * c * 100);
  }
}

TEST(Summarize, CountsRemovals) {
  Obs obs;
  for (int i = 0; i < 10; ++i) obs.push_back({static_cast<double>(10 + i), i < 6});
  const auto s = summarize(obs);
  EXPECT_EQ(s.found, 10);
  EXPECT_EQ(s.removed, 6);
  EXPECT_DOUBLE_EQ(s.pct_removed, 0.6);
}

std::vector<SurvivalRecord> records_with(Scope scope, const Obs& obs, int timeframe = 1) {
  std::vector<SurvivalRecord> out;
  for (const auto& o : obs) {
    SurvivalRecord r;
    r.scope = scope;
    r.key.rule = scope == Scope::localized ? RuleId::ExcessiveMethodLength : RuleId::NumberOfChildren;
    r.duration_days = o.time;
    r.censored = o.event ? 1 : 0;
    r.timeframe = timeframe;
    out.push_back(r);
  }
  return out;
}

TEST(CompareGroups, ScatteredDoubledDurationsDominate) {
  const Obs local = {{10, true}, {20, true}, {25, false}, {30, true}, {40, true}, {55, true},
                     {60, false}, {70, true}, {80, true}, {90, true}};
  Obs scattered = local;
  for (auto& o : scattered) o.time *= 2;
  auto recs = records_with(Scope::localized, local);
  const auto sc = records_with(Scope::scattered, scattered);
  recs.insert(recs.end(), sc.begin(), sc.end());

  const auto h = testing::history_from_bits({{true, true}}, {testing::day(2010, 1, 1), testing::day(2010, 6, 1)});
  const auto cmp = compare_groups(recs, Partition::scope, h);
  EXPECT_EQ(cmp.group_names[0], "localized");
  for (double t : {15.0, 45.0, 85.0, 150.0}) {
    EXPECT_GE(cmp.curves[1].survival_at(t), cmp.curves[0].survival_at(t));
  }
  const auto ref = oracle::log_rank(local, scattered);
  EXPECT_NEAR(cmp.test.p_value, ref.p_value, 1e-12);
  EXPECT_NEAR(*cmp.summaries[1].median_days, 2 * *cmp.summaries[0].median_days, 1e-12);
}

TEST(CompareGroups, EmptyGroupIsAnError) {
  const auto recs = records_with(Scope::localized, {{1, true}, {2, false}});
  const auto h = testing::history_from_bits({{true, true}}, {testing::day(2010, 1, 1), testing::day(2010, 6, 1)});
  try {
    compare_groups(recs, Partition::scope, h);
    FAIL();
  } catch (const StatsError& e) {
    EXPECT_NE(std::string(e.what()).find("scattered"), std::string::npos);
  }
}

TEST(CompareGroups, IdenticalGroupsGivePOne) {
  const Obs obs = {{3, true}, {9, false}, {12, true}};
  auto recs = records_with(Scope::localized, obs);
  const auto sc = records_with(Scope::scattered, obs);
  recs.insert(recs.end(), sc.begin(), sc.end());
  const auto h = testing::history_from_bits({{true, true}}, {testing::day(2010, 1, 1), testing::day(2010, 6, 1)});
  EXPECT_EQ(compare_groups(recs, Partition::scope, h).test.p_value, 1.0);

  const auto cmp = compare_observations({"1", "2"}, obs, obs);
  EXPECT_EQ(cmp.test.p_value, 1.0);
}

TEST(CompareGroups, EventlessGroupWarns) {
  const auto cmp = compare_observations({"localized", "scattered"}, Obs{{3, true}, {5, true}},
                                        Obs{{4, false}, {8, false}});
  ASSERT_TRUE(cmp.test.warning);
  EXPECT_NE(cmp.test.warning->find("'scattered'"), std::string::npos);
}

TEST(CompareGroups, TimeframePartitionUsesTruncatedView) {
  // Key 0 lives v0..v2 and is removed at v3, after the split; key 1 is born
  // after the split.
  const std::vector<Timestamp> times = {testing::day(2010, 1, 1), testing::day(2010, 2, 1),
                                        testing::day(2010, 3, 1), testing::day(2010, 5, 1),
                                        testing::day(2010, 7, 1)};
  const std::vector<std::vector<bool>> bits = {{true, true, true, false, false},
                                               {false, false, false, true, false},
                                               {true, false, false, false, false}};
  const auto h = testing::history_from_bits(bits, times);
  const auto recs = build_survival_records(h);
  const auto cmp = compare_groups(recs, Partition::timeframe, h);
  EXPECT_EQ(cmp.summaries[0].found, 2);
  EXPECT_EQ(cmp.summaries[0].removed, 1);  // key 0's removal falls after the split
  EXPECT_EQ(cmp.summaries[1].found, 1);
  EXPECT_EQ(cmp.summaries[1].removed, 1);
}

}  // namespace
}  // namespace smellsurv
