#include "smellsurv/anomaly.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "smellsurv/error.hpp"
#include "test_support.hpp"

namespace smellsurv {
namespace {

History history_with_counts(const std::vector<std::size_t>& counts,
                            const std::vector<std::uint64_t>& lloc) {
  std::vector<VersionSnapshot> snaps;
  for (std::size_t v = 0; v < counts.size(); ++v) {
    VersionSnapshot s;
    s.version_id = "r" + std::to_string(v);
    s.timestamp = testing::days_after(testing::day(2012, 1, 1), static_cast<long>(30 * v));
    s.size.lloc = lloc[v];
    for (std::size_t k = 0; k < counts[v]; ++k) {
      s.occurrences.push_back(testing::synthetic_occurrence(k, s.version_id));
    }
    snaps.push_back(std::move(s));
  }
  return make_history("app", std::move(snaps));
}

std::vector<DensityPoint> series_with_deltas(const std::vector<double>& deltas) {
  std::vector<DensityPoint> out(deltas.size() + 1);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].version_id = "v" + std::to_string(i);
    if (i > 0) out[i].delta_rho = deltas[i - 1];
  }
  return out;
}

TEST(ChangeRate, Basics) {
  EXPECT_DOUBLE_EQ(change_rate(100, 150), 0.5);
  EXPECT_DOUBLE_EQ(change_rate(200, 100), -0.5);
  EXPECT_EQ(change_rate(0, 0), 0.0);
  EXPECT_EQ(change_rate(0, 7), kUnboundedIncrease);
  EXPECT_THROW(change_rate(-1, 3), ConfigError);
  EXPECT_THROW(change_rate(1, -3), ConfigError);
}

TEST(ChangeRate, PhpMyAdminTimeframeRates) {
  EXPECT_EQ(std::round(change_rate(46753, 66364) * 100) / 100, 0.42);
  EXPECT_EQ(std::round(change_rate(225, 1174) * 100) / 100, 4.22);
  EXPECT_EQ(std::round(change_rate(204496, 301748) * 100) / 100, 0.48);
}

TEST(DensitySeries, TwoVersions) {
  const auto h = history_with_counts({100, 130}, {50000, 52000});
  const auto s = density_series(h);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_DOUBLE_EQ(s[0].rho, 0.002);
  EXPECT_DOUBLE_EQ(s[1].rho, 0.0025);
  EXPECT_FALSE(s[0].delta_rho);
  EXPECT_FALSE(s[0].delta_cs);
  EXPECT_NEAR(*s[1].delta_rho, 0.25, 1e-12);
  EXPECT_NEAR(*s[1].delta_cs, 0.3, 1e-12);
  EXPECT_NEAR(*s[1].delta_lloc, 0.04, 1e-12);
}

TEST(DensitySeries, ExactRatiosHitThresholdsExactly) {
  const auto s = density_series(history_with_counts({10, 15, 30, 15, 15}, {1000, 1000, 1000, 1000, 2000}));
  EXPECT_EQ(*s[1].delta_rho, 0.5);
  EXPECT_EQ(*s[2].delta_rho, 1.0);
  EXPECT_EQ(*s[3].delta_rho, -0.5);
  EXPECT_EQ(*s[4].delta_rho, -0.5);
  const auto flags = flag_anomalies(s);
  ASSERT_EQ(flags.size(), 4u);
  EXPECT_EQ(flags[0].kind, AnomalyKind::increase_50);
  EXPECT_EQ(flags[1].kind, AnomalyKind::increase_100);
  EXPECT_EQ(flags[2].kind, AnomalyKind::decrease_50);
  EXPECT_EQ(flags[3].kind, AnomalyKind::decrease_50);
}

TEST(DensitySeries, ConstantSeriesHasZeroDeltas) {
  const auto s = density_series(history_with_counts({7, 7, 7, 7}, {900, 900, 900, 900}));
  for (std::size_t i = 1; i < s.size(); ++i) {
    EXPECT_EQ(*s[i].delta_cs, 0.0);
    EXPECT_EQ(*s[i].delta_lloc, 0.0);
    EXPECT_EQ(*s[i].delta_rho, 0.0);
  }
  EXPECT_TRUE(flag_anomalies(s).empty());
}

TEST(DensitySeriesProperty, RatioIdentity) {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<std::size_t> cs(0, 400);
  std::uniform_int_distribution<std::uint64_t> size(1, 200000);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::size_t> counts(50);
    std::vector<std::uint64_t> lloc(50);
    for (auto& c : counts) c = cs(rng);
    for (auto& l : lloc) l = size(rng);
    const auto s = density_series(history_with_counts(counts, lloc));
    for (std::size_t i = 1; i < s.size(); ++i) {
      EXPECT_EQ(*s[i].delta_cs, change_rate(counts[i - 1], counts[i]));
      if (!std::isfinite(*s[i].delta_rho) || !std::isfinite(*s[i].delta_cs)) continue;
      const double identity = (1 + *s[i].delta_cs) / (1 + *s[i].delta_lloc) - 1;
      EXPECT_NEAR(*s[i].delta_rho, identity, 1e-12 * std::max(1.0, std::abs(identity)));
    }
  }
}

TEST(DensitySeriesProperty, ScalingLlocAloneScalesRho) {
  const std::vector<std::size_t> counts = {10, 12, 30, 9, 0, 4};
  const std::vector<std::uint64_t> lloc = {1000, 1100, 1300, 1250, 1250, 1600};
  std::vector<std::uint64_t> scaled = lloc;
  for (auto& l : scaled) l *= 3;
  const auto a = density_series(history_with_counts(counts, lloc));
  const auto b = density_series(history_with_counts(counts, scaled));
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(b[i].rho, a[i].rho / 3, 1e-15);
    if (i == 0) continue;
    EXPECT_NEAR(*b[i].delta_lloc, *a[i].delta_lloc, 1e-12);
    if (std::isfinite(*a[i].delta_rho)) EXPECT_NEAR(*b[i].delta_rho, *a[i].delta_rho, 1e-12);
  }
}

TEST(FlagAnomalies, Classification) {
  const auto s = series_with_deltas({0.6, 1.2, -0.49, 0.5, 1.0, -0.5, 0.49, kUnboundedIncrease});
  const auto flags = flag_anomalies(s);
  ASSERT_EQ(flags.size(), 6u);
  EXPECT_EQ(flags[0].version_id, "v1");
  EXPECT_EQ(flags[0].kind, AnomalyKind::increase_50);
  EXPECT_EQ(flags[1].kind, AnomalyKind::increase_100);
  EXPECT_EQ(flags[2].version_id, "v4");
  EXPECT_EQ(flags[2].kind, AnomalyKind::increase_50);
  EXPECT_EQ(flags[3].kind, AnomalyKind::increase_100);
  EXPECT_EQ(flags[4].kind, AnomalyKind::decrease_50);
  EXPECT_EQ(flags[5].version_id, "v8");
  EXPECT_EQ(flags[5].kind, AnomalyKind::increase_100);
}

TEST(FlagAnomalies, ZeroToPositiveIsStrongestIncrease) {
  const auto s = density_series(history_with_counts({0, 5}, {100, 100}));
  const auto flags = flag_anomalies(s);
  ASSERT_EQ(flags.size(), 1u);
  EXPECT_EQ(flags[0].kind, AnomalyKind::increase_100);
}

TEST(FlagAnomalies, ThresholdValidation) {
  const auto s = series_with_deltas({0.1});
  EXPECT_THROW(flag_anomalies(s, {0.5, 0.4, -0.5}), ConfigError);
  EXPECT_THROW(flag_anomalies(s, {0.5, 1.0, 0.1}), ConfigError);
  EXPECT_THROW(flag_anomalies(s, {0.0, 1.0, -0.5}), ConfigError);
}

TEST(FlagAnomaliesProperty, MonotoneInThresholds) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> delta(-1.0, 2.5), up(0.05, 1.5), down(-0.95, -0.05);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> deltas(30);
    for (auto& d : deltas) d = delta(rng);
    const auto s = series_with_deltas(deltas);
    AnomalyThresholds base{up(rng), 0, down(rng)};
    base.up2 = base.up + 0.5;
    auto raised = base;
    raised.up += 0.2;
    raised.up2 = std::max(raised.up2, raised.up);
    auto lowered = base;
    lowered.down -= 0.2;

    auto count = [&](const AnomalyThresholds& t, bool increases) {
      int n = 0;
      for (const auto& f : flag_anomalies(s, t)) n += (f.kind != AnomalyKind::decrease_50) == increases;
      return n;
    };
    EXPECT_LE(count(raised, true), count(base, true));
    EXPECT_LE(count(lowered, false), count(base, false));

    std::vector<double> quiet(30);
    std::uniform_real_distribution<double> small(-0.999 * std::min(-base.down, base.up),
                                                 0.999 * std::min(-base.down, base.up));
    for (auto& d : quiet) d = small(rng);
    EXPECT_TRUE(flag_anomalies(series_with_deltas(quiet), base).empty());
  }
}

TEST(MetricChangeRates, EndpointsAroundSplit) {
  auto h = history_with_counts({1, 1, 1, 1}, {46000, 46753, 60000, 66364});
  h.snapshots[1].size.loc = 204496;
  h.snapshots[1].size.classes = 225;
  h.snapshots[3].size.loc = 301748;
  h.snapshots[3].size.classes = 1174;
  // 90-day span, split at day 45: last snapshot at or before it is r1.
  const auto rates = metric_change_rates(h, testing::days_after(testing::day(2012, 1, 1), 45));
  EXPECT_EQ(rates.start_version, "r1");
  EXPECT_EQ(rates.end_version, "r3");
  EXPECT_EQ(std::round(*rates.d_lloc * 100) / 100, 0.42);
  EXPECT_EQ(std::round(*rates.d_classes * 100) / 100, 4.22);
  EXPECT_EQ(std::round(*rates.d_loc * 100) / 100, 0.48);
}

TEST(MetricChangeRates, MissingMetricsAreUnavailable) {
  const auto h = history_with_counts({1, 1}, {100, 100});
  const auto rates = metric_change_rates(h, h.snapshots.back().timestamp);
  EXPECT_FALSE(rates.d_loc);
  EXPECT_FALSE(rates.d_classes);
  EXPECT_EQ(*rates.d_lloc, 0.0);
  EXPECT_THROW(metric_change_rates(h, testing::day(2000, 1, 1)), Error);
}

}  // namespace
}  // namespace smellsurv
