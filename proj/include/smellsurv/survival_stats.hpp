#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smellsurv/tracking.hpp"

namespace smellsurv {

/// A (time, event) pair. `event` is true when removal was observed.
struct Observation {
  double time = 0;
  bool event = false;
};

std::vector<Observation> observations_of(std::span<const SurvivalRecord> records);

struct CurvePoint {
  double time_days = 0;
  int n_at_risk = 0;
  int n_events = 0;
  double survival = 1;
};

/// Kaplan-Meier step function. Holds one point per distinct observed time
/// (event or censoring); S(t) is the survival of the last point with
/// time <= t, or 1 before the first point.
struct SurvivalCurve {
  std::vector<CurvePoint> points;
  double tau = 0;  ///< Largest observed time.

  double survival_at(double t) const;
};

/// Product-limit estimate. At tied times, events are counted before
/// censorings, so subjects censored at t are still at risk at t.
/// Throws StatsError("no records") on empty input.
SurvivalCurve kaplan_meier(std::span<const Observation> observations);

/// Smallest event time with S(t) <= 0.5; nullopt when never reached.
std::optional<double> median_survival(const SurvivalCurve& curve);

struct RestrictedMean {
  double rmean = 0;
  double se = 0;
};

/// Area under S on [0, tau] and its standard error from the usual RMST
/// variance sum. Throws StatsError for tau <= 0 or tau > curve.tau.
RestrictedMean restricted_mean(const SurvivalCurve& curve, std::optional<double> tau = {});

struct LogRankResult {
  double statistic = 0;
  double p_value = 1;
  std::array<int, 2> observed{};
  std::array<double, 2> expected{};
  double variance = 0;
  std::optional<std::string> warning;
};

/// Two-sample log-rank test with the hypergeometric variance and a
/// chi-square(1) p-value. Throws StatsError when either group is empty or
/// the pooled data has no events.
LogRankResult log_rank(std::span<const Observation> group_a, std::span<const Observation> group_b);

struct GroupSummary {
  int found = 0;
  int removed = 0;
  double pct_removed = 0;
  std::optional<double> median_days;
  double rmean_days = 0;
  double se_rmean = 0;
};

GroupSummary summarize(std::span<const Observation> observations);
GroupSummary summarize(std::span<const SurvivalRecord> records);

enum class Partition { scope, timeframe };

struct GroupComparison {
  std::array<std::string, 2> group_names;
  std::array<GroupSummary, 2> summaries;
  std::array<SurvivalCurve, 2> curves;
  LogRankResult test;
};

/// Splits records into two groups and compares them. Scope groups are
/// localized / scattered; timeframe groups are "1" / "2" taken from
/// assign_timeframes(records, history), so group 1 is truncated at the split.
/// An empty group raises StatsError naming it. A group without events adds a
/// warning to the test result.
GroupComparison compare_groups(std::span<const SurvivalRecord> records, Partition partition,
                               const History& history);

/// Same as compare_groups over explicit observation groups.
GroupComparison compare_observations(const std::array<std::string, 2>& names,
                                     std::span<const Observation> group_a,
                                     std::span<const Observation> group_b);

}  // namespace smellsurv
