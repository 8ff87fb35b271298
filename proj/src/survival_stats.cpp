#include "smellsurv/survival_stats.hpp"

#include <algorithm>
#include <cmath>

#include "smellsurv/error.hpp"

namespace smellsurv {

namespace {

// Product-limit values that should equal 0.5 exactly can land a few ulps
// above it.
constexpr double kMedianSlack = 1e-12;

std::vector<Observation> sorted_by_time(std::span<const Observation> obs) {
  std::vector<Observation> v(obs.begin(), obs.end());
  std::stable_sort(v.begin(), v.end(),
                   [](const Observation& a, const Observation& b) { return a.time < b.time; });
  return v;
}

int count_events(std::span<const Observation> obs) {
  return static_cast<int>(std::count_if(obs.begin(), obs.end(), [](auto& o) { return o.event; }));
}

}  // namespace

std::vector<Observation> observations_of(std::span<const SurvivalRecord> records) {
  std::vector<Observation> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back({r.duration_days, r.event_observed()});
  return out;
}

double SurvivalCurve::survival_at(double t) const {
  double s = 1.0;
  for (const auto& p : points) {
    if (p.time_days > t) break;
    s = p.survival;
  }
  return s;
}

SurvivalCurve kaplan_meier(std::span<const Observation> observations) {
  if (observations.empty()) throw StatsError("no records");
  for (const auto& o : observations) {
    if (!(o.time >= 0) || !std::isfinite(o.time)) {
      throw StatsError("durations must be finite and non-negative");
    }
  }
  const auto obs = sorted_by_time(observations);

  SurvivalCurve curve;
  int at_risk = static_cast<int>(obs.size());
  double survival = 1.0;
  for (std::size_t i = 0; i < obs.size();) {
    const double t = obs[i].time;
    int events = 0, censored = 0;
    for (; i < obs.size() && obs[i].time == t; ++i) {
      (obs[i].event ? events : censored) += 1;
    }
    if (events > 0) {
      survival *= 1.0 - static_cast<double>(events) / static_cast<double>(at_risk);
    }
    curve.points.push_back({t, at_risk, events, survival});
    at_risk -= events + censored;
  }
  curve.tau = obs.back().time;
  return curve;
}

std::optional<double> median_survival(const SurvivalCurve& curve) {
  for (const auto& p : curve.points) {
    if (p.n_events > 0 && p.survival <= 0.5 + kMedianSlack) return p.time_days;
  }
  return std::nullopt;
}

RestrictedMean restricted_mean(const SurvivalCurve& curve, std::optional<double> tau_opt) {
  const double tau = tau_opt.value_or(curve.tau);
  if (!(tau > 0)) throw StatsError("restricted mean horizon must be positive");
  if (tau > curve.tau) throw StatsError("restricted mean horizon exceeds the largest observed time");

  // Area of each step segment between consecutive points (and up to tau).
  const auto& pts = curve.points;
  std::vector<double> area_after(pts.size() + 1, 0.0);
  // area_after[i] = integral of S from pts[i].time to tau.
  for (std::size_t i = pts.size(); i-- > 0;) {
    if (pts[i].time_days > tau) continue;
    const double next = (i + 1 < pts.size() && pts[i + 1].time_days <= tau) ? pts[i + 1].time_days : tau;
    area_after[i] = pts[i].survival * (next - pts[i].time_days) + area_after[i + 1];
  }

  RestrictedMean out;
  const double first_time = pts.empty() ? tau : std::min(pts.front().time_days, tau);
  out.rmean = first_time + (pts.empty() ? 0.0 : area_after[0]);

  double variance = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    if (p.time_days > tau) break;
    if (p.n_events == 0 || p.n_at_risk <= p.n_events) continue;
    const double a = area_after[i];
    variance += a * a * p.n_events /
                (static_cast<double>(p.n_at_risk) * static_cast<double>(p.n_at_risk - p.n_events));
  }
  out.se = std::sqrt(variance);
  return out;
}

LogRankResult log_rank(std::span<const Observation> group_a, std::span<const Observation> group_b) {
  if (group_a.empty() || group_b.empty()) throw StatsError("log-rank test needs two non-empty groups");

  struct Tagged {
    double time;
    bool event;
    bool in_a;
  };
  std::vector<Tagged> pooled;
  pooled.reserve(group_a.size() + group_b.size());
  for (const auto& o : group_a) pooled.push_back({o.time, o.event, true});
  for (const auto& o : group_b) pooled.push_back({o.time, o.event, false});
  std::stable_sort(pooled.begin(), pooled.end(),
                   [](const Tagged& x, const Tagged& y) { return x.time < y.time; });

  LogRankResult res;
  double n = static_cast<double>(pooled.size());
  double n_a = static_cast<double>(group_a.size());
  double o_minus_e = 0;
  for (std::size_t i = 0; i < pooled.size();) {
    const double t = pooled[i].time;
    int d = 0, d_a = 0, removed = 0, removed_a = 0;
    for (; i < pooled.size() && pooled[i].time == t; ++i) {
      ++removed;
      if (pooled[i].in_a) ++removed_a;
      if (pooled[i].event) {
        ++d;
        if (pooled[i].in_a) ++d_a;
      }
    }
    if (d > 0) {
      const double e_a = n_a * d / n;
      res.observed[0] += d_a;
      res.observed[1] += d - d_a;
      res.expected[0] += e_a;
      res.expected[1] += (n - n_a) * d / n;
      o_minus_e += d_a - e_a;
      if (n > 1) {
        const double frac = n_a / n;
        res.variance += d * frac * (1.0 - frac) * (n - d) / (n - 1.0);
      }
    }
    n -= removed;
    n_a -= removed_a;
  }

  if (res.observed[0] + res.observed[1] == 0) throw StatsError("test undefined: no events in pooled data");

  res.statistic = res.variance > 0 ? o_minus_e * o_minus_e / res.variance : 0.0;
  res.p_value = std::clamp(std::erfc(std::sqrt(res.statistic / 2.0)), 0.0, 1.0);
  if (res.observed[0] == 0 || res.observed[1] == 0) {
    res.warning = std::string("group ") + (res.observed[0] == 0 ? "A" : "B") +
                  " has no events; the test may be unreliable";
  }
  return res;
}

GroupSummary summarize(std::span<const Observation> observations) {
  if (observations.empty()) throw StatsError("no records");
  GroupSummary s;
  s.found = static_cast<int>(observations.size());
  s.removed = count_events(observations);
  s.pct_removed = static_cast<double>(s.removed) / s.found;
  const auto curve = kaplan_meier(observations);
  s.median_days = median_survival(curve);
  if (curve.tau > 0) {
    const auto rm = restricted_mean(curve);
    s.rmean_days = rm.rmean;
    s.se_rmean = rm.se;
  }
  return s;
}

GroupSummary summarize(std::span<const SurvivalRecord> records) {
  return summarize(observations_of(records));
}

GroupComparison compare_observations(const std::array<std::string, 2>& names,
                                     std::span<const Observation> group_a,
                                     std::span<const Observation> group_b) {
  const std::array<std::span<const Observation>, 2> groups = {group_a, group_b};
  for (std::size_t g = 0; g < 2; ++g) {
    if (groups[g].empty()) throw StatsError("group '" + names[g] + "' is empty");
  }

  GroupComparison cmp;
  cmp.group_names = names;
  for (std::size_t g = 0; g < 2; ++g) {
    cmp.summaries[g] = summarize(groups[g]);
    cmp.curves[g] = kaplan_meier(groups[g]);
  }
  cmp.test = log_rank(group_a, group_b);
  cmp.test.warning.reset();
  std::string warning;
  for (std::size_t g = 0; g < 2; ++g) {
    if (cmp.test.observed[g] == 0) {
      if (!warning.empty()) warning += "; ";
      warning += "group '" + names[g] + "' has no events; the test may be unreliable";
    }
  }
  if (!warning.empty()) cmp.test.warning = warning;
  return cmp;
}

GroupComparison compare_groups(std::span<const SurvivalRecord> records, Partition partition,
                               const History& history) {
  if (partition == Partition::scope) {
    std::vector<Observation> localized, scattered;
    for (const auto& r : records) {
      (r.scope == Scope::localized ? localized : scattered)
          .push_back({r.duration_days, r.event_observed()});
    }
    return compare_observations({"localized", "scattered"}, localized, scattered);
  }
  const auto views = assign_timeframes(records, history);
  return compare_observations({"1", "2"}, observations_of(views.first),
                              observations_of(views.second));
}

}  // namespace smellsurv
