#include "smellsurv/anomaly.hpp"

#include <cmath>

#include "smellsurv/error.hpp"

namespace smellsurv {

double change_rate(double prev, double cur) {
  if (prev < 0 || cur < 0 || std::isnan(prev) || std::isnan(cur)) {
    throw ConfigError("change rate needs non-negative inputs");
  }
  if (prev == 0) return cur == 0 ? 0.0 : kUnboundedIncrease;
  return cur / prev - 1.0;
}

std::vector<DensityPoint> density_series(const History& history) {
  std::vector<DensityPoint> out;
  out.reserve(history.snapshots.size());
  for (const auto& snap : history.snapshots) {
    DensityPoint p;
    p.version_id = snap.version_id;
    p.timestamp = snap.timestamp;
    p.cs_count = snap.occurrences.size();
    p.lloc = snap.size.lloc;
    p.rho = static_cast<double>(p.cs_count) / static_cast<double>(p.lloc);
    if (!out.empty()) {
      const auto& prev = out.back();
      p.delta_cs = change_rate(static_cast<double>(prev.cs_count), static_cast<double>(p.cs_count));
      p.delta_lloc = change_rate(static_cast<double>(prev.lloc), static_cast<double>(p.lloc));
      if (prev.cs_count == 0) {
        p.delta_rho = change_rate(0.0, p.rho);
      } else {
        // Cross-multiplied integers keep exact ratios such as 15/10 exact.
        const auto num = static_cast<unsigned __int128>(p.cs_count) * prev.lloc;
        const auto den = static_cast<unsigned __int128>(prev.cs_count) * p.lloc;
        p.delta_rho = static_cast<double>(num) / static_cast<double>(den) - 1.0;
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::string_view to_string(AnomalyKind kind) {
  switch (kind) {
    case AnomalyKind::increase_50: return "increase_50";
    case AnomalyKind::increase_100: return "increase_100";
    case AnomalyKind::decrease_50: return "decrease_50";
  }
  return "";
}

void AnomalyThresholds::validate() const {
  if (!(down < 0 && 0 < up && up <= up2)) {
    throw ConfigError("anomaly thresholds must satisfy down < 0 < up <= up2");
  }
}

std::vector<AnomalyFlag> flag_anomalies(std::span<const DensityPoint> series,
                                        const AnomalyThresholds& thresholds) {
  thresholds.validate();
  std::vector<AnomalyFlag> flags;
  for (std::size_t i = 1; i < series.size(); ++i) {
    const auto& p = series[i];
    if (!p.delta_rho) continue;
    const double d = *p.delta_rho;
    if (d >= thresholds.up2) {
      flags.push_back({p.version_id, AnomalyKind::increase_100, d});
    } else if (d >= thresholds.up) {
      flags.push_back({p.version_id, AnomalyKind::increase_50, d});
    } else if (d <= thresholds.down) {
      flags.push_back({p.version_id, AnomalyKind::decrease_50, d});
    }
  }
  return flags;
}

ChangeRates metric_change_rates(const History& history, Timestamp split) {
  const VersionSnapshot* start = nullptr;
  for (const auto& snap : history.snapshots) {
    if (snap.timestamp <= split) start = &snap;
  }
  if (!start) throw Error("no version of '" + history.app_name + "' at or before the split");
  const auto& end = history.snapshots.back();

  auto rate = [](const std::optional<std::uint64_t>& a,
                 const std::optional<std::uint64_t>& b) -> std::optional<double> {
    if (!a || !b) return std::nullopt;
    return change_rate(static_cast<double>(*a), static_cast<double>(*b));
  };

  ChangeRates out;
  out.start_version = start->version_id;
  out.end_version = end.version_id;
  out.d_loc = rate(start->size.loc, end.size.loc);
  out.d_lloc = change_rate(static_cast<double>(start->size.lloc), static_cast<double>(end.size.lloc));
  out.d_classes = rate(start->size.classes, end.size.classes);
  return out;
}

}  // namespace smellsurv
