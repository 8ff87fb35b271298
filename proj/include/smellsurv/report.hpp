#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smellsurv/anomaly.hpp"
#include "smellsurv/ingestion.hpp"
#include "smellsurv/survival_stats.hpp"
#include "smellsurv/tracking.hpp"

namespace smellsurv::report {

/// Six significant digits, "NA" for nullopt, "inf" for +infinity.
std::string format_prob(std::optional<double> value);
/// Two decimals, "NA" for nullopt.
std::string format_days(std::optional<double> value);

std::string records_csv(std::string_view app, std::span<const SurvivalRecord> records);

/// One row per record: the data behind lifeline plots.
std::string lifelines_csv(std::span<const SurvivalRecord> records);

/// Occurrence counts per version and rule, plus the total.
std::string counts_csv(const History& history);

std::string curve_csv(const SurvivalCurve& curve);

/// Curves of a comparison stacked with a leading `group` column.
std::string comparison_curves_csv(const GroupComparison& cmp);

/// `{"statistic":..,"p_value":..[,"warning":..]}` on one line.
std::string test_json(const LogRankResult& test);
/// Same shape with null values, for comparisons that could not be run.
std::string test_unavailable_json(std::string_view reason);

struct SummaryRow {
  std::string partition;
  std::string group;
  std::optional<GroupSummary> summary;  ///< nullopt renders a "no data" row.
};

std::string summary_csv(std::span<const SummaryRow> rows);

std::string density_csv(std::span<const DensityPoint> series);

std::string anomaly_json(std::string_view app, std::span<const DensityPoint> series,
                         std::span<const AnomalyFlag> flags, const AnomalyThresholds& thresholds);

std::string change_rates_json(std::string_view app, const ChangeRates& rates);

std::string occurrences_json(std::string_view version_id,
                             std::span<const SmellOccurrence> occurrences);

struct NamedCurve {
  std::string name;
  const SurvivalCurve* curve;
};

/// Step plot of one or more survival curves.
std::string km_svg(std::string_view title, std::span<const NamedCurve> curves);

/// Horizontal segment per record from first appearance to removal (or the
/// end of observation).
std::string lifelines_svg(std::string_view title, std::span<const SurvivalRecord> records,
                          const History& history);

/// Density change per version with the threshold guide lines.
std::string delta_rho_svg(std::string_view title, std::span<const DensityPoint> series,
                          std::span<const AnomalyFlag> flags, const AnomalyThresholds& thresholds);

/// Writes to a sibling temporary file, then renames it over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace smellsurv::report
