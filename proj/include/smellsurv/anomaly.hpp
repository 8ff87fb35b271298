#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smellsurv/ingestion.hpp"

namespace smellsurv {

/// Returned by change_rate when the previous value is 0 and the current one
/// is positive.
inline constexpr double kUnboundedIncrease = std::numeric_limits<double>::infinity();

/// Relative change cur/prev - 1. A zero previous value maps to 0 when cur is
/// also 0 and to kUnboundedIncrease otherwise. Negative inputs raise
/// ConfigError.
double change_rate(double prev, double cur);

/// Smell count, size and density of one version plus the relative changes
/// from the previous version (absent for the first version).
struct DensityPoint {
  std::string version_id;
  Timestamp timestamp;
  std::uint64_t cs_count = 0;
  std::uint64_t lloc = 1;
  double rho = 0;
  std::optional<double> delta_cs;
  std::optional<double> delta_lloc;
  std::optional<double> delta_rho;
};

std::vector<DensityPoint> density_series(const History& history);

enum class AnomalyKind { increase_50, increase_100, decrease_50 };

std::string_view to_string(AnomalyKind kind);

struct AnomalyFlag {
  std::string version_id;
  AnomalyKind kind = AnomalyKind::increase_50;
  double delta_rho = 0;
};

/// Defaults flag a 50% rise, a doubling and a halving of smell density.
/// Increases use >=, decreases use <=.
struct AnomalyThresholds {
  double up = 0.5;
  double up2 = 1.0;
  double down = -0.5;

  /// Throws ConfigError unless down < 0 < up <= up2.
  void validate() const;
};

std::vector<AnomalyFlag> flag_anomalies(std::span<const DensityPoint> series,
                                        const AnomalyThresholds& thresholds = {});

/// Relative changes between the last snapshot at or before the split and
/// the last snapshot. A metric missing from either endpoint is nullopt.
struct ChangeRates {
  std::string start_version;
  std::string end_version;
  std::optional<double> d_loc;
  std::optional<double> d_lloc;
  std::optional<double> d_classes;
};

/// Throws Error when no snapshot lies at or before `split`.
ChangeRates metric_change_rates(const History& history, Timestamp split);

}  // namespace smellsurv
