#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "smellsurv/ingestion.hpp"
#include "smellsurv/smell_rules.hpp"
#include "smellsurv/timestamp.hpp"

namespace smellsurv {

/// Identity of a smell instance across versions. Line numbers are not part of
/// the key; `ordinal` separates same-rule occurrences that share file and
/// entity path within one version.
struct InstanceKey {
  RuleId rule = RuleId::ExcessiveMethodLength;
  std::string file;
  std::string entity_path;
  std::uint32_t ordinal = 0;

  friend auto operator<=>(const InstanceKey&, const InstanceKey&) = default;
  friend bool operator==(const InstanceKey&, const InstanceKey&) = default;
};

/// `file|entity_path|ordinal`; the rule has its own column in exports.
std::string to_string(const InstanceKey& key);

/// Lifetime of one smell instance. `censored` keeps the convention of the
/// source data: 1 means the smell was removed (end_date set), 0 means it is
/// still present in the final snapshot.
struct SurvivalRecord {
  InstanceKey key;
  Scope scope = Scope::localized;
  std::string first_version;
  Timestamp first_date;
  std::string last_present_version;
  std::optional<Timestamp> end_date;
  int censored = 0;
  double duration_days = 0;
  int timeframe = 1;

  bool event_observed() const { return censored == 1; }

  friend bool operator==(const SurvivalRecord&, const SurvivalRecord&) = default;
};

struct TrackingOptions {
  /// Absences of up to this many consecutive versions do not end an instance.
  std::uint32_t gap_tolerance = 0;
  /// Pair removals with additions of the same rule and entity path in a
  /// different file, treating them as one renamed instance.
  bool rename_heuristic = false;
};

/// Keys for the occurrences of one version, aligned with the input. Ordinals
/// count up by ascending begin_line (input order breaks ties) within each
/// (rule, file, entity_path) group.
std::vector<InstanceKey> make_keys(std::span<const SmellOccurrence> occurrences);

/// Greedy rename pairing for one version transition. Returns (removed, added)
/// pairs. Additions are visited in key order and each takes the smallest
/// unmatched removed key with the same rule and non-empty entity path but a
/// different file.
std::vector<std::pair<InstanceKey, InstanceKey>> apply_rename_heuristic(
    std::span<const InstanceKey> removed_keys, std::span<const InstanceKey> added_keys);

/// Midpoint of the observation period, truncated to whole seconds.
Timestamp split_instant(const History& history);

/// One record per maximal run of presence of each key. Ordered by first
/// version, then key. Throws Error when the history has fewer than two
/// snapshots.
std::vector<SurvivalRecord> build_survival_records(const History& history,
                                                   const TrackingOptions& options = {});

struct TimeframeViews {
  std::vector<SurvivalRecord> first;   ///< Born before the split, truncated at it.
  std::vector<SurvivalRecord> second;  ///< Born at or after the split, unchanged.
};

/// Splits records at split_instant(history). Records in the first view whose
/// removal falls after the split (or never happens) become censored=0 with
/// duration measured up to the split.
TimeframeViews assign_timeframes(std::span<const SurvivalRecord> records, const History& history);

}  // namespace smellsurv
