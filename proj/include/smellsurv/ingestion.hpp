#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "smellsurv/smell_rules.hpp"
#include "smellsurv/timestamp.hpp"

namespace smellsurv {

struct SizeMetrics {
  std::uint64_t lloc = 1;  ///< Smell-density denominator, always >= 1.
  std::optional<std::uint64_t> loc;
  std::optional<std::uint64_t> classes;

  friend bool operator==(const SizeMetrics&, const SizeMetrics&) = default;
};

struct VersionSnapshot {
  std::string version_id;
  Timestamp timestamp;
  std::vector<SmellOccurrence> occurrences;
  SizeMetrics size;
  /// Manifest columns beyond the known ones, carried through untouched.
  std::map<std::string, std::string> extra;

  friend bool operator==(const VersionSnapshot&, const VersionSnapshot&) = default;
};

/// One application's version timeline, snapshots in strictly increasing
/// timestamp order with unique version ids. Build through make_history().
struct History {
  std::string app_name;
  std::vector<VersionSnapshot> snapshots;

  friend bool operator==(const History&, const History&) = default;
};

/// Sorts snapshots by timestamp and validates the History invariants.
/// Throws ManifestError on duplicate ids, equal timestamps, lloc == 0 or
/// occurrences whose version_id does not match their snapshot.
History make_history(std::string app_name, std::vector<VersionSnapshot> snapshots);

struct IngestOptions {
  /// Removed from the front of every reported path (after separators are
  /// unified to '/').
  std::string strip_prefix;
  /// Occurrences whose normalized path starts with any of these are dropped.
  std::vector<std::string> exclude_prefixes;
  Ruleset rules = Ruleset::defaults();
};

/// Unifies separators to '/', strips `strip_prefix` and a leading "./" or '/'.
std::string normalize_path(std::string_view path, std::string_view strip_prefix);

struct PmdReport {
  std::vector<SmellOccurrence> occurrences;  ///< Sorted by (file, begin_line, rule, entity_path).
  std::size_t skipped_rules = 0;  ///< Violations of rules outside the six.
  std::size_t excluded = 0;       ///< Violations dropped by exclude_prefixes.
};

/// Parses a PMD/PHPMD XML report. Whitespace-only input yields an empty
/// report. Malformed XML raises ParseError carrying the byte offset.
PmdReport parse_pmd_report(std::string_view document, const std::string& version_id,
                           const IngestOptions& options = {});

/// Loads every application in a manifest
/// (`app,version,timestamp,report_path,lloc[,loc,classes]`). Relative report
/// paths resolve against `base_dir`. `.json` reports are code models run
/// through evaluate_rules; anything else is parsed as PMD XML. Returns one
/// History per app, ordered by app name. Errors are ManifestError with the
/// row number.
std::vector<History> load_manifest(std::string_view table, const std::filesystem::path& base_dir,
                                   const IngestOptions& options = {});

std::vector<History> load_manifest_file(const std::filesystem::path& path,
                                        const IngestOptions& options = {});

/// Lossless JSON form of a History.
std::string history_to_json(const History& history);
History history_from_json(std::string_view json_text);

std::string read_file(const std::filesystem::path& path);

}  // namespace smellsurv
