#pragma once

#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "smellsurv/anomaly.hpp"
#include "smellsurv/ingestion.hpp"
#include "smellsurv/tracking.hpp"

namespace smellsurv::cli {

enum ExitCode : int {
  kOk = 0,
  kGateFailed = 1,
  kError = 2,
  kInsufficientHistory = 3,
};

enum class Format { csv, json, svg };

struct RunConfig {
  std::filesystem::path manifest;
  std::filesystem::path code_model;
  std::string version_id;
  std::filesystem::path out_dir;
  std::set<Format> formats = {Format::csv, Format::json};
  IngestOptions ingest;
  TrackingOptions tracking;
  AnomalyThresholds thresholds;
  bool gate = false;
};

/// Runs every analysis for every app in the manifest and writes the bundle
/// under `config.out_dir/<app>/` plus `pooled_summary.csv`. Returns
/// kGateFailed when `config.gate` is set and any increase flag was raised.
int run_analyze(const RunConfig& config, std::ostream& out);

/// Checks the latest version transition of each app against the increase
/// thresholds.
int run_gate(const RunConfig& config, std::ostream& out);

/// Evaluates the rules on one code model. Writes the occurrences document to
/// `out_dir/occurrences.json` when out_dir is set, else to `out`.
int run_detect(const RunConfig& config, std::ostream& out);

/// Full command line entry point: parses arguments, dispatches and turns
/// exceptions into a one-line JSON error record on `err`.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace smellsurv::cli
