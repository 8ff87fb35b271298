#include "smellsurv/cli.hpp"

#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "smellsurv/error.hpp"
#include "smellsurv/report.hpp"
#include "smellsurv/survival_stats.hpp"

namespace smellsurv::cli {

namespace {

std::string safe_dir_name(std::string_view app) {
  std::string out;
  for (char c : app) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '.' || c == '-' || c == '_';
    out.push_back(ok ? c : '_');
  }
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out;
}

std::vector<report::SummaryRow> group_rows(std::string partition,
                                           const std::array<std::string, 2>& names,
                                           const std::array<std::vector<Observation>, 2>& groups) {
  std::vector<report::SummaryRow> rows;
  for (std::size_t g = 0; g < 2; ++g) {
    report::SummaryRow row{partition, names[g], std::nullopt};
    if (!groups[g].empty()) row.summary = summarize(groups[g]);
    rows.push_back(std::move(row));
  }
  return rows;
}

struct Comparison {
  std::vector<report::SummaryRow> rows;
  std::optional<GroupComparison> result;
  std::string test_json;
};

Comparison compare(std::string partition, const std::array<std::string, 2>& names,
                   const std::array<std::vector<Observation>, 2>& groups) {
  Comparison c;
  c.rows = group_rows(partition, names, groups);
  try {
    c.result = compare_observations(names, groups[0], groups[1]);
    c.test_json = report::test_json(c.result->test);
  } catch (const StatsError& e) {
    c.test_json = report::test_unavailable_json(e.what());
  }
  return c;
}

nlohmann::ordered_json summary_rows_json(std::span<const report::SummaryRow> rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    j["partition"] = r.partition;
    j["group"] = r.group;
    if (!r.summary) {
      j["note"] = "no data";
    } else {
      j["found"] = r.summary->found;
      j["removed"] = r.summary->removed;
      j["pct_removed"] = std::stod(report::format_prob(r.summary->pct_removed));
      j["median_days"] = r.summary->median_days
                             ? nlohmann::ordered_json(std::stod(report::format_days(r.summary->median_days)))
                             : nlohmann::ordered_json("NA");
      j["rmean_days"] = std::stod(report::format_days(r.summary->rmean_days));
      j["se_rmean"] = std::stod(report::format_days(r.summary->se_rmean));
    }
    arr.push_back(std::move(j));
  }
  return arr;
}

struct AppResult {
  std::vector<SurvivalRecord> records;
  bool any_increase = false;
};

AppResult analyze_app(const History& history, const RunConfig& config) {
  const bool csv = config.formats.contains(Format::csv);
  const bool json = config.formats.contains(Format::json);
  const bool svg = config.formats.contains(Format::svg);

  const auto dir = config.out_dir / safe_dir_name(history.app_name);
  std::filesystem::create_directories(dir);
  auto put = [&](const char* name, const std::string& content) {
    report::write_atomic(dir / name, content);
  };

  AppResult result;
  result.records = build_survival_records(history, config.tracking);
  const auto& records = result.records;

  std::array<std::vector<Observation>, 2> by_scope;
  for (const auto& r : records) {
    by_scope[r.scope == Scope::localized ? 0 : 1].push_back({r.duration_days, r.event_observed()});
  }
  const auto views = assign_timeframes(records, history);
  const std::array<std::vector<Observation>, 2> by_timeframe = {observations_of(views.first),
                                                                observations_of(views.second)};

  const auto scope_cmp = compare("scope", {"localized", "scattered"}, by_scope);
  const auto timeframe_cmp = compare("timeframe", {"1", "2"}, by_timeframe);

  std::vector<report::SummaryRow> rows;
  const auto all_obs = observations_of(records);
  rows.push_back({"all", "all", all_obs.empty() ? std::nullopt : std::optional(summarize(all_obs))});
  rows.insert(rows.end(), scope_cmp.rows.begin(), scope_cmp.rows.end());
  rows.insert(rows.end(), timeframe_cmp.rows.begin(), timeframe_cmp.rows.end());

  const auto series = density_series(history);
  const auto flags = flag_anomalies(series, config.thresholds);
  for (const auto& f : flags) {
    if (f.kind != AnomalyKind::decrease_50) result.any_increase = true;
  }
  const auto rates = metric_change_rates(history, split_instant(history));

  std::optional<SurvivalCurve> all_curve;
  if (!all_obs.empty()) all_curve = kaplan_meier(all_obs);

  if (csv) {
    put("records.csv", report::records_csv(history.app_name, records));
    put("lifelines.csv", report::lifelines_csv(records));
    put("counts.csv", report::counts_csv(history));
    put("summary.csv", report::summary_csv(rows));
    put("density.csv", report::density_csv(series));
    if (all_curve) put("km_all.csv", report::curve_csv(*all_curve));
    if (scope_cmp.result) put("km_scope.csv", report::comparison_curves_csv(*scope_cmp.result));
    if (timeframe_cmp.result) {
      put("km_timeframe.csv", report::comparison_curves_csv(*timeframe_cmp.result));
    }
  }
  if (json) {
    put("logrank_scope.json", scope_cmp.test_json);
    put("logrank_timeframe.json", timeframe_cmp.test_json);
    put("anomalies.json", report::anomaly_json(history.app_name, series, flags, config.thresholds));
    put("change_rates.json", report::change_rates_json(history.app_name, rates));
    nlohmann::ordered_json summary;
    summary["app"] = history.app_name;
    summary["split"] = format_timestamp(split_instant(history));
    summary["groups"] = summary_rows_json(rows);
    summary["logrank_scope"] = nlohmann::ordered_json::parse(scope_cmp.test_json);
    summary["logrank_timeframe"] = nlohmann::ordered_json::parse(timeframe_cmp.test_json);
    put("summary.json", summary.dump(2) + "\n");
  }
  if (svg) {
    std::vector<report::NamedCurve> curves;
    if (scope_cmp.result) {
      for (std::size_t g = 0; g < 2; ++g) {
        curves.push_back({scope_cmp.result->group_names[g], &scope_cmp.result->curves[g]});
      }
    } else if (all_curve) {
      curves.push_back({"all", &*all_curve});
    }
    put("km_scope.svg", report::km_svg(history.app_name + ": survival by scope", curves));
    curves.clear();
    if (timeframe_cmp.result) {
      for (std::size_t g = 0; g < 2; ++g) {
        curves.push_back({"timeframe " + timeframe_cmp.result->group_names[g],
                          &timeframe_cmp.result->curves[g]});
      }
    }
    put("km_timeframe.svg", report::km_svg(history.app_name + ": survival by timeframe", curves));
    put("lifelines.svg", report::lifelines_svg(history.app_name + ": smell lifelines", records, history));
    put("delta_rho.svg", report::delta_rho_svg(history.app_name + ": smell density change", series,
                                               flags, config.thresholds));
  }
  return result;
}

void write_pooled(const RunConfig& config, const std::vector<std::string>& apps,
                  const std::vector<AppResult>& results) {
  std::vector<Observation> all;
  std::array<std::vector<Observation>, 2> by_scope;
  std::vector<report::SummaryRow> rows;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto obs = observations_of(results[i].records);
    all.insert(all.end(), obs.begin(), obs.end());
    for (const auto& r : results[i].records) {
      by_scope[r.scope == Scope::localized ? 0 : 1].push_back({r.duration_days, r.event_observed()});
    }
  }
  rows.push_back({"all", "all", all.empty() ? std::nullopt : std::optional(summarize(all))});
  const auto scope_rows = group_rows("scope", {"localized", "scattered"}, by_scope);
  rows.insert(rows.end(), scope_rows.begin(), scope_rows.end());
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto obs = observations_of(results[i].records);
    rows.push_back({"app", apps[i], obs.empty() ? std::nullopt : std::optional(summarize(obs))});
  }

  if (config.formats.contains(Format::csv)) {
    report::write_atomic(config.out_dir / "pooled_summary.csv", report::summary_csv(rows));
  }
  if (config.formats.contains(Format::json)) {
    nlohmann::ordered_json j;
    j["groups"] = summary_rows_json(rows);
    const auto cmp = compare("scope", {"localized", "scattered"}, by_scope);
    j["logrank_scope"] = nlohmann::ordered_json::parse(cmp.test_json);
    report::write_atomic(config.out_dir / "pooled_summary.json", j.dump(2) + "\n");
  }
}

std::set<Format> parse_formats(const std::string& text) {
  std::set<Format> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "csv") out.insert(Format::csv);
    else if (item == "json") out.insert(Format::json);
    else if (item == "svg") out.insert(Format::svg);
    else throw ConfigError("unknown output format '" + item + "'");
  }
  if (out.empty()) throw ConfigError("at least one output format is required");
  return out;
}

void error_record(std::ostream& err, std::string_view kind, std::string_view message) {
  nlohmann::ordered_json j;
  j["error"] = std::string(kind);
  j["message"] = std::string(message);
  err << j.dump() << "\n";
}

}  // namespace

int run_analyze(const RunConfig& config, std::ostream& out) {
  config.thresholds.validate();
  if (config.formats.empty()) throw ConfigError("at least one output format is required");
  const auto histories = load_manifest_file(config.manifest, config.ingest);
  std::filesystem::create_directories(config.out_dir);

  std::vector<std::string> apps;
  std::vector<AppResult> results;
  bool any_increase = false;
  for (const auto& h : histories) {
    results.push_back(analyze_app(h, config));
    apps.push_back(h.app_name);
    any_increase = any_increase || results.back().any_increase;
    out << h.app_name << ": " << h.snapshots.size() << " versions, "
        << results.back().records.size() << " smell instances\n";
  }
  write_pooled(config, apps, results);
  return config.gate && any_increase ? kGateFailed : kOk;
}

int run_gate(const RunConfig& config, std::ostream& out) {
  config.thresholds.validate();
  const auto histories = load_manifest_file(config.manifest, config.ingest);
  if (histories.empty()) {
    out << "insufficient history: manifest has no versions\n";
    return kInsufficientHistory;
  }
  bool failed = false;
  for (const auto& h : histories) {
    if (h.snapshots.size() < 2) {
      out << h.app_name << ": insufficient history (" << h.snapshots.size() << " version)\n";
      return kInsufficientHistory;
    }
  }
  for (const auto& h : histories) {
    const auto series = density_series(h);
    const std::span<const DensityPoint> last_two(series.end() - 2, series.end());
    const auto flags = flag_anomalies(last_two, config.thresholds);
    const auto& prev = last_two[0];
    const auto& cur = last_two[1];
    out << h.app_name << ": " << prev.version_id << " -> " << cur.version_id
        << " delta_rho=" << report::format_prob(cur.delta_rho);
    bool app_failed = false;
    for (const auto& f : flags) {
      out << " " << to_string(f.kind);
      if (f.kind != AnomalyKind::decrease_50) app_failed = true;
    }
    out << (app_failed ? " FAIL" : " ok") << "\n";
    failed = failed || app_failed;
  }
  return failed ? kGateFailed : kOk;
}

int run_detect(const RunConfig& config, std::ostream& out) {
  const auto text = read_file(config.code_model);
  auto occurrences =
      evaluate_rules(parse_code_model(text, config.code_model.string()), config.ingest.rules,
                     config.version_id);
  for (auto& o : occurrences) o.file = normalize_path(o.file, config.ingest.strip_prefix);
  const auto doc = report::occurrences_json(config.version_id, occurrences);
  if (config.out_dir.empty()) {
    out << doc;
  } else {
    std::filesystem::create_directories(config.out_dir);
    report::write_atomic(config.out_dir / "occurrences.json", doc);
  }
  return kOk;
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Code smell survival and smell-density anomaly analysis"};
  app.require_subcommand(1);

  RunConfig config;
  std::string formats = "csv,json";
  std::string rules_file;
  std::string strip_prefix;
  std::vector<std::string> excludes;

  auto add_ingest = [&](CLI::App* sub) {
    sub->add_option("--rules", rules_file, "JSON object of rule thresholds overriding defaults");
    sub->add_option("--strip-prefix", strip_prefix, "Path prefix removed from reported files");
  };
  auto add_thresholds = [&](CLI::App* sub) {
    sub->add_option("--up", config.thresholds.up, "Density increase flag threshold");
    sub->add_option("--up2", config.thresholds.up2, "Strong density increase flag threshold");
    sub->add_option("--down", config.thresholds.down, "Density decrease flag threshold");
  };

  auto* detect = app.add_subcommand("detect", "Evaluate smell rules on a code model");
  detect->add_option("--code-model", config.code_model, "Code-model JSON file")->required();
  detect->add_option("--version", config.version_id, "Version id to tag occurrences with");
  detect->add_option("--out", config.out_dir, "Output directory (default: standard output)");
  add_ingest(detect);

  auto* analyze = app.add_subcommand("analyze", "Survival and anomaly analysis of a manifest");
  analyze->add_option("--manifest", config.manifest, "Version manifest CSV")->required();
  analyze->add_option("--out", config.out_dir, "Output directory")->required();
  analyze->add_option("--formats", formats, "Comma-separated subset of csv,json,svg");
  analyze->add_option("--gap-tolerance", config.tracking.gap_tolerance,
                      "Absent versions tolerated inside one smell instance");
  analyze->add_flag("--rename-heuristic", config.tracking.rename_heuristic,
                    "Pair removals and additions across renamed files");
  analyze->add_option("--exclude-prefix", excludes, "Drop smells under this path prefix");
  analyze->add_flag("--gate", config.gate, "Exit nonzero when any increase flag is raised");
  add_ingest(analyze);
  add_thresholds(analyze);

  auto* gate = app.add_subcommand("gate", "Check the latest transition for density increases");
  gate->add_option("--manifest", config.manifest, "Version manifest CSV")->required();
  gate->add_option("--exclude-prefix", excludes, "Drop smells under this path prefix");
  add_ingest(gate);
  add_thresholds(gate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    error_record(err, "usage", e.what());
    return kError;
  }

  try {
    config.formats = parse_formats(formats);
    config.ingest.strip_prefix = strip_prefix;
    config.ingest.exclude_prefixes = excludes;
    if (!rules_file.empty()) config.ingest.rules.apply_overrides_json(read_file(rules_file));

    if (detect->parsed()) return run_detect(config, out);
    if (analyze->parsed()) return run_analyze(config, out);
    return run_gate(config, out);
  } catch (const ManifestError& e) {
    error_record(err, "manifest", e.what());
  } catch (const ParseError& e) {
    error_record(err, "parse", e.what());
  } catch (const ConfigError& e) {
    error_record(err, "config", e.what());
  } catch (const StatsError& e) {
    error_record(err, "stats", e.what());
  } catch (const IoError& e) {
    error_record(err, "io", e.what());
  } catch (const Error& e) {
    error_record(err, "analysis", e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    error_record(err, "io", e.what());
  }
  return kError;
}

}  // namespace smellsurv::cli
