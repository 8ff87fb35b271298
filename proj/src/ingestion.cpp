#include "smellsurv/ingestion.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "smellsurv/csv.hpp"
#include "smellsurv/error.hpp"

namespace smellsurv {

namespace {

constexpr std::array<std::string_view, 5> kRequiredColumns = {"app", "version", "timestamp",
                                                              "report_path", "lloc"};

std::optional<std::uint64_t> parse_count(std::string_view text) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
  return value;
}

struct ManifestRow {
  std::size_t line;
  std::string app;
  std::string version;
  Timestamp timestamp;
  std::filesystem::path report;
  SizeMetrics size;
  std::map<std::string, std::string> extra;
};

std::vector<SmellOccurrence> load_report(const ManifestRow& row, const IngestOptions& options) {
  std::string content;
  try {
    content = read_file(row.report);
  } catch (const IoError& e) {
    throw ManifestError(e.what(), row.line);
  }
  try {
    if (row.report.extension() == ".json") {
      const auto entities = parse_code_model(content, row.report.string());
      std::vector<SmellOccurrence> occ;
      for (auto& o : evaluate_rules(entities, options.rules, row.version)) {
        o.file = normalize_path(o.file, options.strip_prefix);
        const bool excluded =
            std::any_of(options.exclude_prefixes.begin(), options.exclude_prefixes.end(),
                        [&](const std::string& p) { return !p.empty() && o.file.starts_with(p); });
        if (!excluded) occ.push_back(std::move(o));
      }
      return occ;
    }
    return parse_pmd_report(content, row.version, options).occurrences;
  } catch (const ParseError& e) {
    throw ManifestError(row.report.string() + ": " + e.what(), row.line);
  }
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error while reading '" + path.string() + "'");
  return std::move(buf).str();
}

History make_history(std::string app_name, std::vector<VersionSnapshot> snapshots) {
  std::stable_sort(snapshots.begin(), snapshots.end(),
                   [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
  std::set<std::string> ids;
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    const auto& s = snapshots[i];
    if (!ids.insert(s.version_id).second) {
      throw ManifestError(app_name + ": duplicate version id '" + s.version_id + "'", 0);
    }
    if (i > 0 && snapshots[i - 1].timestamp == s.timestamp) {
      throw ManifestError(app_name + ": versions '" + snapshots[i - 1].version_id + "' and '" +
                              s.version_id + "' share a timestamp",
                          0);
    }
    if (s.size.lloc == 0) {
      throw ManifestError(app_name + ": version '" + s.version_id + "' has lloc 0", 0);
    }
    for (const auto& o : s.occurrences) {
      if (o.version_id != s.version_id) {
        throw ManifestError(app_name + ": occurrence tagged '" + o.version_id +
                                "' inside version '" + s.version_id + "'",
                            0);
      }
    }
  }
  return History{std::move(app_name), std::move(snapshots)};
}

std::vector<History> load_manifest(std::string_view table, const std::filesystem::path& base_dir,
                                   const IngestOptions& options) {
  std::vector<csv::Record> records;
  try {
    records = csv::parse(table);
  } catch (const ParseError& e) {
    throw ManifestError(e.what(), 0);
  }
  if (records.empty()) throw ManifestError("empty manifest", 0);

  const auto& header = records.front().fields;
  if (header.size() < kRequiredColumns.size() ||
      !std::equal(kRequiredColumns.begin(), kRequiredColumns.end(), header.begin())) {
    throw ManifestError("header must start with app,version,timestamp,report_path,lloc",
                        records.front().line);
  }

  std::vector<ManifestRow> rows;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != header.size()) {
      throw ManifestError("expected " + std::to_string(header.size()) + " fields, found " +
                              std::to_string(rec.fields.size()),
                          rec.line);
    }
    ManifestRow row;
    row.line = rec.line;
    row.app = rec.fields[0];
    row.version = rec.fields[1];
    if (row.app.empty()) throw ManifestError("empty app name", rec.line);
    if (row.version.empty()) throw ManifestError("empty version id", rec.line);

    const auto ts = parse_timestamp(rec.fields[2]);
    if (!ts) throw ManifestError("unparseable timestamp '" + rec.fields[2] + "'", rec.line);
    row.timestamp = *ts;

    if (rec.fields[3].empty()) throw ManifestError("empty report_path", rec.line);
    row.report = std::filesystem::path(rec.fields[3]);
    if (row.report.is_relative()) row.report = base_dir / row.report;

    const auto lloc = parse_count(rec.fields[4]);
    if (!lloc || *lloc == 0) {
      throw ManifestError("lloc must be a positive integer, got '" + rec.fields[4] + "'", rec.line);
    }
    row.size.lloc = *lloc;

    for (std::size_t c = kRequiredColumns.size(); c < header.size(); ++c) {
      const auto& name = header[c];
      const auto& value = rec.fields[c];
      if (name == "loc" || name == "classes") {
        if (value.empty()) continue;
        const auto n = parse_count(value);
        if (!n || (name == "loc" && *n == 0)) {
          throw ManifestError("invalid " + name + " '" + value + "'", rec.line);
        }
        (name == "loc" ? row.size.loc : row.size.classes) = *n;
      } else {
        row.extra[name] = value;
      }
    }
    rows.push_back(std::move(row));
  }

  std::map<std::string, std::vector<const ManifestRow*>> by_app;
  for (const auto& row : rows) by_app[row.app].push_back(&row);

  std::vector<History> out;
  for (const auto& [app, app_rows] : by_app) {
    std::map<std::string, std::size_t> seen;
    std::map<Timestamp, std::size_t> seen_time;
    for (const auto* row : app_rows) {
      if (auto [it, fresh] = seen.emplace(row->version, row->line); !fresh) {
        throw ManifestError("duplicate version id '" + row->version + "' for app '" + app +
                                "' (first on line " + std::to_string(it->second) + ")",
                            row->line);
      }
      if (auto [it, fresh] = seen_time.emplace(row->timestamp, row->line); !fresh) {
        throw ManifestError("timestamp of version '" + row->version +
                                "' repeats line " + std::to_string(it->second),
                            row->line);
      }
    }

    std::vector<VersionSnapshot> snapshots;
    for (const auto* row : app_rows) {
      snapshots.push_back(VersionSnapshot{row->version, row->timestamp, load_report(*row, options),
                                          row->size, row->extra});
    }
    out.push_back(make_history(app, std::move(snapshots)));
  }
  return out;
}

std::vector<History> load_manifest_file(const std::filesystem::path& path,
                                        const IngestOptions& options) {
  const std::string text = read_file(path);
  return load_manifest(text, path.parent_path(), options);
}

std::string history_to_json(const History& history) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["app"] = history.app_name;
  doc["snapshots"] = ordered_json::array();
  for (const auto& s : history.snapshots) {
    ordered_json snap;
    snap["version"] = s.version_id;
    snap["timestamp"] = s.timestamp.time_since_epoch().count();
    snap["lloc"] = s.size.lloc;
    snap["loc"] = s.size.loc ? ordered_json(*s.size.loc) : ordered_json(nullptr);
    snap["classes"] = s.size.classes ? ordered_json(*s.size.classes) : ordered_json(nullptr);
    snap["extra"] = s.extra;
    snap["occurrences"] = ordered_json::array();
    for (const auto& o : s.occurrences) {
      ordered_json occ;
      occ["rule"] = to_string(o.rule);
      occ["file"] = o.file;
      occ["entity_path"] = o.entity_path;
      occ["begin_line"] = o.begin_line ? ordered_json(*o.begin_line) : ordered_json(nullptr);
      occ["end_line"] = o.end_line ? ordered_json(*o.end_line) : ordered_json(nullptr);
      snap["occurrences"].push_back(std::move(occ));
    }
    doc["snapshots"].push_back(std::move(snap));
  }
  return doc.dump(1) + "\n";
}

History history_from_json(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
    std::vector<VersionSnapshot> snapshots;
    for (const auto& snap : doc.at("snapshots")) {
      VersionSnapshot s;
      s.version_id = snap.at("version").get<std::string>();
      s.timestamp = Timestamp{std::chrono::seconds{snap.at("timestamp").get<std::int64_t>()}};
      s.size.lloc = snap.at("lloc").get<std::uint64_t>();
      if (!snap.at("loc").is_null()) s.size.loc = snap["loc"].get<std::uint64_t>();
      if (!snap.at("classes").is_null()) s.size.classes = snap["classes"].get<std::uint64_t>();
      s.extra = snap.at("extra").get<std::map<std::string, std::string>>();
      for (const auto& occ : snap.at("occurrences")) {
        SmellOccurrence o;
        o.rule = parse_rule_id(occ.at("rule").get<std::string>());
        o.file = occ.at("file").get<std::string>();
        o.entity_path = occ.at("entity_path").get<std::string>();
        if (!occ.at("begin_line").is_null()) o.begin_line = occ["begin_line"].get<std::uint32_t>();
        if (!occ.at("end_line").is_null()) o.end_line = occ["end_line"].get<std::uint32_t>();
        o.version_id = s.version_id;
        s.occurrences.push_back(std::move(o));
      }
      snapshots.push_back(std::move(s));
    }
    return make_history(doc.at("app").get<std::string>(), std::move(snapshots));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("history document: ") + e.what());
  } catch (const ConfigError& e) {
    throw ParseError(std::string("history document: ") + e.what());
  }
}

}  // namespace smellsurv
