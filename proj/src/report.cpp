#include "smellsurv/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include <json.hpp>

#include "smellsurv/csv.hpp"
#include "smellsurv/error.hpp"

namespace smellsurv::report {

using nlohmann::ordered_json;

namespace {

std::string printf_double(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

// Numbers in JSON are rounded the same way as in CSV so both agree.
ordered_json prob_json(std::optional<double> v) {
  if (!v) return nullptr;
  if (std::isinf(*v)) return *v > 0 ? "inf" : "-inf";
  return std::stod(printf_double("%.6g", *v));
}

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string num(double v) { return printf_double("%.2f", v); }

constexpr double kWidth = 720, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
constexpr std::array<const char*, 6> kPalette = {"#1f77b4", "#d62728", "#2ca02c",
                                                 "#9467bd", "#ff7f0e", "#8c564b"};

struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const {
    return kLeft + (x1 > x0 ? (x - x0) / (x1 - x0) : 0.0) * (kWidth - kLeft - kRight);
  }
  double py(double y) const {
    return kHeight - kBottom - (y1 > y0 ? (y - y0) / (y1 - y0) : 0.0) * (kHeight - kTop - kBottom);
  }
};

std::string svg_open(std::string_view title) {
  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
       num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" +
       xml_escape(title) + "</text>\n";
  return s;
}

std::string svg_axes(const Frame& f, std::string_view xlabel, std::string_view ylabel,
                     std::string_view x0_label, std::string_view x1_label) {
  std::string s;
  s += "<g stroke=\"black\" stroke-width=\"1\">\n";
  s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kHeight - kBottom) + "\" x2=\"" +
       num(kWidth - kRight) + "\" y2=\"" + num(kHeight - kBottom) + "\"/>\n";
  s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(kLeft) + "\" y2=\"" +
       num(kHeight - kBottom) + "\"/>\n";
  s += "</g>\n";
  s += "<g font-size=\"11\">\n";
  s += "<text x=\"" + num(kLeft) + "\" y=\"" + num(kHeight - kBottom + 16) +
       "\" text-anchor=\"start\">" + xml_escape(x0_label) + "</text>\n";
  s += "<text x=\"" + num(kWidth - kRight) + "\" y=\"" + num(kHeight - kBottom + 16) +
       "\" text-anchor=\"end\">" + xml_escape(x1_label) + "</text>\n";
  s += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(f.py(f.y1) + 4) + "\" text-anchor=\"end\">" +
       printf_double("%.6g", f.y1) + "</text>\n";
  s += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(f.py(f.y0) + 4) + "\" text-anchor=\"end\">" +
       printf_double("%.6g", f.y0) + "</text>\n";
  s += "<text x=\"" + num((kLeft + kWidth - kRight) / 2) + "\" y=\"" + num(kHeight - 12) +
       "\" text-anchor=\"middle\">" + xml_escape(xlabel) + "</text>\n";
  s += "<text x=\"16\" y=\"" + num((kTop + kHeight - kBottom) / 2) +
       "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
       num((kTop + kHeight - kBottom) / 2) + ")\">" + xml_escape(ylabel) + "</text>\n";
  s += "</g>\n";
  return s;
}

}  // namespace

std::string format_prob(std::optional<double> value) {
  if (!value) return "NA";
  if (std::isinf(*value)) return *value > 0 ? "inf" : "-inf";
  return printf_double("%.6g", *value);
}

std::string format_days(std::optional<double> value) {
  if (!value) return "NA";
  return printf_double("%.2f", *value);
}

std::string records_csv(std::string_view app, std::span<const SurvivalRecord> records) {
  std::string out = csv::format_row({"app", "rule", "scope", "key", "first_version", "first_date",
                                     "last_present_version", "end_date", "censored",
                                     "duration_days", "timeframe"});
  for (const auto& r : records) {
    out += csv::format_row({std::string(app), std::string(to_string(r.key.rule)),
                            std::string(to_string(r.scope)), to_string(r.key), r.first_version,
                            format_timestamp(r.first_date), r.last_present_version,
                            r.end_date ? format_timestamp(*r.end_date) : std::string(),
                            std::to_string(r.censored), format_days(r.duration_days),
                            std::to_string(r.timeframe)});
  }
  return out;
}

std::string lifelines_csv(std::span<const SurvivalRecord> records) {
  std::string out = csv::format_row({"key", "rule", "scope", "first_date", "end_date", "censored"});
  for (const auto& r : records) {
    out += csv::format_row({to_string(r.key), std::string(to_string(r.key.rule)),
                            std::string(to_string(r.scope)), format_timestamp(r.first_date),
                            r.end_date ? format_timestamp(*r.end_date) : std::string(),
                            std::to_string(r.censored)});
  }
  return out;
}

std::string counts_csv(const History& history) {
  csv::Row header = {"version", "timestamp"};
  for (RuleId id : kAllRules) header.emplace_back(to_string(id));
  header.emplace_back("total");
  std::string out = csv::format_row(header);
  for (const auto& snap : history.snapshots) {
    std::array<std::size_t, kAllRules.size()> counts{};
    for (const auto& o : snap.occurrences) ++counts[static_cast<std::size_t>(o.rule)];
    csv::Row row = {snap.version_id, format_timestamp(snap.timestamp)};
    for (auto c : counts) row.push_back(std::to_string(c));
    row.push_back(std::to_string(snap.occurrences.size()));
    out += csv::format_row(row);
  }
  return out;
}

std::string curve_csv(const SurvivalCurve& curve) {
  std::string out = "time_days,n_at_risk,n_events,survival\n";
  for (const auto& p : curve.points) {
    out += csv::format_row({format_days(p.time_days), std::to_string(p.n_at_risk),
                            std::to_string(p.n_events), format_prob(p.survival)});
  }
  return out;
}

std::string comparison_curves_csv(const GroupComparison& cmp) {
  std::string out = "group,time_days,n_at_risk,n_events,survival\n";
  for (std::size_t g = 0; g < 2; ++g) {
    for (const auto& p : cmp.curves[g].points) {
      out += csv::format_row({cmp.group_names[g], format_days(p.time_days),
                              std::to_string(p.n_at_risk), std::to_string(p.n_events),
                              format_prob(p.survival)});
    }
  }
  return out;
}

std::string test_json(const LogRankResult& test) {
  ordered_json j;
  j["statistic"] = prob_json(test.statistic);
  j["p_value"] = prob_json(test.p_value);
  if (test.warning) j["warning"] = *test.warning;
  return j.dump() + "\n";
}

std::string test_unavailable_json(std::string_view reason) {
  ordered_json j;
  j["statistic"] = nullptr;
  j["p_value"] = nullptr;
  j["warning"] = std::string(reason);
  return j.dump() + "\n";
}

std::string summary_csv(std::span<const SummaryRow> rows) {
  std::string out = csv::format_row({"partition", "group", "found", "removed", "pct_removed",
                                     "median_days", "rmean_days", "se_rmean", "note"});
  for (const auto& row : rows) {
    if (!row.summary) {
      out += csv::format_row({row.partition, row.group, "0", "0", "NA", "NA", "NA", "NA", "no data"});
      continue;
    }
    const auto& s = *row.summary;
    out += csv::format_row({row.partition, row.group, std::to_string(s.found),
                            std::to_string(s.removed), format_prob(s.pct_removed),
                            format_days(s.median_days), format_days(s.rmean_days),
                            format_days(s.se_rmean), ""});
  }
  return out;
}

std::string density_csv(std::span<const DensityPoint> series) {
  std::string out = csv::format_row(
      {"version", "timestamp", "cs_count", "lloc", "rho", "delta_cs", "delta_lloc", "delta_rho"});
  for (const auto& p : series) {
    out += csv::format_row({p.version_id, format_timestamp(p.timestamp), std::to_string(p.cs_count),
                            std::to_string(p.lloc), format_prob(p.rho), format_prob(p.delta_cs),
                            format_prob(p.delta_lloc), format_prob(p.delta_rho)});
  }
  return out;
}

std::string anomaly_json(std::string_view app, std::span<const DensityPoint> series,
                         std::span<const AnomalyFlag> flags, const AnomalyThresholds& thresholds) {
  ordered_json j;
  j["app"] = std::string(app);
  j["thresholds"] = {{"up", thresholds.up}, {"up2", thresholds.up2}, {"down", thresholds.down}};
  j["points"] = ordered_json::array();
  for (const auto& p : series) {
    ordered_json pj;
    pj["version"] = p.version_id;
    pj["timestamp"] = format_timestamp(p.timestamp);
    pj["cs_count"] = p.cs_count;
    pj["lloc"] = p.lloc;
    pj["rho"] = prob_json(p.rho);
    pj["delta_cs"] = prob_json(p.delta_cs);
    pj["delta_lloc"] = prob_json(p.delta_lloc);
    pj["delta_rho"] = prob_json(p.delta_rho);
    j["points"].push_back(std::move(pj));
  }
  j["flags"] = ordered_json::array();
  for (const auto& f : flags) {
    ordered_json fj;
    fj["version"] = f.version_id;
    fj["kind"] = std::string(to_string(f.kind));
    fj["delta_rho"] = prob_json(f.delta_rho);
    j["flags"].push_back(std::move(fj));
  }
  return j.dump(2) + "\n";
}

std::string change_rates_json(std::string_view app, const ChangeRates& rates) {
  ordered_json j;
  j["app"] = std::string(app);
  j["start_version"] = rates.start_version;
  j["end_version"] = rates.end_version;
  j["d_loc"] = rates.d_loc ? prob_json(rates.d_loc) : ordered_json("unavailable");
  j["d_lloc"] = rates.d_lloc ? prob_json(rates.d_lloc) : ordered_json("unavailable");
  j["d_classes"] = rates.d_classes ? prob_json(rates.d_classes) : ordered_json("unavailable");
  return j.dump(2) + "\n";
}

std::string occurrences_json(std::string_view version_id,
                             std::span<const SmellOccurrence> occurrences) {
  ordered_json j;
  j["version"] = std::string(version_id);
  j["occurrences"] = ordered_json::array();
  for (const auto& o : occurrences) {
    ordered_json oj;
    oj["rule"] = std::string(to_string(o.rule));
    oj["scope"] = std::string(to_string(scope_of(o.rule)));
    oj["file"] = o.file;
    oj["entity_path"] = o.entity_path;
    oj["begin_line"] = o.begin_line ? ordered_json(*o.begin_line) : ordered_json(nullptr);
    oj["end_line"] = o.end_line ? ordered_json(*o.end_line) : ordered_json(nullptr);
    j["occurrences"].push_back(std::move(oj));
  }
  return j.dump(2) + "\n";
}

std::string km_svg(std::string_view title, std::span<const NamedCurve> curves) {
  double xmax = 0;
  for (const auto& c : curves) xmax = std::max(xmax, c.curve->tau);
  if (xmax <= 0) xmax = 1;
  const Frame f{0, xmax, 0, 1};

  std::string s = svg_open(title);
  s += svg_axes(f, "days", "survival probability", "0", format_days(xmax));
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto& c = *curves[i].curve;
    const char* color = kPalette[i % kPalette.size()];
    std::string pts = num(f.px(0)) + "," + num(f.py(1));
    double s_prev = 1;
    for (const auto& p : c.points) {
      pts += " " + num(f.px(p.time_days)) + "," + num(f.py(s_prev));
      pts += " " + num(f.px(p.time_days)) + "," + num(f.py(p.survival));
      s_prev = p.survival;
    }
    pts += " " + num(f.px(c.tau)) + "," + num(f.py(s_prev));
    s += "<polyline class=\"km\" data-group=\"" + xml_escape(curves[i].name) +
         "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    s += "<text x=\"" + num(kWidth - kRight - 4) + "\" y=\"" + num(kTop + 14 * (i + 1)) +
         "\" text-anchor=\"end\" font-size=\"12\" fill=\"" + color + "\">" +
         xml_escape(curves[i].name) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

std::string lifelines_svg(std::string_view title, std::span<const SurvivalRecord> records,
                          const History& history) {
  const Timestamp start = history.snapshots.front().timestamp;
  const Timestamp end = history.snapshots.back().timestamp;
  const double span_days = std::max(days_between(start, end), 1.0);
  const Frame f{0, span_days, 0, static_cast<double>(std::max<std::size_t>(records.size(), 1))};

  std::string s = svg_open(title);
  s += svg_axes(f, "date", "smell instance", format_timestamp(start), format_timestamp(end));
  s += "<g stroke-width=\"1\">\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const double x0 = days_between(start, r.first_date);
    const double x1 = days_between(start, r.end_date.value_or(end));
    const double y = f.py(static_cast<double>(i) + 0.5);
    s += "<line class=\"lifeline\" x1=\"" + num(f.px(x0)) + "\" y1=\"" + num(y) + "\" x2=\"" +
         num(f.px(x1)) + "\" y2=\"" + num(y) + "\" stroke=\"" +
         (r.scope == Scope::localized ? kPalette[0] : kPalette[1]) + "\"/>\n";
  }
  s += "</g>\n";
  s += "</svg>\n";
  return s;
}

std::string delta_rho_svg(std::string_view title, std::span<const DensityPoint> series,
                          std::span<const AnomalyFlag> flags, const AnomalyThresholds& thresholds) {
  double lo = thresholds.down * 1.5, hi = thresholds.up2 * 1.5;
  for (const auto& p : series) {
    if (p.delta_rho && std::isfinite(*p.delta_rho)) {
      lo = std::min(lo, *p.delta_rho);
      hi = std::max(hi, *p.delta_rho);
    }
  }
  const double xmax = series.size() > 1 ? static_cast<double>(series.size() - 1) : 1.0;
  const Frame f{0, xmax, lo, hi};

  std::string s = svg_open(title);
  s += svg_axes(f, "version", "relative change of smell density",
                series.empty() ? "" : series.front().version_id,
                series.empty() ? "" : series.back().version_id);
  for (const auto& [value, name] : {std::pair{thresholds.up, "up"}, std::pair{thresholds.up2, "up2"},
                                    std::pair{thresholds.down, "down"}, std::pair{0.0, "zero"}}) {
    s += "<line class=\"threshold\" data-name=\"" + std::string(name) + "\" x1=\"" + num(kLeft) +
         "\" y1=\"" + num(f.py(value)) + "\" x2=\"" + num(kWidth - kRight) + "\" y2=\"" +
         num(f.py(value)) + "\" stroke=\"" + (value == 0.0 ? "#999999" : "#ff7f0e") +
         "\" stroke-dasharray=\"4 3\"/>\n";
  }

  std::string pts;
  std::map<std::string, const AnomalyFlag*> flagged;
  for (const auto& fl : flags) flagged[fl.version_id] = &fl;
  std::string marks;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (!series[i].delta_rho) continue;
    const double v = std::isfinite(*series[i].delta_rho) ? *series[i].delta_rho : hi;
    const std::string xy = num(f.px(static_cast<double>(i))) + "," + num(f.py(v));
    pts += (pts.empty() ? "" : " ") + xy;
    if (auto it = flagged.find(series[i].version_id); it != flagged.end()) {
      marks += "<circle class=\"flag\" data-kind=\"" + std::string(to_string(it->second->kind)) +
               "\" cx=\"" + num(f.px(static_cast<double>(i))) + "\" cy=\"" + num(f.py(v)) +
               "\" r=\"4\" fill=\"#d62728\"/>\n";
    }
  }
  s += "<polyline class=\"delta-rho\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"" +
       pts + "\"/>\n";
  s += marks;
  s += "</svg>\n";
  return s;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("error while writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

}  // namespace smellsurv::report
