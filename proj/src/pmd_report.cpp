#include <algorithm>
#include <charconv>
#include <cstring>
#include <memory>
#include <tuple>

#include <expat.h>

#include "smellsurv/error.hpp"
#include "smellsurv/ingestion.hpp"

namespace smellsurv {

namespace {

struct ParserDeleter {
  void operator()(XML_Parser p) const { XML_ParserFree(p); }
};

struct PmdState {
  XML_Parser parser = nullptr;
  const std::string* version_id = nullptr;
  const IngestOptions* options = nullptr;
  PmdReport report;

  int depth = 0;
  bool saw_root = false;
  bool in_file = false;
  std::string current_file;

  std::optional<std::string> error;
  std::size_t error_offset = 0;
};

const char* find_attr(const XML_Char** attrs, const char* name) {
  for (std::size_t i = 0; attrs[i]; i += 2) {
    if (std::strcmp(attrs[i], name) == 0) return attrs[i + 1];
  }
  return nullptr;
}

void fail(PmdState& s, std::string message) {
  if (!s.error) {
    s.error = std::move(message);
    s.error_offset = static_cast<std::size_t>(XML_GetCurrentByteIndex(s.parser));
  }
  XML_StopParser(s.parser, XML_FALSE);
}

bool parse_line(const char* text, std::optional<std::uint32_t>& out) {
  if (!text || !*text) {
    out.reset();
    return true;
  }
  std::uint32_t value = 0;
  const char* end = text + std::strlen(text);
  auto [ptr, ec] = std::from_chars(text, end, value);
  if (ec != std::errc{} || ptr != end || value == 0) return false;
  out = value;
  return true;
}

void on_violation(PmdState& s, const XML_Char** attrs) {
  const char* rule_name = find_attr(attrs, "rule");
  if (!rule_name) return fail(s, "violation without 'rule' attribute");

  const auto rule = try_parse_rule_id(rule_name);
  if (!rule) {
    ++s.report.skipped_rules;
    return;
  }

  SmellOccurrence occ;
  occ.rule = *rule;
  occ.file = s.current_file;
  occ.version_id = *s.version_id;
  if (!parse_line(find_attr(attrs, "beginline"), occ.begin_line)) {
    return fail(s, "invalid 'beginline' attribute");
  }
  if (!parse_line(find_attr(attrs, "endline"), occ.end_line)) {
    return fail(s, "invalid 'endline' attribute");
  }
  if (occ.begin_line && occ.end_line && *occ.begin_line > *occ.end_line) {
    return fail(s, "'beginline' greater than 'endline'");
  }

  const char* member = find_attr(attrs, "method");
  if (!member || !*member) member = find_attr(attrs, "function");
  for (const char* part : {find_attr(attrs, "package"), find_attr(attrs, "class"), member}) {
    if (!part || !*part) continue;
    if (!occ.entity_path.empty()) occ.entity_path.push_back('/');
    occ.entity_path += part;
  }

  for (const auto& prefix : s.options->exclude_prefixes) {
    if (!prefix.empty() && occ.file.starts_with(prefix)) {
      ++s.report.excluded;
      return;
    }
  }
  s.report.occurrences.push_back(std::move(occ));
}

void XMLCALL start_element(void* user, const XML_Char* name, const XML_Char** attrs) {
  auto& s = *static_cast<PmdState*>(user);
  ++s.depth;
  if (s.depth == 1) {
    if (std::strcmp(name, "pmd") != 0) {
      return fail(s, std::string("root element is '") + name + "', expected 'pmd'");
    }
    s.saw_root = true;
  } else if (s.depth == 2 && std::strcmp(name, "file") == 0) {
    const char* file = find_attr(attrs, "name");
    if (!file) return fail(s, "file element without 'name' attribute");
    s.in_file = true;
    s.current_file = normalize_path(file, s.options->strip_prefix);
  } else if (s.depth == 3 && s.in_file && std::strcmp(name, "violation") == 0) {
    on_violation(s, attrs);
  }
}

void XMLCALL end_element(void* user, const XML_Char*) {
  auto& s = *static_cast<PmdState*>(user);
  if (s.depth == 2) s.in_file = false;
  --s.depth;
}

}  // namespace

std::string normalize_path(std::string_view path, std::string_view strip_prefix) {
  std::string p(path);
  std::replace(p.begin(), p.end(), '\\', '/');
  std::string prefix(strip_prefix);
  std::replace(prefix.begin(), prefix.end(), '\\', '/');
  if (!prefix.empty() && p.starts_with(prefix)) p.erase(0, prefix.size());
  while (p.starts_with("./")) p.erase(0, 2);
  while (p.starts_with('/')) p.erase(0, 1);
  return p;
}

PmdReport parse_pmd_report(std::string_view document, const std::string& version_id,
                           const IngestOptions& options) {
  if (document.find_first_not_of(" \t\r\n") == std::string_view::npos) return {};

  std::unique_ptr<std::remove_pointer_t<XML_Parser>, ParserDeleter> parser(
      XML_ParserCreate(nullptr));
  if (!parser) throw Error("cannot allocate XML parser");

  PmdState state;
  state.parser = parser.get();
  state.version_id = &version_id;
  state.options = &options;
  XML_SetUserData(parser.get(), &state);
  XML_SetElementHandler(parser.get(), start_element, end_element);

  const auto status = XML_Parse(parser.get(), document.data(),
                                static_cast<int>(document.size()), XML_TRUE);
  if (state.error) {
    throw ParseError("PMD report for version '" + version_id + "': " + *state.error,
                     state.error_offset);
  }
  if (status != XML_STATUS_OK) {
    throw ParseError("PMD report for version '" + version_id +
                         "': malformed XML: " + XML_ErrorString(XML_GetErrorCode(parser.get())),
                     static_cast<std::size_t>(XML_GetCurrentByteIndex(parser.get())));
  }
  if (!state.saw_root) throw ParseError("PMD report without root element", 0);

  auto& occ = state.report.occurrences;
  std::stable_sort(occ.begin(), occ.end(), [](const auto& a, const auto& b) {
    const auto al = a.begin_line.value_or(0), bl = b.begin_line.value_or(0);
    return std::tie(a.file, al, a.rule, a.entity_path) < std::tie(b.file, bl, b.rule, b.entity_path);
  });
  return std::move(state.report);
}

}  // namespace smellsurv
