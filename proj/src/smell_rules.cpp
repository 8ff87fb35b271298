#include "smellsurv/smell_rules.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include <json.hpp>

#include "smellsurv/error.hpp"

namespace smellsurv {

namespace {

constexpr std::array<std::string_view, 6> kRuleNames = {
    "ExcessiveMethodLength",  "ExcessiveClassLength",   "ExcessiveParameterList",
    "DepthOfInheritance",     "CouplingBetweenObjects", "NumberOfChildren",
};

bool applies_to(RuleId id, EntityKind kind) {
  switch (id) {
    case RuleId::ExcessiveMethodLength:
    case RuleId::ExcessiveParameterList:
      return kind == EntityKind::method || kind == EntityKind::function;
    case RuleId::ExcessiveClassLength:
    case RuleId::DepthOfInheritance:
    case RuleId::CouplingBetweenObjects:
    case RuleId::NumberOfChildren:
      return kind == EntityKind::class_;
  }
  return false;
}

std::uint64_t metric_value(const CodeEntity& e, Metric m) {
  switch (m) {
    case Metric::loc: return e.loc;
    case Metric::parameter_count: return e.parameter_count;
    case Metric::depth_of_inheritance: return e.depth_of_inheritance;
    case Metric::coupling: return e.coupling;
    case Metric::children_count: return e.children_count;
  }
  return 0;
}

}  // namespace

Ruleset Ruleset::defaults() {
  Ruleset r;
  r.rules_ = {{
      {RuleId::ExcessiveMethodLength, Scope::localized, Metric::loc, 100},
      {RuleId::ExcessiveClassLength, Scope::localized, Metric::loc, 1000},
      {RuleId::ExcessiveParameterList, Scope::localized, Metric::parameter_count, 10},
      {RuleId::DepthOfInheritance, Scope::scattered, Metric::depth_of_inheritance, 10},
      {RuleId::CouplingBetweenObjects, Scope::scattered, Metric::coupling, 13},
      {RuleId::NumberOfChildren, Scope::scattered, Metric::children_count, 15},
  }};
  return r;
}

void Ruleset::set_threshold(RuleId id, double threshold) {
  if (!(threshold > 0)) {
    throw ConfigError("threshold for " + std::string(to_string(id)) + " must be positive");
  }
  rules_[static_cast<std::size_t>(id)].threshold = threshold;
}

void Ruleset::apply_overrides_json(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("ruleset: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("ruleset: expected an object of rule thresholds");
  for (const auto& [name, value] : doc.items()) {
    const RuleId id = parse_rule_id(name);
    if (!value.is_number()) throw ConfigError("ruleset: threshold for " + name + " is not a number");
    set_threshold(id, value.get<double>());
  }
}

std::string_view to_string(RuleId id) { return kRuleNames[static_cast<std::size_t>(id)]; }

std::string_view to_string(Scope scope) {
  return scope == Scope::localized ? "localized" : "scattered";
}

std::string_view to_string(EntityKind kind) {
  switch (kind) {
    case EntityKind::class_: return "class";
    case EntityKind::method: return "method";
    case EntityKind::function: return "function";
  }
  return "";
}

std::optional<RuleId> try_parse_rule_id(std::string_view name) {
  for (std::size_t i = 0; i < kRuleNames.size(); ++i) {
    if (kRuleNames[i] == name) return static_cast<RuleId>(i);
  }
  return std::nullopt;
}

RuleId parse_rule_id(std::string_view name) {
  if (auto id = try_parse_rule_id(name)) return *id;
  throw ConfigError("unknown rule id '" + std::string(name) + "'");
}

EntityKind parse_entity_kind(std::string_view name) {
  if (name == "class") return EntityKind::class_;
  if (name == "method") return EntityKind::method;
  if (name == "function") return EntityKind::function;
  throw ConfigError("unknown entity kind '" + std::string(name) + "'");
}

Scope scope_of(RuleId id) {
  switch (id) {
    case RuleId::ExcessiveMethodLength:
    case RuleId::ExcessiveClassLength:
    case RuleId::ExcessiveParameterList:
      return Scope::localized;
    case RuleId::DepthOfInheritance:
    case RuleId::CouplingBetweenObjects:
    case RuleId::NumberOfChildren:
      return Scope::scattered;
  }
  return Scope::localized;
}

std::string entity_path_of(const CodeEntity& entity) {
  if (entity.kind == EntityKind::method && entity.parent && !entity.parent->empty()) {
    return *entity.parent + "/" + entity.name;
  }
  return entity.name;
}

std::vector<SmellOccurrence> evaluate_rules(std::span<const CodeEntity> entities,
                                            const Ruleset& rules,
                                            const std::string& version_id) {
  std::vector<SmellOccurrence> out;
  for (const auto& entity : entities) {
    for (const auto& rule : rules.rules()) {
      if (!applies_to(rule.id, entity.kind)) continue;
      if (static_cast<double>(metric_value(entity, rule.metric)) > rule.threshold) {
        out.push_back(SmellOccurrence{rule.id, entity.file, entity_path_of(entity),
                                      entity.begin_line, entity.end_line, version_id});
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::tie(a.file, a.entity_path, a.rule) < std::tie(b.file, b.entity_path, b.rule);
  });
  return out;
}

std::vector<CodeEntity> parse_code_model(std::string_view json_text, const std::string& source) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(source + ": " + e.what(), e.byte);
  }
  if (!doc.is_object() || !doc.contains("entities") || !doc["entities"].is_array()) {
    throw ParseError(source + ": expected an object with an 'entities' array");
  }

  std::vector<CodeEntity> out;
  std::size_t index = 0;
  for (const auto& item : doc["entities"]) {
    const std::string where = source + ": entities[" + std::to_string(index++) + "]";
    if (!item.is_object()) throw ParseError(where + ": not an object");

    auto text_field = [&](const char* key, bool required) -> std::optional<std::string> {
      if (!item.contains(key)) {
        if (required) throw ParseError(where + ": missing '" + key + "'");
        return std::nullopt;
      }
      if (!item[key].is_string()) throw ParseError(where + ": '" + key + "' must be a string");
      return item[key].get<std::string>();
    };
    auto count_field = [&](const char* key) -> std::uint64_t {
      if (!item.contains(key)) return 0;
      const auto& v = item[key];
      if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
        throw ParseError(where + ": '" + key + "' must be a non-negative integer");
      }
      return v.get<std::uint64_t>();
    };
    auto line_field = [&](const char* key) -> std::optional<std::uint32_t> {
      if (!item.contains(key) || item[key].is_null()) return std::nullopt;
      const auto& v = item[key];
      if (!v.is_number_integer() || v.get<std::int64_t>() < 1) {
        throw ParseError(where + ": '" + key + "' must be a positive integer");
      }
      return v.get<std::uint32_t>();
    };

    CodeEntity e;
    try {
      e.kind = parse_entity_kind(*text_field("kind", true));
    } catch (const ConfigError& err) {
      throw ParseError(where + ": " + err.what());
    }
    e.name = *text_field("name", true);
    e.file = *text_field("file", true);
    e.parent = text_field("parent", false);
    e.loc = count_field("loc");
    e.parameter_count = count_field("parameter_count");
    e.depth_of_inheritance = count_field("depth_of_inheritance");
    e.coupling = count_field("coupling");
    e.children_count = count_field("children_count");
    e.begin_line = line_field("begin_line");
    e.end_line = line_field("end_line");
    if (e.begin_line && e.end_line && *e.begin_line > *e.end_line) {
      throw ParseError(where + ": begin_line greater than end_line");
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace smellsurv
