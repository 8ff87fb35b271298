#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace smellsurv {

enum class EntityKind { class_, method, function };

/// A measured class, method or function. Metrics that do not apply to the
/// entity kind stay at 0.
struct CodeEntity {
  EntityKind kind = EntityKind::method;
  std::string name;
  std::string file;
  std::optional<std::string> parent;  ///< Enclosing class for methods.
  std::uint64_t loc = 0;
  std::uint64_t parameter_count = 0;
  std::uint64_t depth_of_inheritance = 0;
  std::uint64_t coupling = 0;
  std::uint64_t children_count = 0;
  std::optional<std::uint32_t> begin_line;
  std::optional<std::uint32_t> end_line;
};

enum class RuleId {
  ExcessiveMethodLength,
  ExcessiveClassLength,
  ExcessiveParameterList,
  DepthOfInheritance,
  CouplingBetweenObjects,
  NumberOfChildren,
};

inline constexpr std::array<RuleId, 6> kAllRules = {
    RuleId::ExcessiveMethodLength,  RuleId::ExcessiveClassLength,
    RuleId::ExcessiveParameterList, RuleId::DepthOfInheritance,
    RuleId::CouplingBetweenObjects, RuleId::NumberOfChildren,
};

enum class Scope { localized, scattered };

enum class Metric { loc, parameter_count, depth_of_inheritance, coupling, children_count };

/// A threshold rule. An entity violates it when its metric is strictly
/// greater than `threshold`. The threshold is a double so that +inf can
/// disable a rule.
struct SmellRule {
  RuleId id;
  Scope scope;
  Metric metric;
  double threshold;
};

/// One rule per RuleId, indexed by the enum value.
class Ruleset {
 public:
  /// PHPMD defaults: 100, 1000, 10, 10, 13, 15.
  static Ruleset defaults();

  const SmellRule& rule(RuleId id) const { return rules_[static_cast<std::size_t>(id)]; }
  std::span<const SmellRule> rules() const { return rules_; }

  /// Throws ConfigError unless `threshold` is > 0 (NaN rejected).
  void set_threshold(RuleId id, double threshold);

  /// Applies `{"RuleName": threshold, ...}` overrides from a JSON document.
  /// Unknown rule names and non-positive thresholds raise ConfigError.
  void apply_overrides_json(std::string_view json_text);

 private:
  std::array<SmellRule, 6> rules_{};
};

/// One violation of one rule at one location in one version.
struct SmellOccurrence {
  RuleId rule = RuleId::ExcessiveMethodLength;
  std::string file;
  std::string entity_path;
  std::optional<std::uint32_t> begin_line;
  std::optional<std::uint32_t> end_line;
  std::string version_id;

  friend bool operator==(const SmellOccurrence&, const SmellOccurrence&) = default;
};

std::string_view to_string(RuleId id);
std::string_view to_string(Scope scope);
std::string_view to_string(EntityKind kind);

/// Throws ConfigError for names outside the six rules.
RuleId parse_rule_id(std::string_view name);
std::optional<RuleId> try_parse_rule_id(std::string_view name);
EntityKind parse_entity_kind(std::string_view name);

Scope scope_of(RuleId id);

/// `Class/method` for methods with a parent, the bare name otherwise.
std::string entity_path_of(const CodeEntity& entity);

/// One occurrence per violated (entity, rule) pair, sorted by
/// (file, entity_path, rule).
std::vector<SmellOccurrence> evaluate_rules(std::span<const CodeEntity> entities,
                                            const Ruleset& rules,
                                            const std::string& version_id);

/// Reads a code-model JSON document (see docs/code-model.md). `source` is used
/// only in error messages.
std::vector<CodeEntity> parse_code_model(std::string_view json_text,
                                         const std::string& source = "<code-model>");

}  // namespace smellsurv
