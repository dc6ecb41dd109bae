#ifndef SELFGEN_CORPUS_SCHEMA_H_
#define SELFGEN_CORPUS_SCHEMA_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace selfgen {

enum class ValueKind {
  kDictionary,
  kBinary,           // values are exactly {yes, no}
  kDontCareCapable,  // dictionary plus the distinguished "don't care" value
};

std::string_view ValueKindName(ValueKind kind);
ValueKind ParseValueKind(std::string_view name);

// How an MR is turned into encoder input.
enum class LinearizationStyle {
  kFixedPosition,  // one token per attribute in canonical order (E2E)
  kDaVariable,     // act token followed by one token per slot (Laptops/TVs)
};

struct AttributeDef {
  std::string name;
  std::string token;        // input-token prefix, e.g. "eat_type"
  std::string label;        // report column title, e.g. "EatType"
  std::string placeholder;  // delexicalization placeholder, e.g. "NAME"
  ValueKind kind = ValueKind::kDictionary;
  bool delexicalized = false;
  std::vector<std::string> values;
};

struct DialogueActDef {
  std::string name;
  std::string token;
  std::vector<std::string> required;  // attribute names
  std::vector<std::string> allowed;   // empty = every attribute
  int max_repeat = 1;
};

// Registry of acts, attributes and value vocabularies for one dataset.
// Attribute order in `attributes` is the canonical order.
class DomainSchema {
 public:
  DomainSchema() = default;
  DomainSchema(std::string name, LinearizationStyle style,
               std::vector<DialogueActDef> acts,
               std::vector<AttributeDef> attributes,
               std::vector<std::string> report_order = {});

  static DomainSchema FromJsonText(std::string_view text);
  static DomainSchema LoadFile(const std::string& path);
  std::string ToJsonText() const;

  const std::string& name() const { return name_; }
  LinearizationStyle style() const { return style_; }
  const std::vector<DialogueActDef>& acts() const { return acts_; }
  const std::vector<AttributeDef>& attributes() const { return attributes_; }
  const std::vector<std::string>& report_order() const { return report_order_; }

  std::optional<std::size_t> AttributeIndex(std::string_view name) const;
  const AttributeDef& Attribute(std::string_view name) const;  // throws
  std::size_t AttributeIndexOrThrow(std::string_view name) const;

  const DialogueActDef* FindAct(std::string_view name) const;
  const DialogueActDef& Act(std::string_view name) const;  // throws
  // The act used when an MR string carries no act (E2E rows).
  const DialogueActDef& DefaultAct() const { return acts_.front(); }

  // Canonical spelling of `value` for the attribute (case-insensitive
  // match, apostrophes ignored); nullopt when outside the vocabulary.
  std::optional<std::string> CanonicalValue(std::size_t attribute,
                                            std::string_view value) const;

  bool IsAllowed(const DialogueActDef& act, std::string_view attribute) const;

 private:
  void Validate() const;

  std::string name_;
  LinearizationStyle style_ = LinearizationStyle::kFixedPosition;
  std::vector<DialogueActDef> acts_;
  std::vector<AttributeDef> attributes_;
  std::vector<std::string> report_order_;
};

// Lowercase, apostrophes dropped, runs of spaces/hyphens joined with '_'.
std::string ValueToken(std::string_view value);

bool IsDontCareValue(std::string_view value);

}  // namespace selfgen

#endif  // SELFGEN_CORPUS_SCHEMA_H_
