#include "selfgen/corpus/schema.h"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "selfgen/corpus/tokenizer.h"
#include "selfgen/errors.h"

namespace selfgen {

using nlohmann::json;

std::string_view ValueKindName(ValueKind kind) {
  switch (kind) {
    case ValueKind::kDictionary:
      return "dictionary";
    case ValueKind::kBinary:
      return "binary";
    case ValueKind::kDontCareCapable:
      return "dontcare-capable";
  }
  return "dictionary";
}

ValueKind ParseValueKind(std::string_view name) {
  if (name == "dictionary") return ValueKind::kDictionary;
  if (name == "binary") return ValueKind::kBinary;
  if (name == "dontcare-capable") return ValueKind::kDontCareCapable;
  throw SchemaError("unknown value kind '" + std::string(name) + "'");
}

std::string ValueToken(std::string_view value) {
  std::string out;
  bool pending_sep = false;
  for (char c : ToLowerAscii(value)) {
    if (c == '\'') continue;
    if (c == ' ' || c == '\t') {
      pending_sep = !out.empty();
      continue;
    }
    if (pending_sep) out.push_back('_');
    pending_sep = false;
    out.push_back(c);
  }
  return out;
}

bool IsDontCareValue(std::string_view value) {
  const std::string tok = ValueToken(value);
  return tok == "dont_care" || tok == "dontcare";
}

DomainSchema::DomainSchema(std::string name, LinearizationStyle style,
                           std::vector<DialogueActDef> acts,
                           std::vector<AttributeDef> attributes,
                           std::vector<std::string> report_order)
    : name_(std::move(name)),
      style_(style),
      acts_(std::move(acts)),
      attributes_(std::move(attributes)),
      report_order_(std::move(report_order)) {
  for (AttributeDef& a : attributes_) {
    if (a.token.empty()) a.token = ToLowerAscii(a.name);
    if (a.label.empty()) a.label = a.name;
    if (a.placeholder.empty()) {
      a.placeholder = a.name;
      for (char& c : a.placeholder) {
        if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
      }
    }
  }
  for (DialogueActDef& act : acts_) {
    if (act.token.empty()) act.token = ValueToken(act.name);
  }
  if (report_order_.empty()) {
    for (const AttributeDef& a : attributes_) report_order_.push_back(a.name);
  }
  Validate();
}

void DomainSchema::Validate() const {
  if (acts_.empty()) throw SchemaError("schema '" + name_ + "' has no acts");
  std::set<std::string> seen;
  for (const AttributeDef& a : attributes_) {
    if (!seen.insert(a.name).second) {
      throw SchemaError("duplicate attribute '" + a.name + "'");
    }
    if (a.values.empty()) {
      throw SchemaError("attribute '" + a.name + "' has empty vocabulary");
    }
    if (a.kind == ValueKind::kBinary) {
      std::set<std::string> v(a.values.begin(), a.values.end());
      if (v != std::set<std::string>{"yes", "no"}) {
        throw SchemaError("binary attribute '" + a.name +
                          "' must have values {yes, no}");
      }
    }
    if (a.kind == ValueKind::kDontCareCapable) {
      bool has = false;
      for (const auto& v : a.values) has = has || IsDontCareValue(v);
      if (!has) {
        throw SchemaError("attribute '" + a.name +
                          "' is dontcare-capable but lacks a don't care value");
      }
    }
  }
  for (const DialogueActDef& act : acts_) {
    for (const auto& r : act.required) {
      if (!AttributeIndex(r)) {
        throw SchemaError("act '" + act.name + "' requires unknown attribute '" +
                          r + "'");
      }
    }
    for (const auto& r : act.allowed) {
      if (!AttributeIndex(r)) {
        throw SchemaError("act '" + act.name + "' allows unknown attribute '" +
                          r + "'");
      }
    }
    if (act.max_repeat < 1) throw SchemaError("max_repeat must be >= 1");
  }
  for (const auto& r : report_order_) {
    if (!AttributeIndex(r)) {
      throw SchemaError("report_order names unknown attribute '" + r + "'");
    }
  }
}

std::optional<std::size_t> DomainSchema::AttributeIndex(
    std::string_view name) const {
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    if (attributes_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t DomainSchema::AttributeIndexOrThrow(std::string_view name) const {
  auto idx = AttributeIndex(name);
  if (!idx) {
    throw SchemaError("unknown attribute '" + std::string(name) +
                      "' in schema '" + name_ + "'");
  }
  return *idx;
}

const AttributeDef& DomainSchema::Attribute(std::string_view name) const {
  return attributes_[AttributeIndexOrThrow(name)];
}

const DialogueActDef* DomainSchema::FindAct(std::string_view name) const {
  const std::string key = ValueToken(name);
  for (const DialogueActDef& act : acts_) {
    if (act.name == name || act.token == key ||
        ValueToken(act.name) == key) {
      return &act;
    }
  }
  // Accept camel-case spellings ("InformCount" for "inform_count").
  std::string flat;
  for (char c : key) {
    if (c != '_') flat.push_back(c);
  }
  for (const DialogueActDef& act : acts_) {
    std::string other;
    for (char c : act.token) {
      if (c != '_') other.push_back(c);
    }
    if (other == flat) return &act;
  }
  return nullptr;
}

const DialogueActDef& DomainSchema::Act(std::string_view name) const {
  const DialogueActDef* act = FindAct(name);
  if (act == nullptr) {
    throw SchemaError("unknown dialogue act '" + std::string(name) + "'");
  }
  return *act;
}

std::optional<std::string> DomainSchema::CanonicalValue(
    std::size_t attribute, std::string_view value) const {
  const std::string key = ValueToken(value);
  for (const std::string& v : attributes_[attribute].values) {
    if (ValueToken(v) == key) return v;
  }
  if (IsDontCareValue(value)) {
    for (const std::string& v : attributes_[attribute].values) {
      if (IsDontCareValue(v)) return v;
    }
  }
  return std::nullopt;
}

bool DomainSchema::IsAllowed(const DialogueActDef& act,
                             std::string_view attribute) const {
  if (act.allowed.empty()) return AttributeIndex(attribute).has_value();
  for (const auto& a : act.allowed) {
    if (a == attribute) return true;
  }
  for (const auto& a : act.required) {
    if (a == attribute) return true;
  }
  return false;
}

DomainSchema DomainSchema::FromJsonText(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("schema is not valid JSON: ") + e.what());
  }
  try {
    const std::string style = j.value("linearization", "fixed-position");
    LinearizationStyle ls;
    if (style == "fixed-position") {
      ls = LinearizationStyle::kFixedPosition;
    } else if (style == "da-variable") {
      ls = LinearizationStyle::kDaVariable;
    } else {
      throw SchemaError("unknown linearization '" + style + "'");
    }
    std::vector<DialogueActDef> acts;
    for (const json& a : j.at("dialogue_acts")) {
      DialogueActDef act;
      act.name = a.at("name").get<std::string>();
      act.token = a.value("token", "");
      act.required = a.value("required", std::vector<std::string>{});
      act.allowed = a.value("allowed", std::vector<std::string>{});
      act.max_repeat = a.value("max_repeat", 1);
      acts.push_back(std::move(act));
    }
    std::vector<AttributeDef> attrs;
    for (const json& a : j.at("attributes")) {
      AttributeDef def;
      def.name = a.at("name").get<std::string>();
      def.token = a.value("token", "");
      def.label = a.value("label", "");
      def.placeholder = a.value("placeholder", "");
      def.kind = ParseValueKind(a.value("kind", "dictionary"));
      def.delexicalized = a.value("delexicalized", false);
      def.values = a.at("values").get<std::vector<std::string>>();
      attrs.push_back(std::move(def));
    }
    return DomainSchema(j.at("name").get<std::string>(), ls, std::move(acts),
                        std::move(attrs),
                        j.value("report_order", std::vector<std::string>{}));
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed schema: ") + e.what());
  }
}

DomainSchema DomainSchema::LoadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open schema file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return FromJsonText(buf.str());
}

std::string DomainSchema::ToJsonText() const {
  json j;
  j["name"] = name_;
  j["linearization"] = style_ == LinearizationStyle::kFixedPosition
                           ? "fixed-position"
                           : "da-variable";
  j["dialogue_acts"] = json::array();
  for (const DialogueActDef& act : acts_) {
    j["dialogue_acts"].push_back({{"name", act.name},
                                  {"token", act.token},
                                  {"required", act.required},
                                  {"allowed", act.allowed},
                                  {"max_repeat", act.max_repeat}});
  }
  j["attributes"] = json::array();
  for (const AttributeDef& a : attributes_) {
    j["attributes"].push_back({{"name", a.name},
                               {"token", a.token},
                               {"label", a.label},
                               {"placeholder", a.placeholder},
                               {"kind", ValueKindName(a.kind)},
                               {"delexicalized", a.delexicalized},
                               {"values", a.values}});
  }
  j["report_order"] = report_order_;
  return j.dump(2) + "\n";
}

}  // namespace selfgen
