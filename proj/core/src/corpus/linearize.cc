#include "selfgen/corpus/linearize.h"

#include <algorithm>

#include "selfgen/errors.h"

namespace selfgen {
namespace {

bool RequiredByAct(const DomainSchema& schema, const std::string& attr) {
  for (const DialogueActDef& act : schema.acts()) {
    if (std::find(act.required.begin(), act.required.end(), attr) ==
        act.required.end()) {
      return false;
    }
  }
  return true;
}

std::string SlotToken(const AttributeDef& def, const std::string& value) {
  if (def.kind == ValueKind::kBinary || IsDontCareValue(value) ||
      !def.delexicalized) {
    return def.token + "_" + ValueToken(value);
  }
  return def.token;
}

}  // namespace

std::string_view InputModeName(InputMode mode) {
  switch (mode) {
    case InputMode::kE2eLex:
      return "e2e-lex";
    case InputMode::kE2eDelex:
      return "e2e-delex";
    case InputMode::kDaVariable:
      return "da-variable";
  }
  return "e2e-lex";
}

InputMode ParseInputMode(std::string_view name) {
  if (name == "e2e-lex") return InputMode::kE2eLex;
  if (name == "e2e-delex") return InputMode::kE2eDelex;
  if (name == "da-variable") return InputMode::kDaVariable;
  throw ConfigError("unknown input mode '" + std::string(name) + "'");
}

std::set<std::string> DelexAttributes(const DomainSchema& schema, InputMode mode) {
  std::set<std::string> out;
  if (mode == InputMode::kE2eLex) return out;
  for (const AttributeDef& a : schema.attributes()) {
    if (a.delexicalized) out.insert(a.name);
  }
  return out;
}

LinearizedInput Linearize(const MeaningRepresentation& mr,
                          const DomainSchema& schema, InputMode mode) {
  LinearizedInput in;
  if (mode == InputMode::kDaVariable) {
    in.tokens.push_back(schema.Act(mr.act).token);
    for (const Slot& s : mr.slots) {
      in.tokens.push_back(SlotToken(schema.Attribute(s.attribute), s.value));
    }
    return in;
  }
  for (const AttributeDef& def : schema.attributes()) {
    const bool present = mr.Has(def.name);
    if (mode == InputMode::kE2eDelex && def.delexicalized) {
      if (RequiredByAct(schema, def.name)) continue;
      in.tokens.push_back(def.token + (present ? "_present" : "_n/a"));
      continue;
    }
    in.tokens.push_back(present ? def.token + "_" + ValueToken(mr.ValueOf(def.name))
                                : def.token + "_n/a");
  }
  return in;
}

std::vector<std::string> AllInputTokens(const DomainSchema& schema,
                                        InputMode mode) {
  std::set<std::string> out;
  if (mode == InputMode::kDaVariable) {
    for (const DialogueActDef& act : schema.acts()) out.insert(act.token);
    for (const AttributeDef& def : schema.attributes()) {
      for (const std::string& v : def.values) out.insert(SlotToken(def, v));
    }
    return {out.begin(), out.end()};
  }
  for (const AttributeDef& def : schema.attributes()) {
    if (mode == InputMode::kE2eDelex && def.delexicalized) {
      if (RequiredByAct(schema, def.name)) continue;
      out.insert(def.token + "_present");
      out.insert(def.token + "_n/a");
      continue;
    }
    out.insert(def.token + "_n/a");
    for (const std::string& v : def.values) out.insert(def.token + "_" + ValueToken(v));
  }
  return {out.begin(), out.end()};
}

}  // namespace selfgen
