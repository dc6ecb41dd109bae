#include "selfgen/corpus/mr.h"

#include <algorithm>
#include <map>

#include "selfgen/errors.h"

namespace selfgen {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

}  // namespace

bool MeaningRepresentation::Has(std::string_view attribute) const {
  return Count(attribute) > 0;
}

std::string MeaningRepresentation::ValueOf(std::string_view attribute) const {
  for (const Slot& s : slots) {
    if (s.attribute == attribute) return s.value;
  }
  return {};
}

std::size_t MeaningRepresentation::Count(std::string_view attribute) const {
  return static_cast<std::size_t>(
      std::count_if(slots.begin(), slots.end(),
                    [&](const Slot& s) { return s.attribute == attribute; }));
}

void Canonicalize(MeaningRepresentation* mr, const DomainSchema& schema) {
  std::stable_sort(mr->slots.begin(), mr->slots.end(),
                   [&](const Slot& a, const Slot& b) {
                     return schema.AttributeIndexOrThrow(a.attribute) <
                            schema.AttributeIndexOrThrow(b.attribute);
                   });
}

void ValidateMr(const MeaningRepresentation& mr, const DomainSchema& schema) {
  const DialogueActDef& act = schema.Act(mr.act);
  std::map<std::string, int> counts;
  for (const Slot& s : mr.slots) {
    const std::size_t idx = schema.AttributeIndexOrThrow(s.attribute);
    if (!schema.IsAllowed(act, s.attribute)) {
      throw SchemaError("attribute '" + s.attribute + "' not allowed for act '" +
                        act.name + "'");
    }
    const auto& values = schema.attributes()[idx].values;
    if (std::find(values.begin(), values.end(), s.value) == values.end()) {
      throw SchemaError("value '" + s.value + "' not in vocabulary of '" +
                        s.attribute + "'");
    }
    if (++counts[s.attribute] > act.max_repeat) {
      throw SchemaError("attribute '" + s.attribute + "' repeated in act '" +
                        act.name + "'");
    }
  }
  for (const std::string& r : act.required) {
    if (counts[r] == 0) {
      throw SchemaError("act '" + act.name + "' requires attribute '" + r + "'");
    }
  }
}

bool IsValidMr(const MeaningRepresentation& mr, const DomainSchema& schema) {
  try {
    ValidateMr(mr, schema);
    return true;
  } catch (const Error&) {
    return false;
  }
}

MeaningRepresentation ParseMr(std::string_view text, const DomainSchema& schema,
                              std::size_t line) {
  std::string_view body = Trim(text);
  MeaningRepresentation mr;
  // An act prefix is present when '(' occurs before the first '['.
  const std::size_t paren = body.find('(');
  const std::size_t bracket = body.find('[');
  if (paren != std::string_view::npos &&
      (bracket == std::string_view::npos || paren < bracket)) {
    if (body.back() != ')') throw ParseError("unbalanced parenthesis in MR", line);
    const std::string act_name(Trim(body.substr(0, paren)));
    if (act_name.empty()) throw ParseError("empty dialogue act", line);
    const DialogueActDef* act = schema.FindAct(act_name);
    if (act == nullptr) {
      throw SchemaError((line ? "line " + std::to_string(line) + ": " : "") +
                        "unknown dialogue act '" + act_name + "'");
    }
    mr.act = act->name;
    body = Trim(body.substr(paren + 1, body.size() - paren - 2));
  } else {
    mr.act = schema.DefaultAct().name;
  }

  std::size_t pos = 0;
  while (pos < body.size()) {
    const std::size_t open = body.find('[', pos);
    if (open == std::string_view::npos) {
      if (!Trim(body.substr(pos)).empty()) {
        throw ParseError("trailing text in MR: '" +
                             std::string(Trim(body.substr(pos))) + "'",
                         line);
      }
      break;
    }
    const std::size_t close = body.find(']', open);
    if (close == std::string_view::npos) {
      throw ParseError("missing ']' in MR", line);
    }
    std::string_view attr = Trim(body.substr(pos, open - pos));
    if (!attr.empty() && attr.front() == ',') attr = Trim(attr.substr(1));
    if (attr.empty()) throw ParseError("slot without attribute name", line);
    if (attr.find_first_of(",[]()") != std::string_view::npos) {
      throw ParseError("malformed attribute '" + std::string(attr) + "'", line);
    }
    const std::string_view value = Trim(body.substr(open + 1, close - open - 1));
    const auto idx = schema.AttributeIndex(attr);
    if (!idx) {
      throw SchemaError((line ? "line " + std::to_string(line) + ": " : "") +
                        "unknown attribute '" + std::string(attr) + "'");
    }
    const auto canon = schema.CanonicalValue(*idx, value);
    if (!canon) {
      throw SchemaError((line ? "line " + std::to_string(line) + ": " : "") +
                        "value '" + std::string(value) +
                        "' not in vocabulary of '" + std::string(attr) + "'");
    }
    mr.slots.push_back({std::string(attr), *canon});
    pos = close + 1;
    const std::size_t next = body.find_first_not_of(" \t", pos);
    if (next != std::string_view::npos && body[next] != ',') {
      throw ParseError("expected ',' between slots", line);
    }
    if (next != std::string_view::npos) pos = next + 1;
  }
  Canonicalize(&mr, schema);
  try {
    ValidateMr(mr, schema);
  } catch (const SchemaError& e) {
    throw SchemaError((line ? "line " + std::to_string(line) + ": " : "") +
                      e.what());
  }
  return mr;
}

std::string SerializeMr(const MeaningRepresentation& mr) {
  std::string out = mr.act + "(";
  for (std::size_t i = 0; i < mr.slots.size(); ++i) {
    if (i > 0) out += ", ";
    out += mr.slots[i].attribute + "[" + mr.slots[i].value + "]";
  }
  out += ")";
  return out;
}

}  // namespace selfgen
