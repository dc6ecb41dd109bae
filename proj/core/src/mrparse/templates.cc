#include "selfgen/mrparse/templates.h"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "selfgen/errors.h"

namespace selfgen {

TemplateSet TemplateSet::FromJsonText(std::string_view text, const DomainSchema& schema) {
  if (schema.style() != LinearizationStyle::kFixedPosition) {
    throw ConfigError("templates are defined for fixed-position domains only");
  }
  TemplateSet t;
  t.schema_ = schema;
  try {
    const auto j = nlohmann::json::parse(text);
    t.subject_ = j.at("subject").get<std::string>();
    schema.AttributeIndexOrThrow(t.subject_);
    for (const auto& [attr, by_value] : j.at("phrases").items()) {
      const std::size_t index = schema.AttributeIndexOrThrow(attr);
      if (attr == t.subject_) throw ConfigError("the subject attribute takes no phrases");
      for (const auto& [value, phrase] : by_value.items()) {
        auto canon = schema.CanonicalValue(index, value);
        if (!canon) throw SchemaError("template value '" + value + "' not in " + attr);
        t.phrases_[attr][*canon] = phrase.get<std::string>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed templates: ") + e.what());
  }
  for (const AttributeDef& def : schema.attributes()) {
    if (def.name == t.subject_) continue;
    for (const std::string& v : def.values) {
      if (!t.phrases_[def.name].count(v)) {
        throw ConfigError("no template for " + def.name + "[" + v + "]");
      }
    }
  }
  return t;
}

TemplateSet TemplateSet::LoadFile(const std::string& path, const DomainSchema& schema) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open templates '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return FromJsonText(buf.str(), schema);
}

Utterance TemplateSet::Expand(const MeaningRepresentation& mr) const {
  const std::string subject = mr.ValueOf(subject_);
  if (subject.empty()) throw ContractError("template MR lacks " + subject_);
  MeaningRepresentation canon = mr;
  Canonicalize(&canon, schema_);
  std::vector<std::string> clauses;
  for (const Slot& s : canon.slots) {
    if (s.attribute == subject_) continue;
    clauses.push_back(phrases_.at(s.attribute).at(s.value));
  }
  std::string text = subject + " ";
  if (clauses.empty()) {
    text += "is a place to eat";
  } else {
    for (std::size_t i = 0; i < clauses.size(); ++i) {
      if (i > 0) text += i + 1 == clauses.size() ? " and " : ", ";
      text += clauses[i];
    }
  }
  return Utterance::FromText(text + " .");
}

std::vector<Example> ExhaustiveTemplateCorpus(const TemplateSet& templates) {
  const DomainSchema& schema = templates.schema();
  const AttributeDef& subject = schema.Attribute(templates.subject());
  const std::string act = schema.DefaultAct().name;
  std::vector<Example> out;
  for (const std::string& v : subject.values) {
    MeaningRepresentation mr{act, {{subject.name, v}}};
    out.push_back({mr, {templates.Expand(mr)}});
  }
  for (const AttributeDef& def : schema.attributes()) {
    if (def.name == subject.name) continue;
    for (const std::string& v : def.values) {
      MeaningRepresentation mr{act, {{subject.name, subject.values.front()}, {def.name, v}}};
      Canonicalize(&mr, schema);
      out.push_back({mr, {templates.Expand(mr)}});
    }
  }
  return out;
}

}  // namespace selfgen
