#include "selfgen/corpus/normalize.h"

#include <fstream>
#include <regex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "selfgen/corpus/tokenizer.h"
#include "selfgen/errors.h"

namespace selfgen {
namespace {

void CheckValue(const DomainSchema& schema, const std::string& attr,
                const std::string& value) {
  const auto idx = schema.AttributeIndex(attr);
  if (!idx) throw ConfigError("normalization rule names unknown attribute '" + attr + "'");
  if (!schema.CanonicalValue(*idx, value)) {
    throw ConfigError("normalization rule value '" + value +
                      "' not in vocabulary of '" + attr + "'");
  }
}

}  // namespace

bool MentionsNumericAmount(const std::vector<std::string>& tokens) {
  for (const std::string& t : tokens) {
    if (t == "\xC2\xA3") return true;
    for (char c : t) {
      if (c >= '0' && c <= '9') return true;
    }
  }
  return false;
}

NormalizationConfig NormalizationConfig::FromJsonText(std::string_view text,
                                                      const DomainSchema& schema) {
  NormalizationConfig cfg;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    for (const auto& a : j.value("amend", nlohmann::json::array())) {
      AmendRule r{a.at("attribute").get<std::string>(),
                  a.at("value").get<std::string>(),
                  a.at("trigger").get<std::string>()};
      CheckValue(schema, r.attribute, r.value);
      r.value = *schema.CanonicalValue(*schema.AttributeIndex(r.attribute), r.value);
      try {
        std::regex probe(r.trigger);
      } catch (const std::regex_error&) {
        throw ConfigError("bad trigger pattern '" + r.trigger + "'");
      }
      cfg.amend.push_back(std::move(r));
    }
    for (const auto& m : j.value("remap", nlohmann::json::array())) {
      RemapRule r{m.at("attribute").get<std::string>(),
                  m.at("from").get<std::string>(), m.at("to").get<std::string>(),
                  m.value("when", "numeric") == "numeric",
                  m.value("evidence", "")};
      if (!r.evidence.empty()) {
        try {
          std::regex probe(r.evidence);
        } catch (const std::regex_error&) {
          throw ConfigError("bad evidence pattern '" + r.evidence + "'");
        }
      }
      const std::string when = m.value("when", "numeric");
      if (when != "numeric" && when != "not-numeric") {
        throw ConfigError("remap 'when' must be numeric or not-numeric");
      }
      CheckValue(schema, r.attribute, r.from);
      CheckValue(schema, r.attribute, r.to);
      const std::size_t idx = *schema.AttributeIndex(r.attribute);
      r.from = *schema.CanonicalValue(idx, r.from);
      r.to = *schema.CanonicalValue(idx, r.to);
      cfg.remap.push_back(r);
      if (m.value("symmetric", false)) {
        cfg.remap.push_back({r.attribute, r.to, r.from, !r.when_numeric, r.evidence});
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed normalization config: ") + e.what());
  }
  return cfg;
}

NormalizationConfig NormalizationConfig::LoadFile(const std::string& path,
                                                  const DomainSchema& schema) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open normalization config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return FromJsonText(buf.str(), schema);
}

NormalizationResult NormalizeDataset(const Dataset& ds,
                                     const NormalizationConfig& rules) {
  NormalizationResult result{ds, {}};
  if (ds.split == Split::kTest) return result;

  std::vector<std::regex> triggers;
  for (const AmendRule& r : rules.amend) triggers.emplace_back(r.trigger);

  for (std::size_t i = 0; i < result.dataset.examples.size(); ++i) {
    Example& ex = result.dataset.examples[i];
    const std::string before = SerializeMr(ex.mr);
    std::string fired;
    for (std::size_t r = 0; r < rules.amend.size(); ++r) {
      const AmendRule& rule = rules.amend[r];
      if (ex.mr.Has(rule.attribute)) continue;
      bool match = false;
      for (const Utterance& u : ex.refs) {
        match = match || std::regex_search(Detokenize(u.tokens), triggers[r]);
      }
      if (match) {
        ex.mr.slots.push_back({rule.attribute, rule.value});
        Canonicalize(&ex.mr, ds.schema);
        fired += (fired.empty() ? "" : "+") + ("amend:" + rule.attribute);
      }
    }
    // Each slot is remapped at most once so symmetric pairs cannot undo
    // each other.
    for (Slot& slot : ex.mr.slots) {
      for (const RemapRule& rule : rules.remap) {
        if (slot.attribute != rule.attribute || slot.value != rule.from) continue;
        bool numeric = false;
        for (const Utterance& u : ex.refs) {
          numeric = numeric ||
                    (rule.evidence.empty()
                         ? MentionsNumericAmount(u.tokens)
                         : std::regex_search(Detokenize(u.tokens),
                                             std::regex(rule.evidence)));
        }
        if (numeric == rule.when_numeric) {
          slot.value = rule.to;
          fired += (fired.empty() ? "" : "+") + ("remap:" + rule.attribute);
          break;
        }
      }
    }
    if (!fired.empty()) {
      result.edits.push_back({i, before, SerializeMr(ex.mr), fired});
    }
  }
  return result;
}

}  // namespace selfgen
