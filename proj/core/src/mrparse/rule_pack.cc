#include "selfgen/mrparse/rule_pack.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "selfgen/corpus/tokenizer.h"
#include "selfgen/errors.h"

namespace selfgen {
namespace {

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool IsCaptureRef(const std::string& value) {
  return value.size() >= 2 && value[0] == '$' &&
         std::all_of(value.begin() + 1, value.end(), ::isdigit);
}

struct Match {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string value;
  std::string span;
};

// Drops matches lying strictly inside a longer match of the same attribute
// ("family friendly" inside "not family friendly").
std::vector<Match> DropSubsumed(std::vector<Match> matches) {
  std::vector<Match> out;
  for (std::size_t i = 0; i < matches.size(); ++i) {
    bool inside = false;
    for (std::size_t j = 0; j < matches.size() && !inside; ++j) {
      if (i == j) continue;
      const Match& a = matches[i];
      const Match& b = matches[j];
      inside = b.begin <= a.begin && a.end <= b.end &&
               (b.end - b.begin) > (a.end - a.begin);
    }
    if (!inside) out.push_back(matches[i]);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Match& a, const Match& b) { return a.begin < b.begin; });
  return out;
}

bool IsPlaceholderFor(const std::string& token, const std::string& placeholder) {
  if (placeholder.empty()) return false;
  if (token == placeholder) return true;
  if (token.size() <= placeholder.size() + 1 ||
      token.compare(0, placeholder.size(), placeholder) != 0 ||
      token[placeholder.size()] != '_') {
    return false;
  }
  return std::all_of(token.begin() + placeholder.size() + 1, token.end(), ::isdigit);
}

}  // namespace

RulePack RulePack::FromText(std::string_view text, const DomainSchema& schema) {
  RulePack pack;
  pack.schema_ = schema;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line = 0;
  enum class Section { kNone, kAttribute, kAct } section = Section::kNone;
  AttributeRules* current = nullptr;
  std::size_t current_index = 0;
  std::map<std::string, std::size_t> seen;

  while (std::getline(in, raw)) {
    ++line;
    std::string s = Trim(raw);
    if (s.empty() || s[0] == '#') continue;
    if (s.front() == '[' && s.back() == ']') {
      std::istringstream head(s.substr(1, s.size() - 2));
      std::string kind, name, extra;
      head >> kind >> name >> extra;
      if (kind == "act" && name.empty()) {
        section = Section::kAct;
        current = nullptr;
      } else if (kind == "attribute" && !name.empty() && extra.empty()) {
        current_index = schema.AttributeIndexOrThrow(name);
        if (seen.count(name)) throw ParseError("duplicate section for " + name, line);
        seen[name] = pack.attributes_.size();
        pack.attributes_.push_back(AttributeRules{name, {}, false, false});
        current = &pack.attributes_.back();
        section = Section::kAttribute;
      } else {
        throw ParseError("bad section header '" + s + "'", line);
      }
      continue;
    }
    if (section == Section::kNone) throw ParseError("rule outside a section", line);
    if (s[0] == '@') {
      if (section != Section::kAttribute) {
        throw ParseError("directives belong to attribute sections", line);
      }
      const AttributeDef& def = schema.attributes()[current_index];
      if (s == "@literal") {
        current->literal = true;
      } else if (s == "@placeholder") {
        if (!def.delexicalized || def.placeholder.empty()) {
          throw SchemaError("attribute '" + def.name + "' is not delexicalized");
        }
        current->placeholder = true;
      } else {
        throw ParseError("unknown directive '" + s + "'", line);
      }
      continue;
    }
    const auto arrow = s.rfind(" => ");
    if (arrow == std::string::npos) throw ParseError("expected 'pattern => value'", line);
    RulePattern rule;
    rule.source = Trim(std::string_view(s).substr(0, arrow));
    rule.value = Trim(std::string_view(s).substr(arrow + 4));
    if (rule.source.empty() || rule.value.empty()) {
      throw ParseError("empty pattern or value", line);
    }
    try {
      rule.regex = std::regex(rule.source, std::regex::ECMAScript | std::regex::optimize);
    } catch (const std::regex_error& e) {
      throw ParseError("bad pattern '" + rule.source + "': " + e.what(), line);
    }
    if (section == Section::kAct) {
      if (schema.FindAct(rule.value) == nullptr) {
        throw SchemaError("unknown dialogue act '" + rule.value + "'");
      }
      pack.act_cues_.push_back(std::move(rule));
    } else {
      if (!IsCaptureRef(rule.value)) {
        auto canon = schema.CanonicalValue(current_index, rule.value);
        if (!canon) {
          throw SchemaError("value '" + rule.value + "' is not in the vocabulary of " +
                            current->attribute);
        }
        rule.value = *canon;
      } else if (std::stoul(rule.value.substr(1)) > rule.regex.mark_count()) {
        throw ParseError("capture " + rule.value + " exceeds the pattern's groups", line);
      }
      current->patterns.push_back(std::move(rule));
    }
  }
  return pack;
}

RulePack RulePack::LoadFile(const std::string& path, const DomainSchema& schema) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open rule pack " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return FromText(buf.str(), schema);
}

const AttributeRules* RulePack::Find(std::string_view attribute) const {
  for (const AttributeRules& a : attributes_) {
    if (a.attribute == attribute) return &a;
  }
  return nullptr;
}

const AttributeEvidence* ParseOutcome::Evidence(std::string_view attribute) const {
  for (const AttributeEvidence& e : evidence) {
    if (e.attribute == attribute) return &e;
  }
  return nullptr;
}

ParseOutcome RuleParse(const Utterance& utt, const RulePack& pack,
                       const DelexMapping* bindings) {
  const DomainSchema& schema = pack.schema();
  ParseOutcome out;

  std::string text;
  std::vector<std::size_t> starts;
  for (const std::string& t : utt.tokens) {
    if (!text.empty()) text += ' ';
    starts.push_back(text.size());
    text += t;
  }

  std::map<std::string, std::vector<Match>> found;
  std::string masked = text;

  // Vocabulary literals first; their spans are hidden from the patterns.
  for (const AttributeRules& rules : pack.attributes()) {
    if (!rules.literal) continue;
    const AttributeDef& def = schema.Attribute(rules.attribute);
    std::vector<Match> matches;
    for (const std::string& value : def.values) {
      const std::vector<std::string> needle = Tokenize(value);
      if (needle.empty() || needle.size() > utt.tokens.size()) continue;
      for (std::size_t i = 0; i + needle.size() <= utt.tokens.size(); ++i) {
        if (!std::equal(needle.begin(), needle.end(), utt.tokens.begin() + i)) continue;
        const std::size_t last = i + needle.size() - 1;
        Match m;
        m.begin = starts[i];
        m.end = starts[last] + utt.tokens[last].size();
        m.value = value;
        m.span = text.substr(m.begin, m.end - m.begin);
        matches.push_back(std::move(m));
      }
    }
    for (const Match& m : matches) {
      std::fill(masked.begin() + m.begin, masked.begin() + m.end, '_');
    }
    auto& dst = found[rules.attribute];
    dst.insert(dst.end(), matches.begin(), matches.end());
  }

  for (const AttributeRules& rules : pack.attributes()) {
    const std::size_t index = schema.AttributeIndexOrThrow(rules.attribute);
    const AttributeDef& def = schema.attributes()[index];
    auto& matches = found[rules.attribute];
    for (const RulePattern& rule : rules.patterns) {
      for (auto it = std::sregex_iterator(masked.begin(), masked.end(), rule.regex);
           it != std::sregex_iterator(); ++it) {
        const std::smatch& sm = *it;
        if (sm.length(0) == 0) continue;
        Match m;
        m.begin = static_cast<std::size_t>(sm.position(0));
        m.end = m.begin + static_cast<std::size_t>(sm.length(0));
        m.span = sm.str(0);
        if (IsCaptureRef(rule.value)) {
          auto canon = schema.CanonicalValue(index, sm.str(std::stoul(rule.value.substr(1))));
          if (!canon) continue;
          m.value = *canon;
        } else {
          m.value = rule.value;
        }
        matches.push_back(std::move(m));
      }
    }
    if (rules.placeholder) {
      for (std::size_t i = 0; i < utt.tokens.size(); ++i) {
        if (!IsPlaceholderFor(utt.tokens[i], def.placeholder)) continue;
        Match m;
        m.begin = starts[i];
        m.end = starts[i] + utt.tokens[i].size();
        m.span = utt.tokens[i];
        const DelexEntry* b = bindings ? FindBinding(*bindings, utt.tokens[i]) : nullptr;
        if (b != nullptr && b->attribute == def.name) {
          m.value = b->value;
        } else {
          m.value = utt.tokens[i];
          if (out.reason.empty()) out.reason = "unbound placeholder " + utt.tokens[i];
        }
        matches.push_back(std::move(m));
      }
    }
  }

  // Evidence in canonical attribute order.
  for (const AttributeDef& def : schema.attributes()) {
    auto it = found.find(def.name);
    if (it == found.end() || it->second.empty()) continue;
    AttributeEvidence ev;
    ev.attribute = def.name;
    for (const Match& m : DropSubsumed(it->second)) {
      if (std::find(ev.values.begin(), ev.values.end(), m.value) == ev.values.end()) {
        ev.values.push_back(m.value);
      }
      ev.spans.push_back(m.span);
    }
    out.evidence.push_back(std::move(ev));
  }

  // Dialogue act.
  if (schema.style() == LinearizationStyle::kFixedPosition) {
    out.act = schema.DefaultAct().name;
  } else {
    std::vector<std::string> acts;
    for (const RulePattern& cue : pack.act_cues()) {
      if (std::regex_search(masked, cue.regex) &&
          std::find(acts.begin(), acts.end(), cue.value) == acts.end()) {
        acts.push_back(cue.value);
      }
    }
    if (acts.size() == 1) {
      out.act = acts.front();
    } else if (out.reason.empty()) {
      out.reason = acts.empty() ? "no dialogue act cue" : "conflicting dialogue act cues";
    }
  }
  if (!out.reason.empty()) return out;

  const DialogueActDef& act = schema.Act(out.act);
  MeaningRepresentation mr;
  mr.act = out.act;
  for (const AttributeEvidence& ev : out.evidence) {
    if (static_cast<int>(ev.values.size()) > act.max_repeat) {
      out.reason = "conflicting values for " + ev.attribute;
      return out;
    }
    for (const std::string& v : ev.values) mr.slots.push_back({ev.attribute, v});
  }
  Canonicalize(&mr, schema);
  try {
    ValidateMr(mr, schema);
  } catch (const SchemaError& e) {
    out.reason = e.what();
    return out;
  }
  out.valid = true;
  out.mr = std::move(mr);
  return out;
}

std::vector<Slot> EvidenceSlots(const ParseOutcome& outcome) {
  std::vector<Slot> slots;
  for (const AttributeEvidence& ev : outcome.evidence) {
    for (const std::string& v : ev.values) slots.push_back({ev.attribute, v});
  }
  return slots;
}

bool SameMr(const MeaningRepresentation& a, const MeaningRepresentation& b) {
  if (a.act != b.act) return false;
  std::vector<Slot> x = a.slots;
  std::vector<Slot> y = b.slots;
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  return x == y;
}

}  // namespace selfgen
