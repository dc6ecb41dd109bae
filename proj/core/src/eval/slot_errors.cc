#include "selfgen/eval/slot_errors.h"

#include <algorithm>
#include <iomanip>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "selfgen/errors.h"

namespace selfgen {
namespace {

std::string ColumnTitle(const AttributeDef& def) {
  std::string t;
  for (char c : def.label.empty() ? def.name : def.label) {
    if (c != ' ') t += c;
  }
  return t;
}

std::vector<std::string> ReportOrder(const DomainSchema& schema) {
  if (!schema.report_order().empty()) return schema.report_order();
  std::vector<std::string> order;
  for (const AttributeDef& def : schema.attributes()) order.push_back(def.name);
  return order;
}

}  // namespace

std::string SlotErrorKindName(SlotErrorKind kind) {
  switch (kind) {
    case SlotErrorKind::kMissing: return "missing";
    case SlotErrorKind::kWrong: return "wrong";
    case SlotErrorKind::kHallucinated: return "hallucinated";
  }
  return "?";
}

const AttributeSlotErrors* SlotErrorReport::Find(const std::string& attribute) const {
  for (const AttributeSlotErrors& a : attributes) {
    if (a.attribute == attribute) return &a;
  }
  return nullptr;
}

SlotErrorReport SlotErrors(const std::vector<GeneratedOutput>& outputs, const RulePack& pack) {
  if (outputs.empty()) throw ContractError("slot errors need at least one output");
  const DomainSchema& schema = pack.schema();
  SlotErrorReport report;
  std::map<std::string, std::size_t> column;
  for (const std::string& name : ReportOrder(schema)) {
    column[name] = report.attributes.size();
    report.attributes.push_back({name, ColumnTitle(schema.Attribute(name))});
  }

  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const GeneratedOutput& out = outputs[i];
    const ParseOutcome parsed =
        RuleParse(out.utt, pack, out.bindings.empty() ? nullptr : &out.bindings);
    for (AttributeSlotErrors& col : report.attributes) {
      std::vector<std::string> expected;
      for (const Slot& s : out.mr.slots) {
        if (s.attribute == col.attribute) expected.push_back(s.value);
      }
      std::vector<std::string> found;
      if (const AttributeEvidence* ev = parsed.Evidence(col.attribute)) found = ev->values;
      // Remove matched values from both sides.
      for (auto it = expected.begin(); it != expected.end();) {
        auto f = std::find(found.begin(), found.end(), *it);
        if (f == found.end()) {
          ++it;
        } else {
          found.erase(f);
          it = expected.erase(it);
        }
      }
      const bool in_mr = out.mr.Has(col.attribute);
      std::size_t e = 0;
      for (const std::string& v : found) {
        const SlotErrorKind kind = in_mr ? SlotErrorKind::kWrong : SlotErrorKind::kHallucinated;
        const std::string exp = e < expected.size() ? expected[e] : "";
        if (in_mr && e < expected.size()) ++e;
        report.details.push_back({i, col.attribute, kind, exp, v});
        (in_mr ? col.wrong : col.hallucinated)++;
      }
      for (; e < expected.size(); ++e) {
        report.details.push_back({i, col.attribute, SlotErrorKind::kMissing, expected[e], ""});
        ++col.missing;
      }
    }
  }
  report.items = outputs.size();
  for (const AttributeSlotErrors& a : report.attributes) report.total += a.total();
  return report;
}

std::string SlotErrorReport::ToTable() const {
  std::vector<std::string> head{""};
  for (const AttributeSlotErrors& a : attributes) head.push_back(a.label);
  head.push_back("All");
  auto row = [&](const std::string& name, auto get) {
    std::vector<std::string> r{name};
    std::size_t all = 0;
    for (const AttributeSlotErrors& a : attributes) {
      r.push_back(std::to_string(get(a)));
      all += get(a);
    }
    r.push_back(std::to_string(all));
    return r;
  };
  std::vector<std::vector<std::string>> rows{
      head,
      row("missing", [](const AttributeSlotErrors& a) { return a.missing; }),
      row("wrong", [](const AttributeSlotErrors& a) { return a.wrong; }),
      row("hallucinated", [](const AttributeSlotErrors& a) { return a.hallucinated; }),
      row("total", [](const AttributeSlotErrors& a) { return a.total(); })};
  std::vector<std::size_t> width(head.size(), 0);
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  }
  std::ostringstream os;
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c == 0) {
        os << std::left << std::setw(static_cast<int>(width[c])) << r[c];
      } else {
        os << "  " << std::right << std::setw(static_cast<int>(width[c])) << r[c];
      }
    }
    os << "\n";
  }
  return os.str();
}

std::string SlotErrorReport::ToJsonText() const {
  nlohmann::json j;
  j["items"] = items;
  j["total"] = total;
  j["attributes"] = nlohmann::json::array();
  for (const AttributeSlotErrors& a : attributes) {
    j["attributes"].push_back({{"attribute", a.attribute},
                               {"label", a.label},
                               {"missing", a.missing},
                               {"wrong", a.wrong},
                               {"hallucinated", a.hallucinated},
                               {"total", a.total()}});
  }
  j["details"] = nlohmann::json::array();
  for (const SlotErrorDetail& d : details) {
    j["details"].push_back({{"item", d.item},
                            {"attribute", d.attribute},
                            {"kind", SlotErrorKindName(d.kind)},
                            {"expected", d.expected},
                            {"found", d.found}});
  }
  return j.dump(2) + "\n";
}

QualityReport Quality(const std::vector<TokenSeq>& hyps,
                      const std::vector<std::vector<TokenSeq>>& refs,
                      const std::vector<Utterance>& outputs) {
  QualityReport q;
  q.bleu = CorpusBleu(hyps, refs);
  q.surface = ComputeSurfaceStats(outputs);
  return q;
}

std::string QualityReport::ToText() const {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << "BLEU               " << bleu << "\n";
  os << "words/utterance    " << surface.mean_words << "\n";
  os << "sentences/utt      " << surface.mean_sentences << "\n";
  os << "items              " << surface.items << "\n";
  os << "not computed:";
  for (const std::string& m : omitted) os << " " << m;
  os << "\n";
  return os.str();
}

std::string QualityReport::ToJsonText() const {
  nlohmann::json j;
  j["bleu"] = bleu;
  j["mean_words"] = surface.mean_words;
  j["mean_sentences"] = surface.mean_sentences;
  j["items"] = surface.items;
  j["omitted_metrics"] = omitted;
  return j.dump(2) + "\n";
}

}  // namespace selfgen
