#include "selfgen/selftrain/sampling.h"

#include <algorithm>

#include "selfgen/errors.h"

namespace selfgen {
namespace {

// Uniform k-subset of `pool` (partial Fisher-Yates), in draw order.
template <typename T>
std::vector<T> DrawWithoutReplacement(std::vector<T> pool, std::size_t k, RngStream& rng) {
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(pool[i], pool[i + rng.Below(pool.size() - i)]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace

AttributeFrequencyTable AttributeFrequencyTable::Build(const Dataset& ds) {
  AttributeFrequencyTable t;
  for (const Example& ex : ds.examples) {
    for (const Slot& s : ex.mr.slots) ++t.counts_[s.attribute][s.value];
  }
  return t;
}

std::size_t AttributeFrequencyTable::Count(const std::string& attribute,
                                           const std::string& value) const {
  auto a = counts_.find(attribute);
  if (a == counts_.end()) return 0;
  auto v = a->second.find(value);
  return v == a->second.end() ? 0 : v->second;
}

std::vector<double> AttributeFrequencyTable::InverseWeights(const AttributeDef& def) const {
  std::vector<double> w;
  double total = 0.0;
  for (const std::string& v : def.values) {
    w.push_back(1.0 / static_cast<double>(std::max<std::size_t>(Count(def.name, v), 1)));
    total += w.back();
  }
  for (double& x : w) x /= total;
  return w;
}

std::string AttributeFrequencyTable::SampleValue(const AttributeDef& def, RngStream& rng) const {
  const std::vector<double> w = InverseWeights(def);
  const double u = rng.Uniform();
  double cum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    cum += w[i];
    if (u < cum) return def.values[i];
  }
  return def.values.back();
}

MeaningRepresentation SampleE2eMr(const DomainSchema& schema, std::size_t size,
                                  const AttributeFrequencyTable& freq, RngStream& rng) {
  const DialogueActDef& act = schema.DefaultAct();
  const std::size_t n = schema.attributes().size();
  if (size < act.required.size() + 1 || size > n) {
    throw ConfigError("MR size " + std::to_string(size) + " outside [" +
                      std::to_string(act.required.size() + 1) + ", " + std::to_string(n) + "]");
  }
  std::vector<std::size_t> others;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& name = schema.attributes()[i].name;
    if (std::find(act.required.begin(), act.required.end(), name) == act.required.end()) {
      others.push_back(i);
    }
  }
  std::vector<std::size_t> chosen =
      DrawWithoutReplacement(others, size - act.required.size(), rng);
  for (const std::string& r : act.required) chosen.push_back(schema.AttributeIndexOrThrow(r));
  std::sort(chosen.begin(), chosen.end());
  MeaningRepresentation mr{act.name, {}};
  for (std::size_t i : chosen) {
    const AttributeDef& def = schema.attributes()[i];
    mr.slots.push_back({def.name, freq.SampleValue(def, rng)});
  }
  return mr;
}

LegalityTable LegalityTable::Build(const Dataset& ds) {
  LegalityTable t;
  for (const Example& ex : ds.examples) t.sizes_[ex.mr.act].insert(ex.mr.slots.size());
  return t;
}

bool LegalityTable::IsLegal(const std::string& act, std::size_t size) const {
  auto it = sizes_.find(act);
  return it != sizes_.end() && it->second.count(size) > 0;
}

MeaningRepresentation SampleDaMr(const DomainSchema& schema, const std::string& act_name,
                                 std::size_t size, const LegalityTable& legal, RngStream& rng) {
  if (!legal.IsLegal(act_name, size)) {
    throw ConfigError("no training MR has act '" + act_name + "' with " +
                      std::to_string(size) + " slot(s)");
  }
  const DialogueActDef& act = schema.Act(act_name);
  if (size < act.required.size()) throw ConfigError("size below the act's required slots");
  std::vector<std::string> pool;
  for (const AttributeDef& def : schema.attributes()) {
    if (!schema.IsAllowed(act, def.name)) continue;
    int copies = act.max_repeat;
    if (std::find(act.required.begin(), act.required.end(), def.name) != act.required.end()) {
      --copies;
    }
    for (int c = 0; c < copies; ++c) pool.push_back(def.name);
  }
  const std::size_t extra = size - act.required.size();
  if (extra > pool.size()) throw ConfigError("act '" + act_name + "' cannot hold that many slots");
  std::vector<std::string> attrs = act.required;
  for (const std::string& a : DrawWithoutReplacement(pool, extra, rng)) attrs.push_back(a);

  MeaningRepresentation mr{act.name, {}};
  std::map<std::string, std::vector<std::string>> used;
  for (const std::string& a : attrs) {
    const AttributeDef& def = schema.Attribute(a);
    std::vector<std::string> options;
    for (const std::string& v : def.values) {
      if (std::find(used[a].begin(), used[a].end(), v) == used[a].end()) options.push_back(v);
    }
    if (options.empty()) options = def.values;
    const std::string v = options[rng.Below(options.size())];
    used[a].push_back(v);
    mr.slots.push_back({a, v});
  }
  Canonicalize(&mr, schema);
  ValidateMr(mr, schema);
  return mr;
}

}  // namespace selfgen
