#include "selfgen/pipeline/config.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "selfgen/errors.h"

namespace selfgen {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Reads members of one JSON object and rejects keys nobody asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError("config: '" + path_ + "' must be an object");
  }
  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) {
        throw ConfigError("config: unknown key '" + Key(it.key()) + "'");
      }
    }
  }

  template <typename T>
  void Get(const std::string& key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return;
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!it->is_boolean()) throw ConfigError("");
      } else if constexpr (std::is_unsigned_v<T>) {
        if (!it->is_number_unsigned()) throw ConfigError("");
      }
      out = it->get<T>();
    } catch (const std::exception&) {
      throw ConfigError("config: bad value for '" + Key(key) + "': " + it->dump());
    }
  }

  bool Has(const std::string& key) const { return j_.contains(key); }
  const json& Child(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }
  std::string Key(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string Resolve(const std::string& p, const std::string& base) {
  if (p.empty()) return p;
  fs::path path(p);
  if (path.is_relative()) path = fs::path(base) / path;
  return path.lexically_normal().string();
}

json ParseOverrideValue(const std::string& v) {
  try {
    return json::parse(v);
  } catch (const json::exception&) {
    return v;
  }
}

void ApplyOverride(json& root, const std::string& key, const json& value) {
  json* node = &root;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
    if (part.empty()) throw ConfigError("config: bad override key '" + key + "'");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    if (!node->contains(part)) (*node)[part] = json::object();
    node = &(*node)[part];
    if (!node->is_object()) throw ConfigError("config: '" + key + "' is not an object path");
    start = dot + 1;
  }
}

}  // namespace

std::string DecodeStrategyName(DecodeStrategy s) {
  switch (s) {
    case DecodeStrategy::kGreedy: return "greedy";
    case DecodeStrategy::kBeam: return "beam";
    case DecodeStrategy::kSample: return "sample";
    case DecodeStrategy::kNoise: return "noise";
  }
  return "greedy";
}

DecodeStrategy ParseDecodeStrategy(const std::string& name) {
  if (name == "greedy") return DecodeStrategy::kGreedy;
  if (name == "beam") return DecodeStrategy::kBeam;
  if (name == "sample") return DecodeStrategy::kSample;
  if (name == "noise") return DecodeStrategy::kNoise;
  throw ConfigError("unknown decode strategy '" + name + "' (greedy, beam, sample, noise)");
}

PipelineConfig PipelineConfig::FromJsonText(
    const std::string& text, const std::string& base_dir,
    const std::vector<std::pair<std::string, std::string>>& overrides) {
  json root;
  try {
    root = text.empty() ? json::object() : json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: top level must be an object");
  const std::string cwd = fs::current_path().string();
  // Paths in the file are relative to the file; paths given as overrides are
  // relative to the working directory.
  if (root.contains("data") && root["data"].is_object()) {
    for (auto& [k, v] : root["data"].items()) {
      if (v.is_string()) v = Resolve(v.get<std::string>(), base_dir);
    }
  }
  for (const auto& [key, raw] : overrides) {
    json value = ParseOverrideValue(raw);
    if ((key.rfind("data.", 0) == 0 || key == "output_dir") && value.is_string()) {
      value = Resolve(raw, cwd);
    }
    ApplyOverride(root, key, value);
  }

  PipelineConfig c;
  {
    Section top(root, "");
    if (top.Has("data")) {
      Section d(top.Child("data"), "data");
      d.Get("schema", c.data.schema);
      d.Get("train", c.data.train);
      d.Get("valid", c.data.valid);
      d.Get("test", c.data.test);
      d.Get("rules", c.data.rules);
      d.Get("normalization", c.data.normalization);
    }
    std::string mode = std::string(InputModeName(c.mode));
    top.Get("mode", mode);
    c.mode = ParseInputMode(mode);
    top.Get("output_dir", c.output_dir);
    c.output_dir = Resolve(c.output_dir, cwd);
    top.Get("workers", c.workers);
    if (top.Has("model")) {
      Section m(top.Child("model"), "model");
      m.Get("embed_dim", c.model.embed_dim);
      m.Get("hidden_dim", c.model.hidden_dim);
      m.Get("layers", c.model.layers);
      m.Get("dropout", c.model.dropout);
      m.Get("max_decode_length", c.model.max_decode_length);
      m.Get("init_scale", c.model.init_scale);
    }
    if (top.Has("train")) {
      Section t(top.Child("train"), "train");
      t.Get("epochs", c.train.epochs);
      t.Get("batch_size", c.train.batch_size);
      t.Get("lr", c.train.lr);
      t.Get("weight_decay", c.train.weight_decay);
      t.Get("seed", c.train.seed);
      t.Get("max_grad_norm", c.train.max_grad_norm);
    }
    if (top.Has("retrain")) {
      Section r(top.Child("retrain"), "retrain");
      r.Get("epochs", c.retrain_epochs);
    }
    if (top.Has("selftrain")) {
      Section s(top.Child("selftrain"), "selftrain");
      SelfTrainConfig& st = c.selftrain;
      s.Get("iterations_per_size", st.iterations_per_size);
      s.Get("samples_per_mr", st.samples_per_mr);
      s.Get("keep_k", st.keep_k);
      s.Get("sigma0", st.sigma0);
      s.Get("rescore_clean", st.rescore_clean);
      s.Get("min_size", st.min_size);
      s.Get("max_size", st.max_size);
      std::string parser(ParserChoiceName(st.parser));
      s.Get("parser", parser);
      st.parser = ParseParserChoice(parser);
      s.Get("classifier_threshold", st.classifier_threshold);
      s.Get("seed", st.seed);
      s.Get("dedup_against_training", st.dedup_against_training);
      s.Get("dedup_within_run", st.dedup_within_run);
    }
    if (top.Has("classifier")) {
      Section s(top.Child("classifier"), "classifier");
      ClassifierConfig& cc = c.classifier;
      s.Get("embed_dim", cc.embed_dim);
      s.Get("filters", cc.filters);
      s.Get("widths", cc.widths);
      s.Get("hidden_dim", cc.hidden_dim);
      s.Get("dropout", cc.dropout);
      s.Get("epochs", cc.epochs);
      s.Get("lr", cc.lr);
      s.Get("weight_decay", cc.weight_decay);
      s.Get("batch_size", cc.batch_size);
      s.Get("init_scale", cc.init_scale);
      s.Get("min_token_count", cc.min_token_count);
      s.Get("seed", cc.seed);
    }
    if (top.Has("decode")) {
      Section s(top.Child("decode"), "decode");
      DecodeOptions& d = c.decode;
      std::string strategy = DecodeStrategyName(d.strategy);
      s.Get("strategy", strategy);
      d.strategy = ParseDecodeStrategy(strategy);
      s.Get("width", d.width);
      s.Get("temperature", d.temperature);
      s.Get("sigma0", d.sigma0);
      s.Get("rescore_clean", d.rescore_clean);
      s.Get("n", d.n);
      s.Get("k", d.k);
      s.Get("seed", d.seed);
    }
    if (top.Has("evaluate")) {
      Section s(top.Child("evaluate"), "evaluate");
      if (s.Has("error_budget")) {
        const bool unset = root["evaluate"]["error_budget"].is_null();
        std::size_t budget = 0;
        s.Get("error_budget", budget);
        if (!unset) c.error_budget = budget;
      }
    }
  }
  c.train.workers = c.workers;
  c.selftrain.workers = c.workers;
  c.Validate();
  return c;
}

PipelineConfig PipelineConfig::LoadFile(
    const std::string& path, const std::vector<std::pair<std::string, std::string>>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string base = fs::absolute(fs::path(path)).parent_path().string();
  return FromJsonText(ss.str(), base, overrides);
}

void PipelineConfig::Validate() const {
  if (workers == 0) throw ConfigError("workers must be >= 1");
  model.Validate();
  train.Validate();
  classifier.Validate();
  if (decode.width == 0) throw ConfigError("decode.width must be >= 1");
  if (decode.n == 0 || decode.k == 0 || decode.k > decode.n) {
    throw ConfigError("decode needs 1 <= k <= n");
  }
  if (decode.sigma0 < 0.0) throw ConfigError("decode.sigma0 must be >= 0");
  if (!(decode.temperature > 0.0)) throw ConfigError("decode.temperature must be > 0");
}

std::string PipelineConfig::ToJsonText() const {
  json j;
  j["data"] = {{"schema", data.schema}, {"train", data.train},
               {"valid", data.valid},   {"test", data.test},
               {"rules", data.rules},   {"normalization", data.normalization}};
  j["mode"] = std::string(InputModeName(mode));
  j["output_dir"] = output_dir;
  j["workers"] = workers;
  j["model"] = {{"embed_dim", model.embed_dim},
                {"hidden_dim", model.hidden_dim},
                {"layers", model.layers},
                {"dropout", model.dropout},
                {"max_decode_length", model.max_decode_length},
                {"init_scale", model.init_scale}};
  j["train"] = {{"epochs", train.epochs},
                {"batch_size", train.batch_size},
                {"lr", train.lr},
                {"weight_decay", train.weight_decay},
                {"seed", train.seed},
                {"max_grad_norm", train.max_grad_norm}};
  j["retrain"] = {{"epochs", retrain_epochs}};
  j["selftrain"] = {{"iterations_per_size", selftrain.iterations_per_size},
                    {"samples_per_mr", selftrain.samples_per_mr},
                    {"keep_k", selftrain.keep_k},
                    {"sigma0", selftrain.sigma0},
                    {"rescore_clean", selftrain.rescore_clean},
                    {"min_size", selftrain.min_size},
                    {"max_size", selftrain.max_size},
                    {"parser", std::string(ParserChoiceName(selftrain.parser))},
                    {"classifier_threshold", selftrain.classifier_threshold},
                    {"seed", selftrain.seed},
                    {"dedup_against_training", selftrain.dedup_against_training},
                    {"dedup_within_run", selftrain.dedup_within_run}};
  j["classifier"] = {{"embed_dim", classifier.embed_dim},
                     {"filters", classifier.filters},
                     {"widths", classifier.widths},
                     {"hidden_dim", classifier.hidden_dim},
                     {"dropout", classifier.dropout},
                     {"epochs", classifier.epochs},
                     {"lr", classifier.lr},
                     {"weight_decay", classifier.weight_decay},
                     {"batch_size", classifier.batch_size},
                     {"init_scale", classifier.init_scale},
                     {"min_token_count", classifier.min_token_count},
                     {"seed", classifier.seed}};
  j["decode"] = {{"strategy", DecodeStrategyName(decode.strategy)},
                 {"width", decode.width},
                 {"temperature", decode.temperature},
                 {"sigma0", decode.sigma0},
                 {"rescore_clean", decode.rescore_clean},
                 {"n", decode.n},
                 {"k", decode.k},
                 {"seed", decode.seed}};
  j["evaluate"] = {{"error_budget", error_budget ? json(*error_budget) : json(nullptr)}};
  return j.dump(2) + "\n";
}

}  // namespace selfgen
