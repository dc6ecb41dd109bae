// selfgen: command-line front end for the self-training pipeline.
//
// Exit codes: 0 success, 1 validation failure, 2 usage or configuration
// error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "selfgen/corpus/dataset.h"
#include "selfgen/corpus/mr.h"
#include "selfgen/corpus/tokenizer.h"
#include "selfgen/decode/decode.h"
#include "selfgen/errors.h"
#include "selfgen/eval/slot_errors.h"
#include "selfgen/mrparse/classifier.h"
#include "selfgen/mrparse/parser.h"
#include "selfgen/pipeline/config.h"
#include "selfgen/pipeline/pipeline.h"
#include "selfgen/selftrain/augment.h"
#include "selfgen/seq2seq/model.h"

namespace fs = std::filesystem;
using namespace selfgen;

namespace {

constexpr int kOk = 0;
constexpr int kValidationFailure = 1;
constexpr int kUsageError = 2;

// Thrown to end a command with a validation-failure exit code.
struct ValidationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string config;
  std::vector<std::string> sets;
  std::string output_dir;
  std::optional<std::size_t> workers;
  std::optional<std::uint64_t> seed;
  // Flag-specific overrides filled in by each subcommand.
  std::vector<std::pair<std::string, std::string>> flags;
};

void AddCommon(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("-c,--config", o.config, "pipeline config (JSON)");
  cmd->add_option("--set", o.sets, "override a config key, e.g. --set train.lr=0.5")
      ->type_name("KEY=VALUE");
  cmd->add_option("-o,--output-dir", o.output_dir, "directory for outputs");
  cmd->add_option("--workers", o.workers, "worker threads for decoding and sampling");
  cmd->add_option("--seed", o.seed, "seed for training, sampling and decoding");
}

PipelineConfig ResolveConfig(const CommonOptions& o) {
  std::vector<std::pair<std::string, std::string>> overrides;
  for (const std::string& s : o.sets) {
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("--set expects KEY=VALUE, got '" + s + "'");
    }
    overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  // Dedicated flags win over --set.
  for (const auto& f : o.flags) overrides.push_back(f);
  if (!o.output_dir.empty()) overrides.emplace_back("output_dir", o.output_dir);
  if (o.workers) overrides.emplace_back("workers", std::to_string(*o.workers));
  if (o.seed) {
    for (const char* k : {"train.seed", "selftrain.seed", "decode.seed", "classifier.seed"}) {
      overrides.emplace_back(k, std::to_string(*o.seed));
    }
  }
  if (o.config.empty()) {
    return PipelineConfig::FromJsonText("", fs::current_path().string(), overrides);
  }
  return PipelineConfig::LoadFile(o.config, overrides);
}

std::string Prepare(const PipelineConfig& cfg, const std::string& command) {
  fs::create_directories(cfg.output_dir);
  const std::string path = (fs::path(cfg.output_dir) / (command + ".config.json")).string();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << cfg.ToJsonText();
  return cfg.output_dir;
}

std::string OutPath(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

std::vector<std::string> ReadLines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

void WriteExamples(const std::string& path, const Dataset& ds) {
  if (ds.schema.style() == LinearizationStyle::kFixedPosition) {
    WriteE2eCorpus(path, ds.examples);
    return;
  }
  nlohmann::json j = nlohmann::json::array();
  for (const Example& ex : ds.examples) {
    nlohmann::json refs = nlohmann::json::array();
    for (const Utterance& u : ex.refs) refs.push_back(u.raw);
    j.push_back({{"mr", SerializeMr(ex.mr)}, {"refs", refs}});
  }
  WriteText(path, j.dump(1) + "\n");
}

std::string CorpusExtension(const DomainSchema& schema) {
  return schema.style() == LinearizationStyle::kFixedPosition ? ".csv" : ".json";
}

void WriteEvaluation(const std::string& dir, const std::string& stem, const ModelEvaluation& ev) {
  WriteText(OutPath(dir, stem + "_slot_errors.txt"), ev.slots.ToTable());
  WriteText(OutPath(dir, stem + "_slot_errors.json"), ev.slots.ToJsonText());
  WriteText(OutPath(dir, stem + "_quality.txt"), ev.quality.ToText());
  WriteText(OutPath(dir, stem + "_quality.json"), ev.quality.ToJsonText());
  std::ostringstream outs;
  for (const GeneratedOutput& o : ev.outputs) outs << o.utt.raw << "\n";
  WriteText(OutPath(dir, stem + "_outputs.txt"), outs.str());
}

// ---- ingest ----

int CmdIngest(const CommonOptions& o) {
  const PipelineConfig cfg = ResolveConfig(o);
  const std::string dir = Prepare(cfg, "ingest");
  const PipelineData data = LoadPipelineData(cfg, &std::cerr);
  const std::string ext = CorpusExtension(data.schema);
  nlohmann::json report;
  report["schema"] = data.schema.name();
  report["normalization_edits"] = data.normalization_edits;
  for (const Dataset* ds : {&data.train, &data.valid, &data.test}) {
    const std::string name = ds == &data.train ? "train" : ds == &data.valid ? "valid" : "test";
    if (ds->examples.empty()) continue;
    WriteExamples(OutPath(dir, name + ext), *ds);
    report["splits"][name] = {{"examples", ds->examples.size()},
                              {"distinct_mrs", GroupByMr(ds->examples).size()},
                              {"references", ds->NumReferences()}};
  }
  WriteText(OutPath(dir, "ingest_report.json"), report.dump(2) + "\n");
  std::cout << report.dump(2) << "\n";
  return kOk;
}

// ---- train ----

int CmdTrain(const CommonOptions& o) {
  const PipelineConfig cfg = ResolveConfig(o);
  const std::string dir = Prepare(cfg, "train");
  const PipelineData data = LoadPipelineData(cfg, &std::cerr);
  std::ofstream log(OutPath(dir, "p0_log.jsonl"), std::ios::binary);
  const TrainResult r = TrainGenerator(cfg, data.train, data.valid, cfg.train.epochs, &log);
  const std::string ckpt = OutPath(dir, "p0.ckpt");
  r.model.Save(ckpt);
  std::cerr << "best epoch " << r.best_epoch << ", validation BLEU " << r.best_bleu << "\n";
  std::cout << ckpt << "\n";
  return kOk;
}

// ---- decode ----

struct DecodeArgs {
  std::string checkpoint;
  std::string mrs;
  std::string out;
  std::string samples;
};

int CmdDecode(const CommonOptions& o, const DecodeArgs& a) {
  const PipelineConfig cfg = ResolveConfig(o);
  const std::string dir = Prepare(cfg, "decode");
  if (cfg.data.schema.empty()) throw ConfigError("decode needs data.schema");
  const DomainSchema schema = DomainSchema::LoadFile(cfg.data.schema);
  const Seq2SeqModel model = Seq2SeqModel::Load(a.checkpoint);
  const std::vector<std::string> lines = ReadLines(a.mrs);
  const std::string out_path = a.out.empty() ? OutPath(dir, "decoded.txt") : a.out;
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw Error("cannot write '" + out_path + "'");
  std::optional<std::ofstream> dump;
  if (!a.samples.empty()) dump.emplace(a.samples, std::ios::binary);

  std::size_t bad = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    MeaningRepresentation mr;
    try {
      mr = ParseMr(lines[i], schema);
      ValidateMr(mr, schema);
    } catch (const Error& e) {
      std::cerr << a.mrs << ":" << i + 1 << ": " << e.what() << "\n";
      out << "\n";
      ++bad;
      continue;
    }
    const std::vector<DecodedSample> samples = DecodeMr(model, mr, schema, cfg.decode, i);
    out << (samples.empty() ? "" : Detokenize(samples.front().tokens)) << "\n";
    if (dump) {
      for (const DecodedSample& s : samples) {
        *dump << SampleDumpLine(SerializeMr(mr), Detokenize(s.tokens), s, cfg.decode.sigma0,
                                cfg.decode.seed)
              << "\n";
      }
    }
  }
  std::cout << out_path << "\n";
  if (bad > 0) throw ValidationFailure(std::to_string(bad) + " invalid MR line(s)");
  return kOk;
}

// ---- parse ----

struct ParseArgs {
  std::string input;
  std::string classifier;
  std::string out;
};

int CmdParse(const CommonOptions& o, const ParseArgs& a) {
  const PipelineConfig cfg = ResolveConfig(o);
  const std::string dir = Prepare(cfg, "parse");
  const PipelineData data = LoadPipelineData(cfg, &std::cerr);
  std::optional<ClassifierParser> clf;
  std::optional<MrParser> parser;
  if (cfg.selftrain.parser == ParserChoice::kClassifier) {
    if (!a.classifier.empty() && fs::exists(a.classifier)) {
      clf = ClassifierParser::Load(a.classifier);
    } else {
      clf = ClassifierParser::Train(data.train, data.valid, cfg.mode, cfg.classifier, nullptr,
                                    &std::cerr);
      const std::string path = a.classifier.empty() ? OutPath(dir, "classifier.ckpt") : a.classifier;
      clf->Save(path);
      std::cerr << "classifier saved to " << path << "\n";
    }
    parser = MrParser::Classifier(*clf, cfg.selftrain.classifier_threshold);
  } else {
    if (!data.rules) throw ConfigError("the rule parser needs data.rules");
    parser = MrParser::Rules(*data.rules);
  }

  const std::vector<std::string> lines = ReadLines(a.input);
  const std::string out_path = a.out.empty() ? OutPath(dir, "parsed.jsonl") : a.out;
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw Error("cannot write '" + out_path + "'");
  std::size_t valid = 0;
  for (const std::string& line : lines) {
    if (line.empty()) continue;
    const ParseOutcome p = parser->Parse(Utterance::FromText(line));
    nlohmann::json j;
    j["text"] = line;
    j["valid"] = p.valid;
    j["mr"] = p.mr ? nlohmann::json(SerializeMr(*p.mr)) : nlohmann::json(nullptr);
    if (!p.valid) j["reason"] = p.reason;
    out << j.dump() << "\n";
    valid += p.valid;
  }
  std::cerr << valid << " of " << lines.size() << " line(s) parsed to a valid MR\n";
  std::cout << out_path << "\n";
  return kOk;
}

// ---- selftrain ----

struct SelfTrainArgs {
  std::string p0;
};

int CmdSelfTrain(const CommonOptions& o, const SelfTrainArgs& a) {
  const PipelineConfig cfg = ResolveConfig(o);
  if (cfg.selftrain.iterations_per_size == 0) {
    throw ValidationFailure(
        "iterations_per_size is 0, so the augmentation set would be empty; "
        "refusing to train p1");
  }
  const std::string dir = Prepare(cfg, "selftrain");
  const PipelineData data = LoadPipelineData(cfg, &std::cerr);
  cfg.selftrain.Validate(data.schema);
  std::optional<Seq2SeqModel> p0;
  if (!a.p0.empty()) p0 = Seq2SeqModel::Load(a.p0);

  std::ofstream log(OutPath(dir, "selftrain_log.jsonl"), std::ios::binary);
  const SelfTrainRun run = RunSelfTraining(cfg, data, p0, &std::cerr);
  if (!p0) run.p0->model.Save(OutPath(dir, "p0.ckpt"));
  if (run.classifier) run.classifier->Save(OutPath(dir, "classifier.ckpt"));

  const std::string ext = CorpusExtension(data.schema);
  WriteAugmentation(OutPath(dir, "augmentation" + ext), OutPath(dir, "augmentation.provenance.jsonl"),
                    run.augmentation.examples, data.schema);
  nlohmann::json report = nlohmann::json::parse(run.augmentation.report.ToJsonText());
  report["parser"] = std::string(ParserChoiceName(cfg.selftrain.parser));
  report["audit"] = {{"examples", run.audit.examples},
                     {"reparse_mismatches", run.audit.reparse_mismatches},
                     {"duplicate_surfaces", run.audit.duplicate_surfaces},
                     {"training_collisions", run.audit.training_collisions},
                     {"schema_violations", run.audit.schema_violations}};
  WriteText(OutPath(dir, "augmentation_report.json"), report.dump(2) + "\n");

  if (run.before) WriteEvaluation(dir, "p0", *run.before);
  if (!run.p1) {
    throw ValidationFailure("the augmentation set is empty; refusing to train p1");
  }
  run.p1->model.Save(OutPath(dir, "p1.ckpt"));
  for (const EpochRecord& r : run.p1->log) log << EpochRecordJson(r) << "\n";
  if (run.after) WriteEvaluation(dir, "p1", *run.after);

  std::cout << "parser " << ParserChoiceName(cfg.selftrain.parser) << ", augmentation "
            << run.augmentation.examples.size() << " example(s)\n";
  if (run.before && run.after) {
    std::cout << "\np0 slot errors (greedy, test)\n" << run.before->slots.ToTable();
    std::cout << "\np1 slot errors (greedy, test)\n" << run.after->slots.ToTable();
    std::cout << "\nBLEU p0 " << run.before->quality.bleu << "  p1 " << run.after->quality.bleu
              << "\n";
  }
  if (!run.audit.ok()) throw ValidationFailure("augmentation audit failed");
  return kOk;
}

// ---- evaluate ----

struct EvaluateArgs {
  std::string checkpoint;
  std::string outputs;
  std::string references;
};

int CmdEvaluate(const CommonOptions& o, const EvaluateArgs& a) {
  const PipelineConfig cfg = ResolveConfig(o);
  const std::string dir = Prepare(cfg, "evaluate");
  const PipelineData data = LoadPipelineData(cfg, &std::cerr);
  if (!data.rules) throw ConfigError("evaluation needs data.rules");
  const Dataset refs = a.references.empty()
                           ? data.test
                           : LoadCorpusFile(a.references, data.schema, Split::kTest);
  if (refs.examples.empty()) throw ConfigError("no reference corpus (data.test or --references)");

  ModelEvaluation ev;
  if (!a.checkpoint.empty()) {
    ev = EvaluateModel(Seq2SeqModel::Load(a.checkpoint), refs, *data.rules, cfg.workers);
  } else {
    if (a.outputs.empty()) throw ConfigError("evaluate needs --checkpoint or --outputs");
    std::vector<std::string> lines = ReadLines(a.outputs);
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    const std::vector<Example> groups = GroupByMr(refs.examples);
    if (lines.size() != groups.size()) {
      throw ContractError("outputs file has " + std::to_string(lines.size()) +
                          " line(s) but the references have " + std::to_string(groups.size()) +
                          " distinct MR(s)");
    }
    std::vector<TokenSeq> hyps;
    std::vector<std::vector<TokenSeq>> ref_tokens;
    std::vector<Utterance> utts;
    for (std::size_t i = 0; i < groups.size(); ++i) {
      Utterance u = Utterance::FromText(lines[i]);
      ev.outputs.push_back({groups[i].mr, u, {}});
      hyps.push_back(u.tokens);
      ref_tokens.emplace_back();
      for (const Utterance& r : groups[i].refs) ref_tokens.back().push_back(r.tokens);
      utts.push_back(std::move(u));
    }
    ev.slots = SlotErrors(ev.outputs, *data.rules);
    ev.quality = Quality(hyps, ref_tokens, utts);
  }
  WriteEvaluation(dir, "eval", ev);
  std::cout << ev.slots.ToTable() << "\n" << ev.quality.ToText();
  if (cfg.error_budget && ev.slots.total > *cfg.error_budget) {
    throw ValidationFailure("slot errors " + std::to_string(ev.slots.total) +
                            " exceed the budget of " + std::to_string(*cfg.error_budget));
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"selfgen: self-training for data-to-text generation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "selfgen 0.1.0");

  CommonOptions common;
  std::optional<std::size_t> epochs, iterations, retrain_epochs, width, n, k;
  std::optional<double> sigma0, temperature, threshold, budget;
  std::string strategy, parser_choice;
  bool rescore_clean = false;
  DecodeArgs decode_args;
  ParseArgs parse_args;
  SelfTrainArgs st_args;
  EvaluateArgs eval_args;

  CLI::App* ingest = app.add_subcommand("ingest", "load, normalize and re-emit the corpus");
  AddCommon(ingest, common);

  CLI::App* train = app.add_subcommand("train", "train the base generator p0");
  AddCommon(train, common);
  train->add_option("--epochs", epochs, "training epochs");

  CLI::App* decode = app.add_subcommand("decode", "generate utterances for MRs");
  AddCommon(decode, common);
  decode->add_option("--checkpoint", decode_args.checkpoint, "generator checkpoint")->required();
  decode->add_option("--mrs", decode_args.mrs, "file with one MR per line")->required();
  decode->add_option("--out", decode_args.out, "output file (default OUTPUT_DIR/decoded.txt)");
  decode->add_option("--strategy", strategy, "greedy, beam, sample or noise");
  decode->add_option("--width", width, "beam width");
  decode->add_option("--temperature", temperature, "ancestral sampling temperature");
  decode->add_option("--sigma0", sigma0, "noise scale");
  decode->add_option("--n", n, "noise draws per MR");
  decode->add_option("--k", k, "top samples kept per MR");
  decode->add_flag("--rescore-clean", rescore_clean, "score noise samples under the clean model");
  decode->add_option("--samples", decode_args.samples, "JSONL dump of every kept sample");

  CLI::App* parse = app.add_subcommand("parse", "parse utterances back to MRs");
  AddCommon(parse, common);
  parse->add_option("--input", parse_args.input, "file with one utterance per line")->required();
  parse->add_option("--parser", parser_choice, "rules or classifier");
  parse->add_option("--classifier", parse_args.classifier,
                    "classifier checkpoint (trained and saved here when missing)");
  parse->add_option("--threshold", threshold, "classifier confidence threshold");
  parse->add_option("--out", parse_args.out, "output file (default OUTPUT_DIR/parsed.jsonl)");

  CLI::App* selftrain = app.add_subcommand("selftrain", "p0, augmentation, p1 and reports");
  AddCommon(selftrain, common);
  selftrain->add_option("--p0", st_args.p0, "existing p0 checkpoint (trained when omitted)");
  selftrain->add_option("--iterations", iterations, "sampling iterations per MR size");
  selftrain->add_option("--parser", parser_choice, "rules or classifier");
  selftrain->add_option("--sigma0", sigma0, "noise scale");
  selftrain->add_option("--epochs", epochs, "p0 training epochs");
  selftrain->add_option("--retrain-epochs", retrain_epochs, "p1 training epochs");

  CLI::App* evaluate = app.add_subcommand("evaluate", "slot errors, BLEU and surface stats");
  AddCommon(evaluate, common);
  evaluate->add_option("--checkpoint", eval_args.checkpoint, "decode the references greedily");
  evaluate->add_option("--outputs", eval_args.outputs, "one output per distinct reference MR");
  evaluate->add_option("--references", eval_args.references, "reference corpus (default data.test)");
  evaluate->add_option("--budget", budget, "maximum total slot errors");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  auto& f = common.flags;
  if (epochs) f.emplace_back("train.epochs", std::to_string(*epochs));
  if (iterations) f.emplace_back("selftrain.iterations_per_size", std::to_string(*iterations));
  if (retrain_epochs) f.emplace_back("retrain.epochs", std::to_string(*retrain_epochs));
  if (!parser_choice.empty()) f.emplace_back("selftrain.parser", parser_choice);
  if (threshold) f.emplace_back("selftrain.classifier_threshold", std::to_string(*threshold));
  if (budget) f.emplace_back("evaluate.error_budget", std::to_string(static_cast<long long>(*budget)));
  if (!strategy.empty()) f.emplace_back("decode.strategy", strategy);
  if (width) f.emplace_back("decode.width", std::to_string(*width));
  if (temperature) f.emplace_back("decode.temperature", std::to_string(*temperature));
  if (n) f.emplace_back("decode.n", std::to_string(*n));
  if (k) f.emplace_back("decode.k", std::to_string(*k));
  if (rescore_clean) f.emplace_back("decode.rescore_clean", "true");
  if (sigma0) {
    f.emplace_back(selftrain->parsed() ? "selftrain.sigma0" : "decode.sigma0",
                   std::to_string(*sigma0));
  }
  if (n && !k) f.emplace_back("decode.k", std::to_string(*n));

  try {
    if (ingest->parsed()) return CmdIngest(common);
    if (train->parsed()) return CmdTrain(common);
    if (decode->parsed()) return CmdDecode(common, decode_args);
    if (parse->parsed()) return CmdParse(common, parse_args);
    if (selftrain->parsed()) return CmdSelfTrain(common, st_args);
    if (evaluate->parsed()) return CmdEvaluate(common, eval_args);
  } catch (const ValidationFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsageError;
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kUsageError;
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kUsageError;
  } catch (const CheckpointError& e) {
    std::cerr << "checkpoint error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidationFailure;
  }
  return kUsageError;
}
