#include "selfgen/corpus/dataset.h"

#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "selfgen/corpus/tokenizer.h"
#include "selfgen/errors.h"

namespace selfgen {
namespace {

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open corpus file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Splits one CSV record. Returns false when the line is blank.
bool SplitCsvLine(std::string_view line, std::size_t line_no,
                  std::vector<std::string>* fields) {
  fields->clear();
  if (line.find_first_not_of(" \t\r") == std::string_view::npos) return false;
  std::size_t i = 0;
  while (true) {
    std::string field;
    while (i < line.size() && line[i] == ' ') ++i;
    if (i < line.size() && line[i] == '"') {
      ++i;
      bool closed = false;
      while (i < line.size()) {
        if (line[i] == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            field.push_back('"');
            i += 2;
            continue;
          }
          closed = true;
          ++i;
          break;
        }
        field.push_back(line[i++]);
      }
      if (!closed) throw ParseError("unterminated quoted field", line_no);
      while (i < line.size() && (line[i] == ' ' || line[i] == '\r')) ++i;
      if (i < line.size() && line[i] != ',') {
        throw ParseError("unexpected text after quoted field", line_no);
      }
    } else {
      while (i < line.size() && line[i] != ',') field.push_back(line[i++]);
      while (!field.empty() && (field.back() == '\r' || field.back() == ' '))
        field.pop_back();
    }
    fields->push_back(std::move(field));
    if (i >= line.size()) break;
    ++i;  // comma
  }
  return true;
}

std::string QuoteCsv(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

// "inform(name='x';type=laptop)" -> "inform(name[x], type[laptop])".
std::string ConvertLegacyDa(std::string_view da) {
  if (da.find('[') != std::string_view::npos ||
      da.find('=') == std::string_view::npos) {
    return std::string(da);
  }
  const std::size_t open = da.find('(');
  const std::size_t close = da.rfind(')');
  if (open == std::string_view::npos || close == std::string_view::npos) {
    return std::string(da);
  }
  std::string out(da.substr(0, open + 1));
  std::string_view body = da.substr(open + 1, close - open - 1);
  bool first = true;
  while (!body.empty()) {
    const std::size_t semi = body.find(';');
    std::string_view item = body.substr(0, semi);
    const std::size_t eq = item.find('=');
    std::string attr(item.substr(0, eq));
    std::string value = eq == std::string_view::npos ? "" : std::string(item.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '\'' && value.back() == '\'') {
      value = value.substr(1, value.size() - 2);
    }
    if (!first) out += ", ";
    out += attr + "[" + value + "]";
    first = false;
    if (semi == std::string_view::npos) break;
    body.remove_prefix(semi + 1);
  }
  out += ")";
  return out;
}

}  // namespace

std::string_view SplitName(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kValid:
      return "valid";
    case Split::kTest:
      return "test";
  }
  return "train";
}

Split ParseSplit(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "valid") return Split::kValid;
  if (name == "test") return Split::kTest;
  throw ConfigError("unknown split '" + std::string(name) + "'");
}

Utterance Utterance::FromText(std::string_view text) {
  return Utterance{std::string(text), Tokenize(text)};
}

Utterance Utterance::FromTokens(std::vector<std::string> tokens) {
  Utterance u;
  u.raw = Detokenize(tokens);
  u.tokens = std::move(tokens);
  return u;
}

std::size_t Dataset::NumReferences() const {
  std::size_t n = 0;
  for (const Example& e : examples) n += e.refs.size();
  return n;
}

Dataset ParseE2eCorpus(std::string_view text, const DomainSchema& schema,
                       Split split) {
  Dataset ds{schema, {}, split};
  std::size_t line_no = 0;
  std::size_t start = 0;
  std::vector<std::string> fields;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line_no == 1 && line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);
    if (!SplitCsvLine(line, line_no, &fields)) continue;
    if (fields.size() != 2) {
      throw ParseError("expected 2 fields (mr, ref), got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    if (ds.examples.empty() && line_no == 1 && ToLowerAscii(fields[0]) == "mr") {
      continue;
    }
    Example ex;
    ex.mr = ParseMr(fields[0], schema, line_no);
    ex.refs.push_back(Utterance::FromText(fields[1]));
    if (ex.refs.back().tokens.empty()) {
      throw ParseError("empty reference", line_no);
    }
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

Dataset LoadE2eCorpus(const std::string& path, const DomainSchema& schema,
                      Split split) {
  return ParseE2eCorpus(ReadFile(path), schema, split);
}

std::string FormatE2eCorpus(const std::vector<Example>& examples) {
  std::string out = "mr,ref\n";
  for (const Example& ex : examples) {
    const std::string mr = QuoteCsv(SerializeMr(ex.mr));
    for (const Utterance& u : ex.refs) {
      out += mr + "," + QuoteCsv(u.raw) + "\n";
    }
  }
  return out;
}

void WriteE2eCorpus(const std::string& path, const std::vector<Example>& examples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write corpus file '" + path + "'");
  out << FormatE2eCorpus(examples);
}

Dataset ParseDaCorpus(std::string_view text, const DomainSchema& schema,
                      Split split) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("corpus is not valid JSON: ") + e.what());
  }
  if (!j.is_array()) throw ParseError("corpus must be a JSON array of records");
  Dataset ds{schema, {}, split};
  std::size_t record = 0;
  for (const auto& r : j) {
    ++record;
    std::string da;
    std::vector<std::string> refs;
    try {
      if (r.is_array()) {
        if (r.size() < 2) throw ParseError("record needs a DA and a reference", record);
        da = r[0].get<std::string>();
        for (std::size_t i = 1; i < r.size(); ++i) refs.push_back(r[i].get<std::string>());
      } else {
        da = r.at("mr").get<std::string>();
        refs = r.at("refs").get<std::vector<std::string>>();
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("malformed record: ") + e.what(), record);
    }
    Example ex;
    ex.mr = ParseMr(ConvertLegacyDa(da), schema, record);
    for (const auto& ref : refs) ex.refs.push_back(Utterance::FromText(ref));
    if (ex.refs.empty()) throw ParseError("record without references", record);
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

Dataset LoadDaCorpus(const std::string& path, const DomainSchema& schema,
                     Split split) {
  return ParseDaCorpus(ReadFile(path), schema, split);
}

std::vector<Example> GroupByMr(const std::vector<Example>& examples) {
  std::vector<Example> out;
  std::map<MeaningRepresentation, std::size_t> index;
  for (const Example& ex : examples) {
    auto [it, inserted] = index.emplace(ex.mr, out.size());
    if (inserted) {
      out.push_back(ex);
    } else {
      auto& refs = out[it->second].refs;
      refs.insert(refs.end(), ex.refs.begin(), ex.refs.end());
    }
  }
  return out;
}

}  // namespace selfgen
