#include "selfgen/corpus/tokenizer.h"

#include <cctype>

namespace selfgen {
namespace {

constexpr std::string_view kPound = "\xC2\xA3";  // UTF-8 for £
constexpr std::string_view kSplitPunct = ".,!?;:()\"[]{}";

bool IsAsciiDigit(char c) { return c >= '0' && c <= '9'; }
bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

// Splits one whitespace-free chunk into tokens.
void SplitChunk(std::string_view chunk, std::vector<std::string>* out) {
  std::string current;
  auto flush = [&]() {
    if (!current.empty()) {
      out->push_back(std::move(current));
      current.clear();
    }
  };
  for (std::size_t i = 0; i < chunk.size();) {
    if (chunk.substr(i, kPound.size()) == kPound) {
      flush();
      out->emplace_back(kPound);
      i += kPound.size();
      continue;
    }
    const char c = chunk[i];
    if (kSplitPunct.find(c) != std::string_view::npos) {
      const bool numeric_inner = (c == '.' || c == ',') && !current.empty() &&
                                 IsAsciiDigit(current.back()) &&
                                 i + 1 < chunk.size() &&
                                 IsAsciiDigit(chunk[i + 1]);
      if (!numeric_inner) {
        flush();
        out->emplace_back(1, c);
        ++i;
        continue;
      }
    }
    if (c == '\'') {
      // Apostrophes survive only between letters ("don't").
      const bool inner = !current.empty() && i + 1 < chunk.size() &&
                         std::isalpha(static_cast<unsigned char>(chunk[i + 1]));
      if (!inner) {
        flush();
        out->emplace_back(1, c);
        ++i;
        continue;
      }
    }
    current.push_back(c);
    ++i;
  }
  flush();
}

}  // namespace

std::string ToLowerAscii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool IsPlaceholderToken(std::string_view token) {
  int upper = 0;
  for (char c : token) {
    if (c >= 'A' && c <= 'Z') {
      ++upper;
    } else if (!IsAsciiDigit(c) && c != '_') {
      return false;
    }
  }
  return upper >= 2;
}

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> raw;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && IsSpace(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !IsSpace(text[j])) ++j;
    if (j > i) SplitChunk(text.substr(i, j - i), &raw);
    i = j;
  }
  for (std::string& tok : raw) {
    if (!IsPlaceholderToken(tok)) tok = ToLowerAscii(tok);
  }
  return raw;
}

std::string Detokenize(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

bool IsPunctuationToken(std::string_view token) {
  if (token.empty()) return false;
  for (char c : token) {
    if (std::isalnum(static_cast<unsigned char>(c))) return false;
    if (static_cast<unsigned char>(c) >= 0x80) return false;  // £, accents
  }
  return true;
}

bool IsSentenceTerminal(std::string_view token) {
  return token == "." || token == "!" || token == "?";
}

}  // namespace selfgen
