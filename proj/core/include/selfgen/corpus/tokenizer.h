#ifndef SELFGEN_CORPUS_TOKENIZER_H_
#define SELFGEN_CORPUS_TOKENIZER_H_

#include <string>
#include <string_view>
#include <vector>

namespace selfgen {

// Lowercases ASCII letters and splits punctuation into standalone tokens.
// The pound sign is split off ("£20" -> "£ 20"). Periods and commas between
// digits stay inside the number ("2.3"). Hyphens and apostrophes inside a
// word are kept, and a leading hyphen is kept ("laptop -s").
// Tokens made entirely of uppercase letters, digits and underscores that
// contain at least two uppercase letters are placeholders (NAME, NEAR_2) and
// keep their case.
std::vector<std::string> Tokenize(std::string_view text);

// Joins tokens with single spaces.
std::string Detokenize(const std::vector<std::string>& tokens);

bool IsPunctuationToken(std::string_view token);

// True for ".", "!" and "?".
bool IsSentenceTerminal(std::string_view token);

bool IsPlaceholderToken(std::string_view token);

std::string ToLowerAscii(std::string_view s);

}  // namespace selfgen

#endif  // SELFGEN_CORPUS_TOKENIZER_H_
