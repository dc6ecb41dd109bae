#include "selfgen/corpus/tokenizer.h"

#include <gtest/gtest.h>

namespace selfgen {
namespace {

using Tokens = std::vector<std::string>;

TEST(TokenizerTest, LowercasesAndSplitsPunctuation) {
  EXPECT_EQ(Tokenize("The Eagle is a pub, near Burger King."),
            (Tokens{"the", "eagle", "is", "a", "pub", ",", "near", "burger", "king", "."}));
}

TEST(TokenizerTest, SeparatesPoundSign) {
  EXPECT_EQ(Tokenize("less than £20"), (Tokens{"less", "than", "£", "20"}));
  EXPECT_EQ(Tokenize("£20-25"), (Tokens{"£", "20-25"}));
}

TEST(TokenizerTest, KeepsNumbersApostrophesAndHyphens) {
  EXPECT_EQ(Tokenize("It's 1.5 kid-friendly"), (Tokens{"it's", "1.5", "kid-friendly"}));
  EXPECT_EQ(Tokenize("laptop -s"), (Tokens{"laptop", "-s"}));
}

TEST(TokenizerTest, PlaceholdersKeepTheirCase) {
  EXPECT_EQ(Tokenize("NAME is near NEAR_2."), (Tokens{"NAME", "is", "near", "NEAR_2", "."}));
  EXPECT_EQ(Tokenize("A pub"), (Tokens{"a", "pub"}));
}

TEST(TokenizerTest, CollapsesWhitespace) {
  EXPECT_EQ(Tokenize("  a   pub \t here "), (Tokens{"a", "pub", "here"}));
  EXPECT_TRUE(Tokenize("   ").empty());
}

TEST(TokenizerTest, DetokenizeOfTokenizeIsIdempotent) {
  for (const char* text : {"The Eagle is a pub, near Burger King.",
                           "It costs less than £20 (cheap)!", "NAME is family-friendly."}) {
    const std::string once = Detokenize(Tokenize(text));
    EXPECT_EQ(Detokenize(Tokenize(once)), once) << text;
  }
  EXPECT_EQ(Detokenize(Tokenize("A pub.")), "a pub .");
}

TEST(TokenizerTest, Classification) {
  EXPECT_TRUE(IsPunctuationToken("."));
  EXPECT_TRUE(IsPunctuationToken(","));
  EXPECT_FALSE(IsPunctuationToken("pub"));
  EXPECT_TRUE(IsSentenceTerminal("!"));
  EXPECT_FALSE(IsSentenceTerminal(","));
  EXPECT_TRUE(IsPlaceholderToken("NAME"));
  EXPECT_TRUE(IsPlaceholderToken("NAME_1"));
  EXPECT_FALSE(IsPlaceholderToken("name"));
}

}  // namespace
}  // namespace selfgen
