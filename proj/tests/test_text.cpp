#include <gtest/gtest.h>

#include <emoshot/detail/io.hpp>
#include <emoshot/stopwords.hpp>
#include <emoshot/text.hpp>

#include "support.hpp"

using namespace emoshot;

using Tokens = std::vector<std::string>;

TEST(Tokenize, PunctuationAndCase) { EXPECT_EQ(tokenize("Good movie!"), (Tokens{"good", "movie"})); }

TEST(Tokenize, AllStopWords) { EXPECT_TRUE(tokenize("The of and").empty()); }

TEST(Tokenize, KeepStopWordsOnRequest) {
  EXPECT_EQ(tokenize("The of and", false), (Tokens{"the", "of", "and"}));
}

TEST(Tokenize, EmoticonAndContraction) { EXPECT_EQ(tokenize("I'm SO happy :)"), (Tokens{"happy"})); }

TEST(Tokenize, InvalidUtf8DoesNotThrow) {
  EXPECT_EQ(tokenize(std::string("bad\xff\xfe" "byte")), (Tokens{"bad", "byte"}));
  EXPECT_EQ(tokenize(std::string("tail\xe2\x82")), (Tokens{"tail"}));
}

TEST(StopWords, ListSizeAndMembership) {
  EXPECT_EQ(kEnglishStopWords.size(), 179u);
  EXPECT_TRUE(is_stop_word("the"));
  EXPECT_TRUE(is_stop_word("mustn't"));
  EXPECT_FALSE(is_stop_word("happy"));
}

// tests/golden/tokenize.tsv: input <TAB> space-joined expected tokens.
TEST(Tokenize, GoldenFile) {
  auto in = detail::open_input(std::string(EMOSHOT_GOLDEN_DIR) + "/tokenize.tsv");
  std::string line;
  std::size_t checked = 0;
  while (detail::read_line(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto fields = detail::split(line, '\t');
    ASSERT_EQ(fields.size(), 2u) << line;
    Tokens expected;
    for (auto t : detail::split_ws(fields[1])) expected.emplace_back(t);
    EXPECT_EQ(tokenize(fields[0]), expected) << fields[0];
    ++checked;
  }
  EXPECT_GE(checked, 10u);
}
