#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "grantmatch/text.hpp"

namespace text = grantmatch::text;

TEST(Normalize, CasefoldsTrimsAndCollapsesWhitespace) {
    EXPECT_EQ(text::normalize("  Machine \t Learning\n"), "machine learning");
    EXPECT_EQ(text::normalize("ROBOT"), "robot");
    EXPECT_EQ(text::normalize("Straße"), "strasse");
    EXPECT_EQ(text::normalize(""), "");
    EXPECT_EQ(text::normalize(" 　 "), "");
}

TEST(Normalize, ComposesToNfc) {
    // "e" + COMBINING ACUTE -> U+00E9
    EXPECT_EQ(text::normalize("Caf\x65\xCC\x81"), "caf\xC3\xA9");
    EXPECT_EQ(text::normalize("CAF\xC3\x89"), "caf\xC3\xA9");
}

TEST(Normalize, IsIdempotentOnRandomStrings) {
    const std::vector<std::string> alphabet{
        "a", "Z", " ", "\t", "\n", "\xC3\x89", "e\xCC\x81", "\xE1\xBA\x9E", "\xC3\x9F", "\xEF\xAC\x80",
        "\xE3\x80\x80", "\xCE\xA3", "\xCF\x82", "\xE6\xA9\x9F", "\xE3\x82\xAB", "\xE3\x82\x99", "\xCC\xA8",
        "I", "\xC4\xB0", "-", "1"};
    std::mt19937 rng(7);
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::uniform_int_distribution<int> len(0, 12);
    for (int trial = 0; trial < 2000; ++trial) {
        std::string s;
        for (int i = len(rng); i > 0; --i) s += alphabet[pick(rng)];
        const auto once = text::normalize(s);
        ASSERT_EQ(text::normalize(once), once) << "input: " << s;
    }
}

TEST(UnicodeWords, SkipsPunctuationAndSpaces) {
    EXPECT_EQ(text::unicode_words("Robot robot ROBOT."), (std::vector<std::string>{"Robot", "robot", "ROBOT"}));
    EXPECT_EQ(text::unicode_words("item1, item2; don't"), (std::vector<std::string>{"item1", "item2", "don't"}));
    EXPECT_TRUE(text::unicode_words(" ... !! ").empty());
}

TEST(Utf8, Validation) {
    EXPECT_TRUE(text::is_valid_utf8("plain \xE6\xA9\x9F"));
    EXPECT_FALSE(text::is_valid_utf8("\xC3"));
    EXPECT_FALSE(text::is_valid_utf8("\xFF\xFE"));
    EXPECT_EQ(text::codepoint_length("\xE6\xA9\x9F" "ab"), 3u);
    EXPECT_EQ(text::encode_utf8(0x3042), "\xE3\x81\x82");
}
