#include <doctest.h>

#include "tonalign/errors.hpp"
#include "tonalign/rational.hpp"
#include "tonalign/utf8.hpp"

using namespace tonalign;

TEST_CASE("rational parsing and canonical form") {
    CHECK(parse_rational("3/2") == Rational(3, 2));
    CHECK(parse_rational("1") == Rational(1));
    CHECK(parse_rational("1/1") == Rational(1));
    CHECK(parse_rational("2/4") == Rational(1, 2));
    CHECK(parse_rational("-1/2") == Rational(-1, 2));
    CHECK(to_string(Rational(3, 2)) == "3/2");
    CHECK(to_string(Rational(4, 2)) == "2");
    CHECK_THROWS_AS(parse_rational(""), ParseError);
    CHECK_THROWS_AS(parse_rational("a/b"), ParseError);
    CHECK_THROWS_AS(parse_rational("1/0"), ParseError);
}

TEST_CASE("rational arithmetic and ordering") {
    CHECK(Rational(1, 4) + Rational(1, 4) == Rational(1, 2));
    CHECK(Rational(3, 2) - Rational(1, 2) == Rational(1));
    CHECK(Rational(1, 3) < Rational(1, 2));
    CHECK(Rational(0).is_zero());
    CHECK(Rational(-1, 4).is_negative());
    // normalization keeps the denominator positive
    CHECK(Rational(1, -2) == Rational(-1, 2));
}

TEST_CASE("utf8 splitting") {
    const auto chars = utf8_chars("你好a");
    REQUIRE(chars.size() == 3);
    CHECK(chars[0] == "你");
    CHECK(chars[1] == "好");
    CHECK(chars[2] == "a");
    CHECK(utf8_chars("").empty());
    CHECK_THROWS_AS(utf8_chars("\xff"), ParseError);
    CHECK_THROWS_AS(utf8_chars(std::string_view("\xe4\xbd", 2)), ParseError);
}

TEST_CASE("punctuation tokens") {
    CHECK(is_punctuation_token("，"));
    CHECK(is_punctuation_token("。"));
    CHECK(is_punctuation_token("！"));
    CHECK(is_punctuation_token(","));
    CHECK(is_punctuation_token("."));
    CHECK(!is_punctuation_token("你"));
    CHECK(!is_punctuation_token("a"));
    CHECK(!is_punctuation_token("</s>"));
}

TEST_CASE("whitespace splitting") {
    const auto words = split_whitespace("  How a-  bout love?\t");
    REQUIRE(words.size() == 4);
    CHECK(words[0] == "How");
    CHECK(words[3] == "love?");
}
