#include <doctest.h>

#include <random>
#include <sstream>

#include "support/test_support.hpp"
#include "tonalign/errors.hpp"
#include "tonalign/segmentation.hpp"
#include "tonalign/utf8.hpp"

using namespace tonalign;

TEST_CASE("forward maximum match") {
    const SegLexicon lex = SegLexicon::from_words({"你好"});

    auto spans = segment(utf8_chars("你好"), lex);
    CHECK(spans == std::vector<WordSpan>{{0, 2}});

    spans = segment(utf8_chars("你好吗"), lex);  // longest match first, then singles
    CHECK(spans == std::vector<WordSpan>{{0, 2}, {2, 3}});

    const SegLexicon empty;
    spans = segment(utf8_chars("好吗"), empty);
    CHECK(spans == std::vector<WordSpan>{{0, 1}, {1, 2}});
}

TEST_CASE("longest dictionary word wins") {
    const SegLexicon lex = SegLexicon::from_words({"天空", "天空海"});
    const auto spans = segment(utf8_chars("天空海洋"), lex);
    CHECK(spans == std::vector<WordSpan>{{0, 3}, {3, 4}});
}

TEST_CASE("lexicon loading skips comments and blanks") {
    std::istringstream in("# words\n你好\n\n天空\n");
    const SegLexicon lex = SegLexicon::load(in);
    CHECK(lex.size() == 2);
    CHECK(lex.contains("你好"));
    CHECK(lex.max_word_chars() == 2);
}

TEST_CASE("boundary probability") {
    const SegLexicon lex = SegLexicon::from_words({"你好"});
    const auto nihao = utf8_chars("你好");
    CHECK(boundary_prob(nihao, 1, lex, 0.01) == 0.01);  // inside the word

    const SegLexicon empty;
    CHECK(boundary_prob(utf8_chars("好吗"), 1, empty, 0.01) == 1.0);

    CHECK_THROWS_AS(boundary_prob(nihao, 0, lex, 0.01), Error);
    CHECK_THROWS_AS(boundary_prob(nihao, 2, lex, 0.01), Error);
}

TEST_CASE("removing the covering word can only raise the boundary probability") {
    const SegLexicon with_word = SegLexicon::from_words({"你好"});
    const SegLexicon without;
    const auto chars = utf8_chars("你好");
    CHECK(boundary_prob(chars, 1, with_word, 0.01) <=
          boundary_prob(chars, 1, without, 0.01));
}

TEST_CASE("segmentation spans partition random inputs") {
    const char* pool[] = {"你", "好", "天", "空", "海", "洋", "星", "光"};
    std::mt19937 rng(31);
    for (int iter = 0; iter < 300; ++iter) {
        std::vector<std::string> chars;
        const int n = 1 + static_cast<int>(rng() % 10);
        for (int i = 0; i < n; ++i) chars.push_back(pool[rng() % std::size(pool)]);

        std::vector<std::string> words;
        for (int w = 0; w < 4; ++w) {
            std::string word = pool[rng() % std::size(pool)];
            word += pool[rng() % std::size(pool)];
            words.push_back(word);
        }
        const SegLexicon lex = SegLexicon::from_words(words);

        const auto spans = segment(chars, lex);
        REQUIRE(!spans.empty());
        CHECK(spans.front().begin == 0);
        CHECK(spans.back().end == chars.size());
        for (std::size_t i = 1; i < spans.size(); ++i) {
            CHECK(spans[i].begin == spans[i - 1].end);
            CHECK(spans[i].begin < spans[i].end);
        }
        // deterministic
        CHECK(segment(chars, lex) == spans);
    }
}
