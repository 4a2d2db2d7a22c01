#include <doctest.h>

#include <cmath>
#include <random>

#include "support/test_support.hpp"
#include "tonalign/decoder.hpp"
#include "tonalign/errors.hpp"

using namespace tonalign;
using testsup::flat_melody;
using testsup::group_of;

namespace {

ToneLexicon pool_lexicon() {
    return ToneLexicon::from_entries({
        {"甲", {1}}, {"乙", {2}}, {"丙", {3}}, {"丁", {4}}, {"戊", {1}}, {"己", {3}},
        {"庚", {2}}, {"辛", {4}}, {"壬", {1}}, {"癸", {3}}, {"子", {2}}, {"丑", {4}},
    });
}

struct Fixture {
    ToneLexicon tones = pool_lexicon();
    SegLexicon segs;
    MelodyLine melody;
    std::unique_ptr<CandidateModel> model;
    ConstraintConfig cfg;

    DecodeRequest request(int beam = 8) const {
        DecodeRequest req;
        req.melody = &melody;
        req.source = "src";
        req.cfg = cfg;
        req.beam_size = beam;
        req.model = model.get();
        req.tone_lexicon = &tones;
        req.seg_lexicon = &segs;
        return req;
    }
};

int syllable_count(const Hypothesis& hyp) { return static_cast<int>(hyp.syllables.size()); }

}  // namespace

TEST_CASE("uniform model with unconstrained scores: pure model arithmetic") {
    Fixture fx;
    fx.melody = flat_melody({60, 60});
    fx.cfg.transitions = TransitionTable::permissive();
    fx.model = make_uniform_model(
        Vocabulary::build({"甲", "乙", "丙", "丁"}, "</s>", fx.tones));

    const auto ranked = beam_search(fx.request());
    REQUIRE(!ranked.empty());
    const double expected = 3.0 * std::log(1.0 / 5.0);  // two tokens plus end-of-line
    for (const auto& hyp : ranked) {
        CHECK(hyp.total == doctest::Approx(expected).epsilon(1e-12));
        CHECK(hyp.sum_log_inter == 0.0);
        CHECK(hyp.sum_log_intra == 0.0);
        CHECK(hyp.sum_log_rest == 0.0);
        CHECK(hyp.complete);
    }
    // all totals tie: the token-id tie-break puts 甲甲 first
    CHECK(ranked.front().tokens == std::vector<std::string>{"甲", "甲"});
}

TEST_CASE("a shape mismatch adds exactly lambda_intra * log(epsilon)") {
    Fixture fx;
    fx.melody.groups.push_back(group_of({60, 62, 64}));  // rising melisma
    fx.melody.rests.push_back(Rational(0));
    fx.cfg.transitions = TransitionTable::permissive();
    fx.model = make_uniform_model(
        Vocabulary::build({"甲", "乙", "丙", "丁"}, "</s>", fx.tones));

    const auto ranked = beam_search(fx.request());
    REQUIRE(ranked.size() >= 2);
    // tone 2 matches the rising contour and tops the list
    CHECK(ranked.front().tokens == std::vector<std::string>{"乙"});
    const double base = 2.0 * std::log(1.0 / 5.0);
    CHECK(ranked.front().total == doctest::Approx(base).epsilon(1e-12));
    // every other tone pays the epsilon penalty: log(0.01) = -4.60517...
    for (std::size_t i = 1; i < ranked.size(); ++i) {
        CHECK(ranked[i].total ==
              doctest::Approx(base - 4.605170185988091).epsilon(1e-9));
    }
}

TEST_CASE("lambda=0 reduces to the model argmax; raising it flips the choice") {
    Fixture fx;
    fx.segs = SegLexicon::from_words({"丁丁"});
    fx.melody = flat_melody({60, 62});  // a step up under the default table
    fx.cfg.transitions = testsup::load_default_table();
    const Vocabulary vocab = Vocabulary::build({"甲", "乙", "丙", "丁"}, "</s>", fx.tones);
    fx.model = train_ngram({{"丁", "丁"}, {"丁", "丁"}, {"丁", "丁"}}, 2, 0.5, vocab);

    fx.cfg.lambda_inter = 0.0;
    fx.cfg.lambda_intra = 0.0;
    fx.cfg.lambda_rest = 0.0;
    auto ranked = beam_search(fx.request(16));
    CHECK(ranked.front().tokens == std::vector<std::string>{"丁", "丁"});
    // with zero weights the total is the bare model score
    CHECK(ranked.front().total ==
          doctest::Approx(recompute_hypothesis_total(ranked.front(), fx.request()))
              .epsilon(1e-12));

    fx.cfg.lambda_inter = 2.0;
    ranked = beam_search(fx.request(16));
    CHECK(ranked.front().tokens != std::vector<std::string>{"丁", "丁"});
    CHECK(ranked.front().sum_log_inter == 0.0);  // the winner avoids the bad pair
}

TEST_CASE("rest splitting a word is bought off with punctuation") {
    Fixture fx;
    fx.tones = ToneLexicon::from_entries({{"天", {1}}, {"空", {1}}});
    // every syllable pair is a word, so the rest penalty cannot be dodged
    fx.segs = SegLexicon::from_words({"天天", "天空", "空天", "空空"});
    fx.melody = flat_melody({62, 62});
    fx.melody.rests[1] = Rational(1);
    fx.cfg.transitions = TransitionTable::permissive();
    fx.cfg.lambda_rest = 4.0;
    const Vocabulary vocab = Vocabulary::build({"天", "空", "，"}, "</s>", fx.tones);
    fx.model = make_uniform_model(vocab);

    DecodeRequest req = fx.request(32);
    req.punc_budget = 1;
    const auto ranked = beam_search(req);
    REQUIRE(!ranked.empty());
    const auto& top = ranked.front();
    // the comma lands exactly across the rest; ties resolve to the lowest ids
    CHECK(top.tokens == std::vector<std::string>{"天", "，", "天"});
    CHECK(top.punc_count == 1);
    CHECK(syllable_count(top) == 2);
    CHECK(top.sum_log_rest == 0.0);

    // punctuation rules: never first, never doubled, never line-final
    for (const auto& hyp : ranked) {
        REQUIRE(!hyp.tokens.empty());
        CHECK(hyp.tokens.front() != "，");
        CHECK(hyp.tokens.back() != "，");
        for (std::size_t i = 1; i < hyp.tokens.size(); ++i) {
            CHECK(!(hyp.tokens[i] == "，" && hyp.tokens[i - 1] == "，"));
        }
        CHECK(hyp.punc_count <= req.punc_budget);
    }

    // more rest weight cannot reduce the punctuation count on this instance
    fx.cfg.lambda_rest = 0.0;
    DecodeRequest req0 = fx.request(32);
    req0.punc_budget = 1;
    const auto unweighted = beam_search(req0);
    CHECK(unweighted.front().punc_count <= top.punc_count);
}

TEST_CASE("beam as wide as the search space matches exhaustive decoding") {
    std::mt19937 rng(59);
    const std::vector<std::string> pool{"甲", "乙", "丙", "丁", "戊", "己"};
    for (int iter = 0; iter < 20; ++iter) {
        Fixture fx;
        const int vocab_size = 3 + static_cast<int>(rng() % 4);
        std::vector<std::string> tokens(pool.begin(), pool.begin() + vocab_size);
        const Vocabulary vocab = Vocabulary::build(tokens, "</s>", fx.tones);

        const int len = 1 + static_cast<int>(rng() % 3);
        for (int i = 0; i < len; ++i) {
            std::vector<int> pitches;
            const int notes = 1 + static_cast<int>(rng() % 3);
            for (int k = 0; k < notes; ++k) pitches.push_back(static_cast<int>(55 + rng() % 14));
            fx.melody.groups.push_back(group_of(pitches));
            fx.melody.rests.push_back(Rational(static_cast<int>(rng() % 2)));
        }
        fx.segs = SegLexicon::from_words({tokens[0] + tokens[1], tokens[1] + tokens[2]});
        fx.cfg.transitions = testsup::load_default_table();
        fx.cfg.lambda_inter = 0.5;
        fx.cfg.lambda_intra = 1.0;
        fx.cfg.lambda_rest = 1.5;

        std::vector<std::vector<std::string>> corpus;
        for (int lines = 0; lines < 4; ++lines) {
            std::vector<std::string> line;
            for (int t = 0; t < 3; ++t) line.push_back(tokens[rng() % tokens.size()]);
            corpus.push_back(line);
        }
        fx.model = train_ngram(corpus, 2, 0.5, vocab);

        int beam = 1;
        for (int i = 0; i < len; ++i) beam *= vocab_size;
        DecodeRequest req = fx.request(beam);
        req.punc_budget = 0;

        const auto ranked = beam_search(req);
        const Hypothesis exact = exhaustive_decode(req, 1u << 20);
        REQUIRE(!ranked.empty());
        CHECK(ranked.front().tokens == exact.tokens);
        CHECK(ranked.front().total == doctest::Approx(exact.total).epsilon(1e-9));
    }
}

TEST_CASE("every hypothesis is length-exact and recomputable") {
    std::mt19937 rng(61);
    for (int iter = 0; iter < 10; ++iter) {
        Fixture fx;
        const Vocabulary vocab =
            Vocabulary::build({"甲", "乙", "丙", "丁", "，"}, "</s>", fx.tones);
        const int len = 1 + static_cast<int>(rng() % 4);
        for (int i = 0; i < len; ++i) {
            fx.melody.groups.push_back(group_of({static_cast<int>(55 + rng() % 14)}));
            fx.melody.rests.push_back(Rational(static_cast<int>(rng() % 2)));
        }
        fx.segs = SegLexicon::from_words({"甲乙", "丙丁"});
        fx.cfg.transitions = testsup::load_default_table();
        fx.model = train_ngram({{"甲", "乙", "丙"}, {"丁", "甲"}}, 2, 1.0, vocab);

        const auto ranked = beam_search(fx.request(6));
        for (const auto& hyp : ranked) {
            CHECK(syllable_count(hyp) == len);
            CHECK(hyp.consumed_groups == len);
            CHECK(recompute_hypothesis_total(hyp, fx.request()) ==
                  doctest::Approx(hyp.total).epsilon(1e-9));
            // the stored component sums rebuild the total
            const double rebuilt = hyp.log_p + fx.cfg.lambda_inter * hyp.sum_log_inter +
                                   fx.cfg.lambda_intra * hyp.sum_log_intra +
                                   fx.cfg.lambda_rest * hyp.sum_log_rest;
            CHECK(rebuilt == doctest::Approx(hyp.total).epsilon(1e-9));
        }
    }
}

TEST_CASE("decoding is deterministic") {
    Fixture fx;
    const Vocabulary vocab = Vocabulary::build({"甲", "乙", "丙", "丁"}, "</s>", fx.tones);
    fx.melody = flat_melody({60, 63, 61});
    fx.segs = SegLexicon::from_words({"甲乙"});
    fx.cfg.transitions = testsup::load_default_table();
    fx.model = train_ngram({{"甲", "乙", "丙"}}, 2, 0.7, vocab);

    const auto a = beam_search(fx.request(4));
    const auto b = beam_search(fx.request(4));
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].tokens == b[i].tokens);
        CHECK(a[i].total == b[i].total);  // bitwise
    }
}

TEST_CASE("exhaustive decoding refuses oversized instances") {
    Fixture fx;
    fx.melody = flat_melody({60, 60, 60, 60});
    fx.model = make_uniform_model(Vocabulary::build({"甲", "乙", "丙"}, "</s>", fx.tones));
    CHECK_THROWS_AS(exhaustive_decode(fx.request(), 10), DecodeError);
    // 3^4 = 81 fits exactly
    CHECK_NOTHROW(exhaustive_decode(fx.request(), 81));
}

TEST_CASE("single-position argmax by direct enumeration") {
    Fixture fx;
    fx.melody.groups.push_back(group_of({60, 62, 64}));  // rising
    fx.melody.rests.push_back(Rational(0));
    fx.cfg.transitions = TransitionTable::permissive();
    const Vocabulary vocab = Vocabulary::build({"甲", "乙", "丙", "丁"}, "</s>", fx.tones);
    fx.model = make_uniform_model(vocab);
    const Hypothesis best = exhaustive_decode(fx.request(), 100);
    CHECK(best.tokens == std::vector<std::string>{"乙"});  // tone 2 fits the rise
}

TEST_CASE("beam collapse raises a decode error") {
    Fixture fx;
    fx.melody = flat_melody({60});
    fx.cfg.transitions = TransitionTable::permissive();
    // only punctuation available: no syllable can ever be emitted
    fx.model = make_uniform_model(Vocabulary::build({"，"}, "</s>", fx.tones));
    CHECK_THROWS_AS(beam_search(fx.request()), DecodeError);
}

TEST_CASE("raising one weight never lowers that constraint at the exact argmax") {
    Fixture fx;
    fx.segs = SegLexicon::from_words({"丁丁", "丁甲"});
    fx.melody = flat_melody({60, 62, 61});
    fx.cfg.transitions = testsup::load_default_table();
    const Vocabulary vocab = Vocabulary::build({"甲", "乙", "丙", "丁"}, "</s>", fx.tones);
    fx.model = train_ngram({{"丁", "丁", "甲"}, {"丁", "丁", "乙"}}, 2, 0.4, vocab);

    double previous = -std::numeric_limits<double>::infinity();
    for (const double lambda : {0.0, 0.25, 0.5, 1.0, 2.0, 4.0}) {
        fx.cfg.lambda_inter = lambda;
        const Hypothesis best = exhaustive_decode(fx.request(), 1 << 12);
        CHECK(best.sum_log_inter >= previous - 1e-12);
        previous = best.sum_log_inter;
    }
}
