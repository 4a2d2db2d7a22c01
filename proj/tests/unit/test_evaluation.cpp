#include <doctest.h>

#include <cmath>

#include "support/test_support.hpp"
#include "tonalign/errors.hpp"
#include "tonalign/evaluation.hpp"
#include "tonalign/utf8.hpp"

using namespace tonalign;
using testsup::flat_melody;

namespace {

std::vector<std::vector<std::string>> lines(std::initializer_list<const char*> texts) {
    std::vector<std::vector<std::string>> out;
    for (const char* t : texts) out.push_back(split_whitespace(t));
    return out;
}

}  // namespace

TEST_CASE("corpus BLEU against hand-derived oracles") {
    // identical corpora score 1
    CHECK(corpus_bleu(lines({"a b c d"}), lines({"a b c d"})) ==
          doctest::Approx(1.0).epsilon(1e-12));

    // all precisions 1, brevity penalty exp(1 - 5/4): frozen exp(-0.25)
    CHECK(corpus_bleu(lines({"a b c d"}), lines({"a b c d e"})) ==
          doctest::Approx(0.7788007830714049).epsilon(1e-9));

    // two lines, max order 2: p1 = 3/4, p2 = 1/2, BP = 1 -> sqrt(3/8)
    CHECK(corpus_bleu(lines({"a b", "c d"}), lines({"a b", "c e"}), 2) ==
          doctest::Approx(0.6123724356957945).epsilon(1e-9));

    // clipping: hyp "a a b c" vs ref "a b c", order 3 -> (3/4 * 2/3 * 1/2)^(1/3)
    CHECK(corpus_bleu(lines({"a a b c"}), lines({"a b c"}), 3) ==
          doctest::Approx(0.6299605249474366).epsilon(1e-9));

    // unigram clipping only: min(3,2)/3 = 2/3
    CHECK(corpus_bleu(lines({"a a a"}), lines({"a a"}), 1) ==
          doctest::Approx(2.0 / 3.0).epsilon(1e-9));

    // disjoint vocabularies
    CHECK(corpus_bleu(lines({"a b c d"}), lines({"x y z w"})) == 0.0);
}

TEST_CASE("BLEU edge cases and properties") {
    CHECK_THROWS_AS(corpus_bleu(lines({"a"}), lines({"a", "b"})), Error);
    CHECK_THROWS_AS(corpus_bleu({}, {}), Error);
    CHECK_THROWS_AS(corpus_bleu(lines({"a"}), lines({""})), Error);

    // consistent permutation invariance
    const auto h = lines({"a b", "c d", "e f"});
    const auto r = lines({"a x", "c d", "e y"});
    const auto hp = lines({"c d", "e f", "a b"});
    const auto rp = lines({"c d", "e y", "a x"});
    CHECK(corpus_bleu(h, r, 2) == doctest::Approx(corpus_bleu(hp, rp, 2)).epsilon(1e-12));

    // 4-gram order on 2-token lines: no 3-grams exist, unsmoothed BLEU is 0
    CHECK(corpus_bleu(lines({"a b"}), lines({"a b"}), 4) == 0.0);
    // add-one smoothing keeps tiny corpora comparable
    CHECK(corpus_bleu(lines({"a b"}), lines({"a b"}), 4, true) > 0.0);
    CHECK(corpus_bleu(lines({"a b c d"}), lines({"a b c d"}), 4, true) == 1.0);
}

namespace {

struct EvalFixture {
    ToneLexicon tones = testsup::load_tone_lexicon();
    SegLexicon segs = testsup::load_seg_lexicon();
    EvalContext ctx;

    EvalFixture() {
        ctx.tone_lexicon = &tones;
        ctx.seg_lexicon = &segs;
        ctx.cfg.transitions = testsup::load_default_table();
    }
};

AlignedTriple triple_of(const MelodyLine& melody, const std::string& reference) {
    AlignedTriple t;
    t.melody = melody;
    if (!reference.empty()) t.reference = reference;
    return t;
}

}  // namespace

TEST_CASE("evaluate a fully satisfying corpus under a permissive table") {
    EvalFixture fx;
    fx.ctx.cfg.transitions = TransitionTable::permissive();

    std::vector<AlignedTriple> triples{
        triple_of(flat_melody({60, 60, 62, 62, 62}), "月光在天空"),
        triple_of(flat_melody({64, 64, 64, 64}), "我想念你"),
    };
    std::vector<std::vector<std::string>> outputs{
        utf8_chars("月光在天空"),
        utf8_chars("我想念你"),
    };
    const EvalReport report = evaluate(triples, outputs, fx.ctx);
    CHECK(report.scored_count == 2);
    CHECK(report.flagged_count == 0);
    CHECK(report.mean_inter == 1.0);
    CHECK(report.mean_intra == 1.0);
    CHECK(report.mean_rest == 1.0);
    CHECK(report.mean_missed_rests == 0.0);
    CHECK(report.lengths.n_longer == 0);
    CHECK(report.lengths.n_shorter == 0);
    REQUIRE(report.bleu.has_value());
    CHECK(*report.bleu == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(!report.mean_intra_multi.has_value());  // no multi-note groups
}

TEST_CASE("flagged lines are excluded from means but counted") {
    EvalFixture fx;
    std::vector<AlignedTriple> triples{
        triple_of(flat_melody({60, 60}), ""),
        triple_of(flat_melody({60, 60}), ""),
    };
    std::vector<std::vector<std::string>> outputs{
        utf8_chars("天空"),
        {"天", "X"},  // X carries no tone
    };
    const EvalReport report = evaluate(triples, outputs, fx.ctx);
    CHECK(report.scored_count == 1);
    CHECK(report.flagged_count == 1);
    CHECK(report.lines[1].flagged);
    CHECK(!report.lines[1].error.empty());
    CHECK(!report.bleu.has_value());  // no references anywhere
}

TEST_CASE("length deltas flow into the corpus stats") {
    EvalFixture fx;
    fx.ctx.cfg.transitions = TransitionTable::permissive();
    std::vector<AlignedTriple> triples{
        triple_of(flat_melody({60, 60}), ""),
        triple_of(flat_melody({60, 60, 60, 60}), ""),
    };
    std::vector<std::vector<std::string>> outputs{
        utf8_chars("天空海"),  // one long
        utf8_chars("天空海"),  // one short
    };
    const EvalReport report = evaluate(triples, outputs, fx.ctx);
    CHECK(report.lengths.n_longer == 1);
    CHECK(report.lengths.longer_ratio == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(report.lengths.n_shorter == 1);
    CHECK(report.lengths.shorter_ratio == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(report.lines[0].report.length_delta == 1);
    CHECK(report.lines[1].report.length_delta == -1);
}

TEST_CASE("report renders mirror the table columns") {
    EvalFixture fx;
    fx.ctx.cfg.transitions = TransitionTable::permissive();
    std::vector<AlignedTriple> triples{triple_of(flat_melody({60, 60}), "天空")};
    std::vector<std::vector<std::string>> outputs{utf8_chars("天空")};
    const EvalReport report = evaluate(triples, outputs, fx.ctx);

    const std::string tsv = render_report_tsv(report, "demo");
    CHECK(tsv.find("model\tinter\tintra\tavg_missed_rests\tlonger\tshorter\tbleu") !=
          std::string::npos);
    CHECK(tsv.find("demo\t") != std::string::npos);
    CHECK(tsv.find("0 (0.00)") != std::string::npos);  // "N (ratio)" rendering
    CHECK(tsv.find("\t-\t") != std::string::npos);     // intra prints '-' with no melismas

    const std::string js = render_report_json(report, "demo");
    CHECK(js.find("\"bleu\"") != std::string::npos);
    CHECK(js.find("\"lines\"") != std::string::npos);
}

TEST_CASE("evaluation is deterministic across worker counts") {
    EvalFixture fx;
    std::vector<AlignedTriple> triples;
    std::vector<std::vector<std::string>> outputs;
    for (int i = 0; i < 12; ++i) {
        triples.push_back(triple_of(flat_melody({60, 62, 64, 62}), "月光在天"));
        outputs.push_back(utf8_chars("月光在天"));
    }
    fx.ctx.workers = 1;
    const std::string a = render_report_json(evaluate(triples, outputs, fx.ctx), "x");
    fx.ctx.workers = 4;
    const std::string b = render_report_json(evaluate(triples, outputs, fx.ctx), "x");
    CHECK(a == b);
}

TEST_CASE("sweep emits one point per grid value with the pinned CSV header") {
    EvalFixture fx;
    fx.ctx.cfg.transitions = testsup::load_default_table();

    std::vector<AlignedTriple> triples{
        triple_of(flat_melody({60, 62}), "天空"),
        triple_of(flat_melody({60, 58}), "天空"),
    };
    const Vocabulary vocab = Vocabulary::build(
        {"天", "空", "海", "洋"}, "</s>",
        fx.tones);
    const auto model = make_uniform_model(vocab);

    DecodeOptions opt;
    opt.use_exhaustive = true;
    const std::vector<double> grid{0.0, 1.0, 4.0};
    const auto points = sweep(triples, *model, SweepTarget::Inter, grid, fx.ctx, opt);
    REQUIRE(points.size() == 3);
    CHECK(points[0].lambda == 0.0);
    CHECK(points[2].lambda == 4.0);
    for (const auto& p : points) CHECK(p.failures == 0);
    // the swept constraint's cumulative log-score never decreases
    CHECK(points[0].constraint_logscore <= points[1].constraint_logscore + 1e-12);
    CHECK(points[1].constraint_logscore <= points[2].constraint_logscore + 1e-12);

    const std::string csv = render_sweep_csv(points);
    CHECK(csv.rfind("lambda,score,bleu,punc_count,failures\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);  // header + 3 rows
}
