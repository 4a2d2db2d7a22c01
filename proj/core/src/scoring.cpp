#include "tonalign/scoring.hpp"

#include <cmath>

#include "tonalign/errors.hpp"
#include "tonalign/utf8.hpp"

namespace tonalign {

void ConstraintConfig::validate() const {
    if (!(lambda_inter >= 0) || !(lambda_intra >= 0) || !(lambda_rest >= 0) ||
        !std::isfinite(lambda_inter) || !std::isfinite(lambda_intra) ||
        !std::isfinite(lambda_rest)) {
        throw Error("constraint weights must be finite and non-negative");
    }
    if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
        throw Error("epsilon must lie in (0, 1)");
    }
    if (step_max < 1) throw Error("step_max must be >= 1");
    if (!transitions.complete()) throw Error("transition table incomplete");
}

double intra_score(const NoteGroup& group, Tone tone, const ConstraintConfig& cfg) {
    if (group.note_count() < 2) return 1.0;  // single notes carry no shape constraint
    return shape_matches_tone(classify_shape(group, cfg.intra_x_mode), tone) ? 1.0
                                                                             : cfg.epsilon;
}

double inter_score(Tone prev_tone, Tone cur_tone, bool in_same_word, int pitch_prev_first,
                   int pitch_cur_first, const ConstraintConfig& cfg) {
    if (!in_same_word) return 1.0;
    const TransitionCategory cat =
        classify_transition(pitch_prev_first, pitch_cur_first, cfg.step_max);
    return transition_acceptable(prev_tone, cur_tone, cat, cfg.transitions) ? 1.0
                                                                            : cfg.epsilon;
}

double rest_score(const Rational& rest, bool punc_after_prev, double p_seg, double epsilon) {
    if (rest.is_negative()) throw Error("rest_score: negative rest duration");
    if (rest.is_zero()) return 1.0;
    if (punc_after_prev) return 1.0;
    // p_seg is epsilon when the pair is word-internal, which realizes the
    // rest-within-a-word penalty branch.
    if (p_seg < epsilon) return epsilon;
    return p_seg > 1.0 ? 1.0 : p_seg;
}

LineReport normalized_line_scores(std::span<const PositionScores> per_position) {
    if (per_position.empty()) throw Error("normalized_line_scores: empty line");
    LineReport report;
    double sum_intra = 0, sum_inter = 0, sum_rest = 0, sum_intra_multi = 0;
    int multi = 0;
    for (const auto& p : per_position) {
        sum_intra += p.intra;
        sum_inter += p.inter;
        sum_rest += p.rest;
        if (p.multi_note) {
            sum_intra_multi += p.intra;
            ++multi;
        }
        if (p.rest < 1.0) ++report.missed_rest_count;
    }
    const double n = static_cast<double>(per_position.size());
    report.intra = sum_intra / n;
    report.inter = sum_inter / n;
    report.rest = sum_rest / n;
    if (multi > 0) report.intra_multi = sum_intra_multi / static_cast<double>(multi);
    return report;
}

namespace {

struct SyllableLine {
    std::vector<std::string> syllables;
    std::vector<bool> punc_after;
};

SyllableLine attach_punctuation(std::span<const std::string> tokens) {
    SyllableLine line;
    for (const auto& tok : tokens) {
        if (is_punctuation_token(tok)) {
            if (!line.syllables.empty()) line.punc_after.back() = true;
        } else {
            line.syllables.push_back(tok);
            line.punc_after.push_back(false);
        }
    }
    return line;
}

PositionScores score_position(const MelodyLine& melody, const std::vector<bool>& punc_after,
                              std::span<const Tone> tones, std::span<const WordSpan> spans,
                              std::size_t i, const ConstraintConfig& cfg) {
    PositionScores scores;
    const NoteGroup& group = melody.groups[i];
    scores.multi_note = group.note_count() > 1;
    scores.intra = intra_score(group, tones[i], cfg);
    if (i == 0) {
        // No predecessor: the contour pair does not exist and a rest before
        // the line start cannot split a word.
        scores.inter = 1.0;
        scores.rest = 1.0;
        return scores;
    }
    const bool punc_between = punc_after[i - 1];
    const bool word_internal = !punc_between && same_word(spans, i - 1, i);
    scores.inter = inter_score(tones[i - 1], tones[i], word_internal,
                               melody.groups[i - 1].first_pitch(), group.first_pitch(), cfg);
    const double p_seg = word_internal ? cfg.epsilon : 1.0;
    scores.rest = rest_score(melody.rests[i], punc_between, p_seg, cfg.epsilon);
    return scores;
}

}  // namespace

std::vector<PositionScores> score_line(const MelodyLine& melody,
                                       std::span<const std::string> tokens,
                                       const ToneLexicon& tone_lexicon,
                                       const SegLexicon& seg_lexicon,
                                       const ConstraintConfig& cfg,
                                       ScoreConvention convention) {
    const SyllableLine line = attach_punctuation(tokens);
    const std::size_t count = std::min(line.syllables.size(), melody.size());
    std::vector<PositionScores> out;
    out.reserve(count);

    if (convention == ScoreConvention::WholeLine) {
        const auto spans = segment(line.syllables, seg_lexicon);
        const auto tones = apply_sandhi(tone_lexicon.annotate(line.syllables, spans), spans);
        for (std::size_t i = 0; i < count; ++i) {
            out.push_back(score_position(melody, line.punc_after, tones, spans, i, cfg));
        }
        return out;
    }

    // Incremental: position i sees only the prefix [0..i], exactly as the
    // decoder accrued it. Sandhi never reaches back past the pair being
    // scored and segmentation cannot use characters that do not exist yet.
    for (std::size_t i = 0; i < count; ++i) {
        const std::span<const std::string> prefix(line.syllables.data(), i + 1);
        out.push_back(score_prefix_position(melody, prefix, i > 0 && line.punc_after[i - 1],
                                            tone_lexicon, seg_lexicon, cfg));
    }
    return out;
}

PositionScores score_prefix_position(const MelodyLine& melody,
                                     std::span<const std::string> prefix_syllables,
                                     bool punc_before_last, const ToneLexicon& tone_lexicon,
                                     const SegLexicon& seg_lexicon,
                                     const ConstraintConfig& cfg) {
    if (prefix_syllables.empty()) throw Error("score_prefix_position: empty prefix");
    const std::size_t i = prefix_syllables.size() - 1;
    if (i >= melody.size()) throw Error("score_prefix_position: prefix longer than melody");
    const auto spans = segment(prefix_syllables, seg_lexicon);
    const auto tones = apply_sandhi(tone_lexicon.annotate(prefix_syllables, spans), spans);
    std::vector<bool> punc_after(prefix_syllables.size(), false);
    if (i > 0) punc_after[i - 1] = punc_before_last;
    return score_position(melody, punc_after, tones, spans, i, cfg);
}

LengthStats length_stats(std::span<const int> output_lengths,
                         std::span<const int> target_lengths) {
    if (output_lengths.size() != target_lengths.size()) {
        throw Error("length_stats: mismatched list lengths");
    }
    LengthStats stats;
    double over = 0.0, under = 0.0;
    for (std::size_t i = 0; i < output_lengths.size(); ++i) {
        const int target = target_lengths[i];
        if (target <= 0) throw Error("length_stats: target length must be positive");
        const int delta = output_lengths[i] - target;
        if (delta > 0) {
            ++stats.n_longer;
            over += static_cast<double>(delta) / target;
        } else if (delta < 0) {
            ++stats.n_shorter;
            under += static_cast<double>(-delta) / target;
        }
    }
    if (stats.n_longer > 0) stats.longer_ratio = over / stats.n_longer;
    if (stats.n_shorter > 0) stats.shorter_ratio = under / stats.n_shorter;
    return stats;
}

}  // namespace tonalign
