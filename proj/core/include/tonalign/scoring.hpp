#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tonalign/melody.hpp"
#include "tonalign/segmentation.hpp"
#include "tonalign/shape.hpp"
#include "tonalign/tones.hpp"

namespace tonalign {

/// Weights and thresholds for the three alignment constraints.
struct ConstraintConfig {
    double lambda_inter = 0.5;
    double lambda_intra = 1.0;
    double lambda_rest = 1.5;
    double epsilon = 0.01;
    int step_max = 2;
    TransitionTable transitions = TransitionTable::permissive();
    IntraXMode intra_x_mode = IntraXMode::Index;

    void validate() const;
};

/// Per-syllable constraint scores, each in [epsilon, 1].
struct PositionScores {
    double intra = 1.0;
    double inter = 1.0;
    double rest = 1.0;
    bool multi_note = false;  // group carried a shape constraint
};

/// Length-normalized scores for one line.
struct LineReport {
    double intra = 1.0;                 // mean over all positions
    std::optional<double> intra_multi;  // mean over multi-note positions only
    double inter = 1.0;
    double rest = 1.0;
    int missed_rest_count = 0;  // rests not landing on a word boundary
    int length_delta = 0;       // output syllables minus note groups
};

/// Shape score of one syllable: single-note groups are unconstrained (1.0),
/// multi-note groups score 1.0 on a tone-shape match and epsilon otherwise.
double intra_score(const NoteGroup& group, Tone tone, const ConstraintConfig& cfg);

/// Contour score of a syllable pair. Pairs that cross a word boundary (or
/// the line start) are unconstrained; same-word pairs score 1.0 when the
/// first-note transition is acceptable for the tone pair, epsilon otherwise.
double inter_score(Tone prev_tone, Tone cur_tone, bool in_same_word, int pitch_prev_first,
                   int pitch_cur_first, const ConstraintConfig& cfg);

/// Rest score: no rest or a rest after punctuation scores 1.0; otherwise the
/// word-boundary probability (epsilon when the rest splits a word).
double rest_score(const Rational& rest, bool punc_after_prev, double p_seg, double epsilon);

/// Arithmetic means over positions. missed_rest_count counts positions whose
/// rest score stayed below 1.0; length_delta is left at zero.
LineReport normalized_line_scores(std::span<const PositionScores> per_position);

/// How one scored line's tones and word boundaries are derived.
///   WholeLine:   segment and sandhi the complete line, then score.
///   Incremental: score position i exactly as the decoder accrued it, i.e.
///                from the prefix [0..i] only (sandhi cannot yet see the
///                right neighbor; segmentation sees only the prefix).
enum class ScoreConvention {
    WholeLine,
    Incremental,
};

/// Scores a complete token sequence (syllables plus attached punctuation)
/// against a post-assignment melody. Punctuation tokens consume no group and
/// mark a pause after the preceding syllable. Scores are produced for the
/// first min(#syllables, #groups) positions.
std::vector<PositionScores> score_line(const MelodyLine& melody,
                                       std::span<const std::string> tokens,
                                       const ToneLexicon& tone_lexicon,
                                       const SegLexicon& seg_lexicon,
                                       const ConstraintConfig& cfg,
                                       ScoreConvention convention = ScoreConvention::WholeLine);

/// Scores the last syllable of `prefix_syllables` (position prefix.size()-1
/// of the melody) seeing only that prefix. This is the unit the decoder
/// accrues at each expansion; score_line's Incremental convention is its
/// positionwise replay.
PositionScores score_prefix_position(const MelodyLine& melody,
                                     std::span<const std::string> prefix_syllables,
                                     bool punc_before_last, const ToneLexicon& tone_lexicon,
                                     const SegLexicon& seg_lexicon,
                                     const ConstraintConfig& cfg);

/// Length-error statistics over a corpus: how many outputs overshoot or
/// undershoot their target lengths, with mean error ratios.
struct LengthStats {
    int n_longer = 0;
    double longer_ratio = 0.0;
    int n_shorter = 0;
    double shorter_ratio = 0.0;
};

LengthStats length_stats(std::span<const int> output_lengths,
                         std::span<const int> target_lengths);

}  // namespace tonalign
