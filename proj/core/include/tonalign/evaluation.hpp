#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tonalign/candidates.hpp"
#include "tonalign/decoder.hpp"
#include "tonalign/melody.hpp"
#include "tonalign/scoring.hpp"

namespace tonalign {

/// Standard corpus BLEU in [0, 1]: geometric mean of modified n-gram
/// precisions (orders 1..max_order) times the brevity penalty. Any order
/// with zero matches yields 0.0 unless add-one smoothing is on.
double corpus_bleu(std::span<const std::vector<std::string>> hypotheses,
                   std::span<const std::vector<std::string>> references, int max_order = 4,
                   bool add_one_smoothing = false);

struct EvalContext {
    const ToneLexicon* tone_lexicon = nullptr;
    const SegLexicon* seg_lexicon = nullptr;
    ConstraintConfig cfg;
    AssignmentStrategy strategy = AssignmentStrategy::SyllableToSyllable;
    ScoreConvention convention = ScoreConvention::WholeLine;
    int bleu_max_order = 4;
    bool bleu_add_one = false;
    int workers = 1;
};

struct LineEval {
    LineReport report;
    bool flagged = false;  // excluded from alignment means
    std::string error;
    int output_syllables = 0;
    int target_groups = 0;
};

struct EvalReport {
    std::vector<LineEval> lines;
    double mean_inter = 0.0;
    double mean_intra = 0.0;
    std::optional<double> mean_intra_multi;
    double mean_rest = 0.0;
    double mean_missed_rests = 0.0;
    LengthStats lengths;
    std::optional<double> bleu;
    int flagged_count = 0;
    int scored_count = 0;
};

/// Scores each output against its triple's melody; per-line alignment scores
/// are normalized by the melody length. Lines whose tones cannot be resolved
/// are flagged and excluded from the alignment means but still counted.
/// BLEU is reported over the lines that carry a reference.
EvalReport evaluate(std::span<const AlignedTriple> triples,
                    std::span<const std::vector<std::string>> outputs, const EvalContext& ctx);

struct DecodeOptions {
    int beam_size = 10;
    int punc_budget = 2;
    bool use_exhaustive = false;
    std::uint64_t max_states = 2'000'000;
    int workers = 1;
};

struct LineDecodeResult {
    bool ok = false;
    Hypothesis best;
    std::string error;
};

/// Decodes every triple's melody with the given model. Per-line failures are
/// captured, not thrown; output order always matches input order.
std::vector<LineDecodeResult> decode_corpus(std::span<const AlignedTriple> triples,
                                            const CandidateModel& model,
                                            const EvalContext& ctx, const DecodeOptions& opt);

enum class SweepTarget { Inter, Intra, Rest };

std::optional<SweepTarget> sweep_target_from_string(std::string_view name);
std::string_view to_string(SweepTarget target);

/// One grid point of a constraint-weight sweep.
struct SweepPoint {
    double lambda = 0.0;
    double score = 0.0;  // corpus alignment score of the swept constraint
    std::optional<double> bleu;
    int punc_count = 0;
    int failures = 0;
    /// Cumulative constraint log-score of the decoded top-1 hypotheses; the
    /// quantity the sweep weight acts on directly.
    double constraint_logscore = 0.0;
};

/// Decodes the whole dataset at each grid value of the swept weight and
/// records the resulting alignment score, BLEU, and punctuation count.
std::vector<SweepPoint> sweep(std::span<const AlignedTriple> triples,
                              const CandidateModel& model, SweepTarget target,
                              std::span<const double> grid, const EvalContext& ctx,
                              const DecodeOptions& opt);

/// Tab-separated summary mirroring the corpus report columns.
std::string render_report_tsv(const EvalReport& report, const std::string& label);
/// Machine-readable variant with per-line detail.
std::string render_report_json(const EvalReport& report, const std::string& label);
/// CSV with header lambda,score,bleu,punc_count,failures.
std::string render_sweep_csv(std::span<const SweepPoint> points);

}  // namespace tonalign
