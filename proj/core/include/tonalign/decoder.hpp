#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tonalign/candidates.hpp"
#include "tonalign/melody.hpp"
#include "tonalign/scoring.hpp"

namespace tonalign {

/// A (partial or complete) target lyric under construction. The component
/// sums hold raw constraint log-scores; the total folds in the weights:
/// total == log_p + lambda_inter*sum_log_inter + lambda_intra*sum_log_intra
///        + lambda_rest*sum_log_rest.
struct Hypothesis {
    std::vector<std::size_t> token_ids;
    std::vector<std::string> tokens;      // syllables and punctuation, no EOL
    std::vector<std::string> syllables;   // non-punctuation tokens only
    int consumed_groups = 0;
    double log_p = 0.0;  // includes the end-of-line probability once complete
    double sum_log_inter = 0.0;
    double sum_log_intra = 0.0;
    double sum_log_rest = 0.0;
    double total = 0.0;
    bool punc_pending = false;
    int punc_count = 0;
    bool complete = false;
};

struct DecodeRequest {
    const MelodyLine* melody = nullptr;  // post-assignment
    std::string source;
    ConstraintConfig cfg;
    int beam_size = 10;
    int punc_budget = 2;  // punctuation tokens allowed per line
    const CandidateModel* model = nullptr;
    const ToneLexicon* tone_lexicon = nullptr;
    const SegLexicon* seg_lexicon = nullptr;

    void validate() const;
};

/// Extends a hypothesis by one token, accruing the token log-probability and
/// the weighted constraint scores for the consumed position. Punctuation
/// consumes no note group. `logprob` is the model's score for the token.
Hypothesis step_score(const Hypothesis& hyp, std::size_t token_id, double logprob,
                      const DecodeRequest& req);

/// Beam search over step_score with hard length enforcement: hypotheses
/// complete exactly when every note group is consumed, at which point only
/// the end-of-line token is permitted (and forced). Ranked by total score,
/// ties broken by token-id sequence. Deterministic. Throws DecodeError when
/// no hypothesis survives.
std::vector<Hypothesis> beam_search(const DecodeRequest& req);

/// Exact argmax by full enumeration (punctuation insertion disabled).
/// Candidates accrue through step_score exactly as in beam_search, so equal
/// sequences carry bit-identical totals and the tie-break agrees; what this
/// oracle removes is the pruning. Refuses instances larger than max_states.
Hypothesis exhaustive_decode(const DecodeRequest& req, std::uint64_t max_states);

/// Recomputes a hypothesis's total from its token sequence alone (model
/// probabilities plus scoring-module constraint scores).
double recompute_hypothesis_total(const Hypothesis& hyp, const DecodeRequest& req);

}  // namespace tonalign
