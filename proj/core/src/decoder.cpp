#include "tonalign/decoder.hpp"

#include <algorithm>
#include <cmath>

#include "tonalign/errors.hpp"

namespace tonalign {

void DecodeRequest::validate() const {
    if (!melody || !model || !tone_lexicon || !seg_lexicon) {
        throw Error("decode request is missing melody, model, or lexicons");
    }
    if (beam_size < 1) throw Error("beam_size must be >= 1");
    if (punc_budget < 0) throw Error("punc_budget must be >= 0");
    melody->validate();
    cfg.validate();
}

namespace {

// Score-descending order; equal scores fall back to the token-id sequence.
bool better(const Hypothesis& a, const Hypothesis& b) {
    if (a.total != b.total) return a.total > b.total;
    return a.token_ids < b.token_ids;
}

Hypothesis finalize(Hypothesis hyp, const DecodeRequest& req) {
    const auto logprobs = req.model->next_logprobs(req.source, hyp.tokens);
    const double lp = logprobs[req.model->vocab().eol_id()];
    hyp.log_p += lp;
    hyp.total += lp;
    hyp.complete = true;
    return hyp;
}

}  // namespace

Hypothesis step_score(const Hypothesis& hyp, std::size_t token_id, double logprob,
                      const DecodeRequest& req) {
    const Vocabulary& vocab = req.model->vocab();
    Hypothesis next = hyp;
    next.token_ids.push_back(token_id);
    next.tokens.push_back(vocab.token(token_id));
    next.log_p += logprob;
    next.total += logprob;
    if (vocab.is_punct(token_id)) {
        next.punc_pending = true;
        ++next.punc_count;
        return next;
    }
    next.syllables.push_back(vocab.token(token_id));
    const PositionScores scores =
        score_prefix_position(*req.melody, next.syllables, hyp.punc_pending,
                              *req.tone_lexicon, *req.seg_lexicon, req.cfg);
    const double log_intra = std::log(scores.intra);
    const double log_inter = std::log(scores.inter);
    const double log_rest = std::log(scores.rest);
    next.sum_log_intra += log_intra;
    next.sum_log_inter += log_inter;
    next.sum_log_rest += log_rest;
    next.total += req.cfg.lambda_intra * log_intra + req.cfg.lambda_inter * log_inter +
                  req.cfg.lambda_rest * log_rest;
    next.punc_pending = false;
    ++next.consumed_groups;
    return next;
}

std::vector<Hypothesis> beam_search(const DecodeRequest& req) {
    req.validate();
    const Vocabulary& vocab = req.model->vocab();
    const int target_len = static_cast<int>(req.melody->size());

    std::vector<Hypothesis> active{Hypothesis{}};
    std::vector<Hypothesis> completed;

    const int max_steps = target_len + req.punc_budget + 1;
    for (int step = 0; step <= max_steps && !active.empty(); ++step) {
        std::vector<Hypothesis> expansions;
        for (const Hypothesis& hyp : active) {
            if (hyp.consumed_groups == target_len) {
                // Hard length enforcement: only the end-of-line token remains.
                completed.push_back(finalize(hyp, req));
                continue;
            }
            const auto logprobs = req.model->next_logprobs(req.source, hyp.tokens);
            for (std::size_t id = 0; id < vocab.size(); ++id) {
                if (id == vocab.eol_id()) continue;
                if (vocab.is_punct(id)) {
                    // Punctuation attaches to a preceding syllable, never
                    // doubles, and never ends the line.
                    if (hyp.consumed_groups == 0 || hyp.punc_pending ||
                        hyp.punc_count >= req.punc_budget) {
                        continue;
                    }
                }
                expansions.push_back(step_score(hyp, id, logprobs[id], req));
            }
        }
        if (expansions.empty()) break;
        std::sort(expansions.begin(), expansions.end(), better);
        if (expansions.size() > static_cast<std::size_t>(req.beam_size)) {
            expansions.resize(static_cast<std::size_t>(req.beam_size));
        }
        active = std::move(expansions);
    }

    if (completed.empty()) {
        throw DecodeError("decode failed: beam produced no complete hypothesis for a line of " +
                          std::to_string(target_len) + " groups");
    }
    std::sort(completed.begin(), completed.end(), better);
    if (completed.size() > static_cast<std::size_t>(req.beam_size)) {
        completed.resize(static_cast<std::size_t>(req.beam_size));
    }
    return completed;
}

namespace {

struct ExhaustiveState {
    const DecodeRequest* req;
    std::vector<std::size_t> syllable_ids;
    Hypothesis best;
    bool found = false;
};

// Depth-first enumeration growing hypotheses through the same accrual as
// beam_search, so equal token sequences carry bit-identical totals and ties
// resolve the same way in both decoders.
void enumerate_sequences(ExhaustiveState& st, const Hypothesis& hyp) {
    const DecodeRequest& req = *st.req;
    if (hyp.consumed_groups == static_cast<int>(req.melody->size())) {
        Hypothesis done = finalize(hyp, req);
        if (!st.found || better(done, st.best)) {
            st.best = std::move(done);
            st.found = true;
        }
        return;
    }
    const auto logprobs = req.model->next_logprobs(req.source, hyp.tokens);
    for (const std::size_t id : st.syllable_ids) {
        enumerate_sequences(st, step_score(hyp, id, logprobs[id], req));
    }
}

}  // namespace

Hypothesis exhaustive_decode(const DecodeRequest& req, std::uint64_t max_states) {
    req.validate();
    const Vocabulary& vocab = req.model->vocab();

    ExhaustiveState st;
    st.req = &req;
    for (std::size_t id = 0; id < vocab.size(); ++id) {
        if (id != vocab.eol_id() && !vocab.is_punct(id)) st.syllable_ids.push_back(id);
    }
    if (st.syllable_ids.empty()) throw DecodeError("exhaustive_decode: no syllable tokens");

    const std::uint64_t base = st.syllable_ids.size();
    std::uint64_t states = 1;
    bool overflow = false;
    for (std::size_t i = 0; i < req.melody->size(); ++i) {
        if (states > max_states / base) {
            overflow = true;
            break;
        }
        states *= base;
    }
    if (overflow || states > max_states) {
        throw DecodeError("exhaustive_decode: " + std::to_string(base) + "^" +
                          std::to_string(req.melody->size()) + " states exceed max_states " +
                          std::to_string(max_states));
    }

    enumerate_sequences(st, Hypothesis{});
    return st.best;
}

double recompute_hypothesis_total(const Hypothesis& hyp, const DecodeRequest& req) {
    double log_p = 0.0;
    std::vector<std::string> prefix;
    prefix.reserve(hyp.tokens.size());
    for (const auto& token : hyp.tokens) {
        const auto logprobs = req.model->next_logprobs(req.source, prefix);
        const auto id = req.model->vocab().id_of(token);
        if (!id) throw Error("recompute: token \"" + token + "\" not in vocabulary");
        log_p += logprobs[*id];
        prefix.push_back(token);
    }
    if (hyp.complete) {
        log_p += req.model->next_logprobs(req.source, prefix)[req.model->vocab().eol_id()];
    }
    const auto scores = score_line(*req.melody, hyp.tokens, *req.tone_lexicon,
                                   *req.seg_lexicon, req.cfg, ScoreConvention::Incremental);
    double sum_intra = 0.0, sum_inter = 0.0, sum_rest = 0.0;
    for (const auto& s : scores) {
        sum_intra += std::log(s.intra);
        sum_inter += std::log(s.inter);
        sum_rest += std::log(s.rest);
    }
    return log_p + req.cfg.lambda_intra * sum_intra + req.cfg.lambda_inter * sum_inter +
           req.cfg.lambda_rest * sum_rest;
}

}  // namespace tonalign
