#include "tonalign/evaluation.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include <json.hpp>

#include "tonalign/errors.hpp"
#include "tonalign/parallel.hpp"
#include "tonalign/utf8.hpp"

namespace tonalign {

using nlohmann::json;

double corpus_bleu(std::span<const std::vector<std::string>> hypotheses,
                   std::span<const std::vector<std::string>> references, int max_order,
                   bool add_one_smoothing) {
    if (hypotheses.size() != references.size()) {
        throw Error("corpus_bleu: hypothesis/reference count mismatch");
    }
    if (hypotheses.empty()) throw Error("corpus_bleu: empty corpus");
    if (max_order < 1) throw Error("corpus_bleu: max_order must be >= 1");
    for (const auto& ref : references) {
        if (ref.empty()) throw Error("corpus_bleu: empty reference line");
    }

    std::vector<double> matches(static_cast<std::size_t>(max_order), 0.0);
    std::vector<double> totals(static_cast<std::size_t>(max_order), 0.0);
    std::size_t hyp_len = 0, ref_len = 0;

    for (std::size_t line = 0; line < hypotheses.size(); ++line) {
        const auto& hyp = hypotheses[line];
        const auto& ref = references[line];
        hyp_len += hyp.size();
        ref_len += ref.size();
        for (int order = 1; order <= max_order; ++order) {
            const std::size_t n = static_cast<std::size_t>(order);
            if (hyp.size() < n) break;
            std::map<std::vector<std::string>, int> hyp_counts, ref_counts;
            for (std::size_t i = 0; i + n <= hyp.size(); ++i) {
                ++hyp_counts[{hyp.begin() + i, hyp.begin() + i + n}];
            }
            for (std::size_t i = 0; i + n <= ref.size(); ++i) {
                ++ref_counts[{ref.begin() + i, ref.begin() + i + n}];
            }
            for (const auto& [gram, count] : hyp_counts) {
                const auto it = ref_counts.find(gram);
                const int clip = it == ref_counts.end() ? 0 : it->second;
                matches[n - 1] += std::min(count, clip);
                totals[n - 1] += count;
            }
        }
    }

    double log_precision_sum = 0.0;
    for (int order = 0; order < max_order; ++order) {
        double num = matches[static_cast<std::size_t>(order)];
        double den = totals[static_cast<std::size_t>(order)];
        if (add_one_smoothing) {
            num += 1.0;
            den += 1.0;
        }
        if (num <= 0.0 || den <= 0.0) return 0.0;
        log_precision_sum += std::log(num / den);
    }
    if (hyp_len == 0) return 0.0;
    const double brevity =
        hyp_len < ref_len
            ? std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len))
            : 1.0;
    return brevity * std::exp(log_precision_sum / max_order);
}

namespace {

int count_syllables(const std::vector<std::string>& tokens) {
    int n = 0;
    for (const auto& t : tokens) {
        if (!is_punctuation_token(t)) ++n;
    }
    return n;
}

int count_punct(const std::vector<std::string>& tokens) {
    return static_cast<int>(tokens.size()) - count_syllables(tokens);
}

}  // namespace

EvalReport evaluate(std::span<const AlignedTriple> triples,
                    std::span<const std::vector<std::string>> outputs, const EvalContext& ctx) {
    if (triples.size() != outputs.size()) {
        throw Error("evaluate: outputs must align 1:1 with triples");
    }
    if (!ctx.tone_lexicon || !ctx.seg_lexicon) throw Error("evaluate: lexicons missing");
    ctx.cfg.validate();

    EvalReport report;
    report.lines.resize(triples.size());

    parallel_for_indexed(triples.size(), ctx.workers, [&](std::size_t i) {
        LineEval& line = report.lines[i];
        const MelodyLine melody = apply_assignment(triples[i].melody, ctx.strategy);
        const int target = static_cast<int>(melody.size());
        line.target_groups = target;
        line.output_syllables = count_syllables(outputs[i]);
        line.report.length_delta = line.output_syllables - target;
        try {
            const auto scores = score_line(melody, outputs[i], *ctx.tone_lexicon,
                                           *ctx.seg_lexicon, ctx.cfg, ctx.convention);
            if (scores.empty()) throw Error("empty output line");
            // Normalized by the melody length, so short outputs are not
            // rewarded for the positions they never filled.
            double sum_intra = 0, sum_inter = 0, sum_rest = 0, sum_intra_multi = 0;
            int multi = 0;
            for (const auto& s : scores) {
                sum_intra += s.intra;
                sum_inter += s.inter;
                sum_rest += s.rest;
                if (s.multi_note) {
                    sum_intra_multi += s.intra;
                    ++multi;
                }
                if (s.rest < 1.0) ++line.report.missed_rest_count;
            }
            line.report.intra = sum_intra / target;
            line.report.inter = sum_inter / target;
            line.report.rest = sum_rest / target;
            if (multi > 0) line.report.intra_multi = sum_intra_multi / multi;
        } catch (const Error& e) {
            line.flagged = true;
            line.error = e.what();
        }
    });

    double inter = 0, intra = 0, rest = 0, missed = 0, intra_multi = 0;
    int multi_lines = 0;
    std::vector<int> out_lens, target_lens;
    for (const auto& line : report.lines) {
        out_lens.push_back(line.output_syllables);
        target_lens.push_back(line.target_groups);
        if (line.flagged) {
            ++report.flagged_count;
            continue;
        }
        ++report.scored_count;
        inter += line.report.inter;
        intra += line.report.intra;
        rest += line.report.rest;
        missed += line.report.missed_rest_count;
        if (line.report.intra_multi) {
            intra_multi += *line.report.intra_multi;
            ++multi_lines;
        }
    }
    if (report.scored_count > 0) {
        report.mean_inter = inter / report.scored_count;
        report.mean_intra = intra / report.scored_count;
        report.mean_rest = rest / report.scored_count;
        report.mean_missed_rests = missed / report.scored_count;
    }
    if (multi_lines > 0) report.mean_intra_multi = intra_multi / multi_lines;
    report.lengths = length_stats(out_lens, target_lens);

    std::vector<std::vector<std::string>> hyp_lines, ref_lines;
    for (std::size_t i = 0; i < triples.size(); ++i) {
        if (!triples[i].reference) continue;
        hyp_lines.push_back(outputs[i]);
        ref_lines.push_back(utf8_chars(*triples[i].reference));
    }
    if (!hyp_lines.empty()) {
        report.bleu = corpus_bleu(hyp_lines, ref_lines, ctx.bleu_max_order, ctx.bleu_add_one);
    }
    return report;
}

std::vector<LineDecodeResult> decode_corpus(std::span<const AlignedTriple> triples,
                                            const CandidateModel& model,
                                            const EvalContext& ctx, const DecodeOptions& opt) {
    std::vector<LineDecodeResult> results(triples.size());
    std::vector<MelodyLine> melodies(triples.size());
    for (std::size_t i = 0; i < triples.size(); ++i) {
        melodies[i] = apply_assignment(triples[i].melody, ctx.strategy);
    }
    parallel_for_indexed(triples.size(), opt.workers, [&](std::size_t i) {
        DecodeRequest req;
        req.melody = &melodies[i];
        req.source = triples[i].source;
        req.cfg = ctx.cfg;
        req.beam_size = opt.beam_size;
        req.punc_budget = opt.punc_budget;
        req.model = &model;
        req.tone_lexicon = ctx.tone_lexicon;
        req.seg_lexicon = ctx.seg_lexicon;
        try {
            if (opt.use_exhaustive) {
                results[i].best = exhaustive_decode(req, opt.max_states);
            } else {
                results[i].best = beam_search(req).front();
            }
            results[i].ok = true;
        } catch (const Error& e) {
            results[i].error = e.what();
        }
    });
    return results;
}

std::optional<SweepTarget> sweep_target_from_string(std::string_view name) {
    if (name == "inter") return SweepTarget::Inter;
    if (name == "intra") return SweepTarget::Intra;
    if (name == "rest" || name == "R") return SweepTarget::Rest;
    return std::nullopt;
}

std::string_view to_string(SweepTarget target) {
    switch (target) {
        case SweepTarget::Inter: return "inter";
        case SweepTarget::Intra: return "intra";
        case SweepTarget::Rest: return "rest";
    }
    return "?";
}

std::vector<SweepPoint> sweep(std::span<const AlignedTriple> triples,
                              const CandidateModel& model, SweepTarget target,
                              std::span<const double> grid, const EvalContext& ctx,
                              const DecodeOptions& opt) {
    if (grid.empty()) throw Error("sweep: empty grid");
    std::vector<SweepPoint> points;
    points.reserve(grid.size());

    for (const double value : grid) {
        EvalContext point_ctx = ctx;
        switch (target) {
            case SweepTarget::Inter: point_ctx.cfg.lambda_inter = value; break;
            case SweepTarget::Intra: point_ctx.cfg.lambda_intra = value; break;
            case SweepTarget::Rest: point_ctx.cfg.lambda_rest = value; break;
        }

        SweepPoint point;
        point.lambda = value;
        const auto decoded = decode_corpus(triples, model, point_ctx, opt);

        std::vector<AlignedTriple> ok_triples;
        std::vector<std::vector<std::string>> outputs;
        for (std::size_t i = 0; i < decoded.size(); ++i) {
            if (!decoded[i].ok) {
                ++point.failures;
                continue;
            }
            const Hypothesis& best = decoded[i].best;
            ok_triples.push_back(triples[i]);
            outputs.push_back(best.tokens);
            point.punc_count += count_punct(best.tokens);
            switch (target) {
                case SweepTarget::Inter: point.constraint_logscore += best.sum_log_inter; break;
                case SweepTarget::Intra: point.constraint_logscore += best.sum_log_intra; break;
                case SweepTarget::Rest: point.constraint_logscore += best.sum_log_rest; break;
            }
        }
        if (!ok_triples.empty()) {
            const EvalReport report = evaluate(ok_triples, outputs, point_ctx);
            switch (target) {
                case SweepTarget::Inter: point.score = report.mean_inter; break;
                case SweepTarget::Intra: point.score = report.mean_intra; break;
                case SweepTarget::Rest: point.score = report.mean_rest; break;
            }
            point.bleu = report.bleu;
        }
        points.push_back(point);
    }
    return points;
}

namespace {

std::string format_double(double value) {
    std::ostringstream out;
    out.precision(6);
    out << value;
    return out.str();
}

std::string format_length(int count, double ratio) {
    std::ostringstream out;
    out << count << " (";
    out.precision(2);
    out << std::fixed << ratio << ")";
    return out.str();
}

}  // namespace

std::string render_report_tsv(const EvalReport& report, const std::string& label) {
    std::ostringstream out;
    out << "model\tinter\tintra\tavg_missed_rests\tlonger\tshorter\tbleu\n";
    out << label << '\t' << format_double(report.mean_inter) << '\t';
    if (report.mean_intra_multi) {
        out << format_double(*report.mean_intra_multi);
    } else {
        out << '-';
    }
    out << '\t' << format_double(report.mean_missed_rests) << '\t'
        << format_length(report.lengths.n_longer, report.lengths.longer_ratio) << '\t'
        << format_length(report.lengths.n_shorter, report.lengths.shorter_ratio) << '\t';
    if (report.bleu) {
        out << format_double(*report.bleu);
    } else {
        out << '-';
    }
    out << '\n';
    return out.str();
}

std::string render_report_json(const EvalReport& report, const std::string& label) {
    json j;
    j["label"] = label;
    j["corpus"] = {
        {"inter", report.mean_inter},
        {"intra", report.mean_intra},
        {"rest", report.mean_rest},
        {"avg_missed_rests", report.mean_missed_rests},
        {"longer", report.lengths.n_longer},
        {"longer_ratio", report.lengths.longer_ratio},
        {"shorter", report.lengths.n_shorter},
        {"shorter_ratio", report.lengths.shorter_ratio},
        {"scored_lines", report.scored_count},
        {"flagged_lines", report.flagged_count},
    };
    if (report.mean_intra_multi) j["corpus"]["intra_multi"] = *report.mean_intra_multi;
    if (report.bleu) j["corpus"]["bleu"] = *report.bleu;
    json lines = json::array();
    for (const auto& line : report.lines) {
        json jl;
        jl["inter"] = line.report.inter;
        jl["intra"] = line.report.intra;
        if (line.report.intra_multi) jl["intra_multi"] = *line.report.intra_multi;
        jl["rest"] = line.report.rest;
        jl["missed_rests"] = line.report.missed_rest_count;
        jl["length_delta"] = line.report.length_delta;
        jl["output_syllables"] = line.output_syllables;
        jl["target_groups"] = line.target_groups;
        if (line.flagged) jl["error"] = line.error;
        lines.push_back(std::move(jl));
    }
    j["lines"] = std::move(lines);
    return j.dump(2);
}

std::string render_sweep_csv(std::span<const SweepPoint> points) {
    std::ostringstream out;
    out << "lambda,score,bleu,punc_count,failures\n";
    for (const auto& p : points) {
        out << format_double(p.lambda) << ',' << format_double(p.score) << ',';
        if (p.bleu) out << format_double(*p.bleu);
        out << ',' << p.punc_count << ',' << p.failures << '\n';
    }
    return out.str();
}

}  // namespace tonalign
