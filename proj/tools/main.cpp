// tonalign: score, generate, and evaluate melody-aligned Mandarin lyrics.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tonalign/candidates.hpp"
#include "tonalign/decoder.hpp"
#include "tonalign/errors.hpp"
#include "tonalign/evaluation.hpp"
#include "tonalign/melody.hpp"
#include "tonalign/scoring.hpp"
#include "tonalign/utf8.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tonalign;

namespace {

struct RunConfig {
    std::string tone_lexicon;
    std::string seg_lexicon;
    std::string transition_table;
    double lambda_inter = 0.5;
    double lambda_intra = 1.0;
    double lambda_rest = 1.5;
    double epsilon = 0.01;
    int step_max = 2;
    int beam_size = 10;
    int punc_budget = 2;
    int workers = 1;
    std::string strategy = "syllable-to-syllable";
    std::string model = "uniform";
    std::string convention = "whole-line";
    std::string intra_x = "index";
    int bleu_order = 4;
    bool bleu_smooth = false;
    bool oracle = false;
    std::uint64_t max_states = 2'000'000;
    int peer_timeout_ms = 30000;
};

// Flag values sit in optionals so that precedence is flags > config > defaults.
struct Overrides {
    std::optional<std::string> tone_lexicon, seg_lexicon, transition_table;
    std::optional<double> lambda_inter, lambda_intra, lambda_rest, epsilon;
    std::optional<int> step_max, beam_size, punc_budget, workers, bleu_order,
        peer_timeout_ms;
    std::optional<std::string> strategy, model, convention, intra_x;
    std::optional<bool> bleu_smooth, oracle;
    std::optional<std::uint64_t> max_states;
};

void add_common_flags(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--tone-lexicon", o.tone_lexicon, "Tone lexicon TSV");
    cmd->add_option("--seg-lexicon", o.seg_lexicon, "Segmentation word list");
    cmd->add_option("--transition-table", o.transition_table,
                    "Acceptable-transition table TSV (default: permissive)");
    cmd->add_option("--lambda-inter", o.lambda_inter, "Contour constraint weight");
    cmd->add_option("--lambda-intra", o.lambda_intra, "Shape constraint weight");
    cmd->add_option("--lambda-rest", o.lambda_rest, "Rest constraint weight");
    cmd->add_option("--epsilon", o.epsilon, "Mismatch score in (0,1)");
    cmd->add_option("--step-max", o.step_max, "Largest move in semitones counted as a step");
    cmd->add_option("--beam", o.beam_size, "Beam width");
    cmd->add_option("--punc-budget", o.punc_budget, "Punctuation tokens allowed per line");
    cmd->add_option("--workers", o.workers, "Worker threads (output is order-stable)");
    cmd->add_option("--strategy", o.strategy,
                    "note-to-syllable or syllable-to-syllable");
    cmd->add_option("--model", o.model,
                    "uniform | ngram:PATH[?order=N&k=F] | external:COMMAND");
    cmd->add_option("--convention", o.convention, "whole-line or incremental scoring");
    cmd->add_option("--intra-x", o.intra_x, "index or duration fitting positions");
    cmd->add_option("--bleu-order", o.bleu_order, "Max n-gram order for BLEU");
    cmd->add_flag("--bleu-smooth", [&o](std::int64_t) { o.bleu_smooth = true; },
                  "Add-one smoothing for tiny corpora");
    cmd->add_flag("--oracle", [&o](std::int64_t) { o.oracle = true; },
                  "Exact exhaustive decoding (small instances only)");
    cmd->add_option("--max-states", o.max_states, "State cap for --oracle");
    cmd->add_option("--peer-timeout-ms", o.peer_timeout_ms, "External model timeout");
}

void merge_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw Error("config file " + path + ": " + e.what());
    }
    const auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j[key].get<std::decay_t<decltype(field)>>();
    };
    get("tone_lexicon", cfg.tone_lexicon);
    get("seg_lexicon", cfg.seg_lexicon);
    get("transition_table", cfg.transition_table);
    get("lambda_inter", cfg.lambda_inter);
    get("lambda_intra", cfg.lambda_intra);
    get("lambda_rest", cfg.lambda_rest);
    get("epsilon", cfg.epsilon);
    get("step_max", cfg.step_max);
    get("beam_size", cfg.beam_size);
    get("punc_budget", cfg.punc_budget);
    get("workers", cfg.workers);
    get("strategy", cfg.strategy);
    get("model", cfg.model);
    get("convention", cfg.convention);
    get("intra_x", cfg.intra_x);
    get("bleu_order", cfg.bleu_order);
    get("bleu_smooth", cfg.bleu_smooth);
    get("oracle", cfg.oracle);
    get("max_states", cfg.max_states);
    get("peer_timeout_ms", cfg.peer_timeout_ms);
}

void apply_overrides(RunConfig& cfg, const Overrides& o) {
    const auto put = [](auto& field, const auto& opt) {
        if (opt) field = *opt;
    };
    put(cfg.tone_lexicon, o.tone_lexicon);
    put(cfg.seg_lexicon, o.seg_lexicon);
    put(cfg.transition_table, o.transition_table);
    put(cfg.lambda_inter, o.lambda_inter);
    put(cfg.lambda_intra, o.lambda_intra);
    put(cfg.lambda_rest, o.lambda_rest);
    put(cfg.epsilon, o.epsilon);
    put(cfg.step_max, o.step_max);
    put(cfg.beam_size, o.beam_size);
    put(cfg.punc_budget, o.punc_budget);
    put(cfg.workers, o.workers);
    put(cfg.strategy, o.strategy);
    put(cfg.model, o.model);
    put(cfg.convention, o.convention);
    put(cfg.intra_x, o.intra_x);
    put(cfg.bleu_order, o.bleu_order);
    put(cfg.bleu_smooth, o.bleu_smooth);
    put(cfg.oracle, o.oracle);
    put(cfg.max_states, o.max_states);
    put(cfg.peer_timeout_ms, o.peer_timeout_ms);
}

json config_to_json(const RunConfig& cfg) {
    return json{
        {"tone_lexicon", cfg.tone_lexicon},
        {"seg_lexicon", cfg.seg_lexicon},
        {"transition_table", cfg.transition_table},
        {"lambda_inter", cfg.lambda_inter},
        {"lambda_intra", cfg.lambda_intra},
        {"lambda_rest", cfg.lambda_rest},
        {"epsilon", cfg.epsilon},
        {"step_max", cfg.step_max},
        {"beam_size", cfg.beam_size},
        {"punc_budget", cfg.punc_budget},
        {"workers", cfg.workers},
        {"strategy", cfg.strategy},
        {"model", cfg.model},
        {"convention", cfg.convention},
        {"intra_x", cfg.intra_x},
        {"bleu_order", cfg.bleu_order},
        {"bleu_smooth", cfg.bleu_smooth},
        {"oracle", cfg.oracle},
        {"max_states", cfg.max_states},
        {"peer_timeout_ms", cfg.peer_timeout_ms},
    };
}

struct Session {
    RunConfig run;
    ToneLexicon tones;
    SegLexicon segs;
    ConstraintConfig constraints;
    AssignmentStrategy strategy = AssignmentStrategy::SyllableToSyllable;
    ScoreConvention convention = ScoreConvention::WholeLine;
};

Session open_session(const RunConfig& run) {
    Session s;
    s.run = run;
    if (run.tone_lexicon.empty()) throw Error("--tone-lexicon (or config) is required");
    std::ifstream tones_in(run.tone_lexicon);
    if (!tones_in) throw Error("cannot open tone lexicon: " + run.tone_lexicon);
    s.tones = ToneLexicon::load(tones_in);

    if (!run.seg_lexicon.empty()) {
        std::ifstream segs_in(run.seg_lexicon);
        if (!segs_in) throw Error("cannot open segmentation lexicon: " + run.seg_lexicon);
        s.segs = SegLexicon::load(segs_in);
    }

    s.constraints.lambda_inter = run.lambda_inter;
    s.constraints.lambda_intra = run.lambda_intra;
    s.constraints.lambda_rest = run.lambda_rest;
    s.constraints.epsilon = run.epsilon;
    s.constraints.step_max = run.step_max;
    if (!run.transition_table.empty()) {
        std::ifstream table_in(run.transition_table);
        if (!table_in) throw Error("cannot open transition table: " + run.transition_table);
        s.constraints.transitions = TransitionTable::load(table_in);
    }
    if (run.intra_x == "duration") {
        s.constraints.intra_x_mode = IntraXMode::Duration;
    } else if (run.intra_x != "index") {
        throw Error("--intra-x must be index or duration");
    }
    s.constraints.validate();

    const auto strategy = assignment_from_string(run.strategy);
    if (!strategy) throw Error("unknown strategy: " + run.strategy);
    s.strategy = *strategy;

    if (run.convention == "incremental") {
        s.convention = ScoreConvention::Incremental;
    } else if (run.convention != "whole-line") {
        throw Error("--convention must be whole-line or incremental");
    }
    return s;
}

std::vector<AlignedTriple> load_triples_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open melody file: " + path);
    auto triples = load_triples(in);
    if (triples.empty()) throw Error("melody file has no records: " + path);
    return triples;
}

std::vector<std::vector<std::string>> read_corpus_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open corpus file: " + path);
    std::vector<std::vector<std::string>> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        lines.push_back(utf8_chars(line));
    }
    if (lines.empty()) throw Error("corpus file is empty: " + path);
    return lines;
}

// Deterministic vocabulary: sorted unique syllable tokens, then sorted
// punctuation, then the end-of-line token.
Vocabulary vocab_from_tokens(std::vector<std::string> tokens, const ToneLexicon& tones) {
    std::vector<std::string> syllables, puncts{"，", "。"};
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    for (auto& tok : tokens) {
        if (is_punctuation_token(tok)) {
            puncts.push_back(tok);
        } else {
            syllables.push_back(tok);
        }
    }
    std::sort(puncts.begin(), puncts.end());
    puncts.erase(std::unique(puncts.begin(), puncts.end()), puncts.end());
    syllables.insert(syllables.end(), puncts.begin(), puncts.end());
    return Vocabulary::build(std::move(syllables), "</s>", tones);
}

std::unique_ptr<CandidateModel> open_model(const Session& s) {
    const std::string& spec = s.run.model;
    if (spec == "uniform") {
        return make_uniform_model(vocab_from_tokens(s.tones.characters(), s.tones));
    }
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon == std::string::npos ? spec.size() : colon);
    const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (kind == "ngram") {
        std::string path = rest;
        int order = 2;
        double k = 0.5;
        const auto query = rest.find('?');
        if (query != std::string::npos) {
            path = rest.substr(0, query);
            std::stringstream params(rest.substr(query + 1));
            std::string kv;
            while (std::getline(params, kv, '&')) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) throw Error("bad model parameter: " + kv);
                const std::string key = kv.substr(0, eq);
                const std::string value = kv.substr(eq + 1);
                if (key == "order") {
                    order = std::stoi(value);
                } else if (key == "k") {
                    k = std::stod(value);
                } else {
                    throw Error("unknown model parameter: " + key);
                }
            }
        }
        const auto corpus = read_corpus_lines(path);
        std::vector<std::string> tokens;
        for (const auto& line : corpus) tokens.insert(tokens.end(), line.begin(), line.end());
        return train_ngram(corpus, order, k, vocab_from_tokens(std::move(tokens), s.tones));
    }
    if (kind == "external") {
        if (rest.empty()) throw Error("external model needs a command: external:CMD");
        auto transport = std::make_shared<SubprocessTransport>(rest, s.run.peer_timeout_ms);
        return make_external_stream_model(vocab_from_tokens(s.tones.characters(), s.tones),
                                          std::move(transport));
    }
    throw Error("unknown model spec: " + spec + " (use uniform, ngram:..., external:...)");
}

std::string format_score(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", value);
    return buf;
}

void write_output_file(const std::string& out_dir, const std::string& name,
                       const std::string& content) {
    if (out_dir.empty()) return;
    fs::create_directories(out_dir);
    std::ofstream out(fs::path(out_dir) / name, std::ios::binary);
    if (!out) throw Error("cannot write " + name + " under " + out_dir);
    out << content;
}

void echo_config(const std::string& out_dir, const RunConfig& run) {
    if (out_dir.empty()) return;
    write_output_file(out_dir, "effective_config.json", config_to_json(run).dump(2) + "\n");
}

EvalContext eval_context(const Session& s) {
    EvalContext ctx;
    ctx.tone_lexicon = &s.tones;
    ctx.seg_lexicon = &s.segs;
    ctx.cfg = s.constraints;
    ctx.strategy = s.strategy;
    ctx.convention = s.convention;
    ctx.bleu_max_order = s.run.bleu_order;
    ctx.bleu_add_one = s.run.bleu_smooth;
    ctx.workers = s.run.workers;
    return ctx;
}

DecodeOptions decode_options(const Session& s) {
    DecodeOptions opt;
    opt.beam_size = s.run.beam_size;
    opt.punc_budget = s.run.punc_budget;
    opt.use_exhaustive = s.run.oracle;
    opt.max_states = s.run.max_states;
    opt.workers = s.run.workers;
    return opt;
}

int cmd_score(const Session& s, const std::string& melody_path, const std::string& field,
              const std::string& out_dir, const std::string& label) {
    const auto triples = load_triples_file(melody_path);
    std::vector<std::vector<std::string>> outputs;
    outputs.reserve(triples.size());
    for (const auto& t : triples) {
        std::string text;
        if (field == "reference" || (field == "auto" && t.reference)) {
            text = t.reference.value_or("");
        } else {
            text = t.source;
        }
        outputs.push_back(text.empty() ? std::vector<std::string>{} : utf8_chars(text));
    }
    const EvalReport report = evaluate(triples, outputs, eval_context(s));
    std::cout << render_report_tsv(report, label);
    for (std::size_t i = 0; i < report.lines.size(); ++i) {
        if (report.lines[i].flagged) {
            std::cerr << "line " << (i + 1) << ": " << report.lines[i].error << "\n";
        }
    }
    echo_config(out_dir, s.run);
    write_output_file(out_dir, "report.tsv", render_report_tsv(report, label));
    write_output_file(out_dir, "report.json", render_report_json(report, label) + "\n");
    return report.flagged_count > 0 ? 1 : 0;
}

int cmd_translate(const Session& s, const std::string& melody_path,
                  const std::string& out_dir) {
    const auto triples = load_triples_file(melody_path);
    const auto model = open_model(s);
    const auto results = decode_corpus(triples, *model, eval_context(s), decode_options(s));

    std::ostringstream out;
    int failures = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (!results[i].ok) {
            ++failures;
            out << (i + 1) << "\tERROR\t" << results[i].error << "\n";
            continue;
        }
        const Hypothesis& best = results[i].best;
        const MelodyLine melody = apply_assignment(triples[i].melody, s.strategy);
        const auto scores = score_line(melody, best.tokens, s.tones, s.segs, s.constraints,
                                       ScoreConvention::Incremental);
        double intra = 0, inter = 0, rest = 0;
        for (const auto& p : scores) {
            intra += p.intra;
            inter += p.inter;
            rest += p.rest;
        }
        const double n = static_cast<double>(melody.size());
        std::string text;
        for (const auto& tok : best.tokens) text += tok;
        out << (i + 1) << '\t' << text << '\t' << format_score(best.total) << '\t'
            << format_score(inter / n) << '\t' << format_score(intra / n) << '\t'
            << format_score(rest / n) << "\n";
    }
    std::cout << "line\ttokens\ttotal\tinter\tintra\trest\n" << out.str();
    echo_config(out_dir, s.run);
    write_output_file(out_dir, "translations.tsv",
                      "line\ttokens\ttotal\tinter\tintra\trest\n" + out.str());
    if (failures > 0) {
        std::cerr << failures << " of " << results.size() << " lines failed\n";
    }
    return failures == static_cast<int>(results.size()) ? 1 : 0;
}

int cmd_eval(const Session& s, const std::string& melody_path, const std::string& hyp_path,
             const std::string& out_dir, const std::string& label) {
    const auto triples = load_triples_file(melody_path);
    std::ifstream hyp_in(hyp_path);
    if (!hyp_in) throw Error("cannot open hypothesis file: " + hyp_path);
    std::vector<std::vector<std::string>> outputs;
    std::string line;
    while (std::getline(hyp_in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        outputs.push_back(utf8_chars(line));
    }
    if (outputs.size() != triples.size()) {
        throw Error("hypothesis count " + std::to_string(outputs.size()) +
                    " does not match melody count " + std::to_string(triples.size()));
    }
    const EvalReport report = evaluate(triples, outputs, eval_context(s));
    std::cout << render_report_tsv(report, label);
    echo_config(out_dir, s.run);
    write_output_file(out_dir, "report.tsv", render_report_tsv(report, label));
    write_output_file(out_dir, "report.json", render_report_json(report, label) + "\n");
    return report.flagged_count > 0 ? 1 : 0;
}

int cmd_sweep(const Session& s, const std::string& melody_path, const std::string& target_name,
              const std::string& grid_text, const std::string& out_dir) {
    const auto target = sweep_target_from_string(target_name);
    if (!target) throw Error("--sweep-lambda must be inter, intra, or rest");
    std::vector<double> grid;
    std::stringstream parts(grid_text);
    std::string item;
    while (std::getline(parts, item, ',')) {
        if (!item.empty()) grid.push_back(std::stod(item));
    }
    if (grid.empty()) throw Error("--grid needs comma-separated values");

    const auto triples = load_triples_file(melody_path);
    const auto model = open_model(s);
    const auto points = sweep(triples, *model, *target, grid, eval_context(s),
                              decode_options(s));
    const std::string csv = render_sweep_csv(points);
    std::cout << csv;
    echo_config(out_dir, s.run);
    write_output_file(out_dir, "sweep_" + std::string(to_string(*target)) + ".csv", csv);
    return 0;
}

int cmd_segment(const Session& s, const std::string& text) {
    const auto run = [&](const std::string& line) {
        const auto chars = utf8_chars(line);
        const auto spans = segment(chars, s.segs);
        std::string out;
        for (const auto& span : spans) {
            if (!out.empty()) out += " / ";
            for (std::size_t i = span.begin; i < span.end; ++i) out += chars[i];
        }
        std::cout << out << "\n";
    };
    if (!text.empty()) {
        run(text);
    } else {
        std::string line;
        while (std::getline(std::cin, line)) run(line);
    }
    return 0;
}

int cmd_tones(const Session& s, const std::string& text) {
    const auto run = [&](const std::string& line) {
        const auto chars = utf8_chars(line);
        std::vector<std::string> syllables;
        for (const auto& c : chars) {
            if (!is_punctuation_token(c)) syllables.push_back(c);
        }
        const auto spans = segment(syllables, s.segs);
        const auto citation = s.tones.annotate(syllables, spans);
        const auto sung = apply_sandhi(citation, spans);
        for (std::size_t i = 0; i < syllables.size(); ++i) {
            if (i) std::cout << ' ';
            std::cout << syllables[i] << ':' << citation[i].value();
            if (sung[i].value() != citation[i].value()) std::cout << "->" << sung[i].value();
        }
        std::cout << "\n";
    };
    if (!text.empty()) {
        run(text);
    } else {
        std::string line;
        while (std::getline(std::cin, line)) run(line);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"melody-lyric alignment scoring and constrained lyric generation"};
    app.require_subcommand(1);

    std::string config_path, melody_path, out_dir, hyp_path;
    std::string field = "auto", label = "tonalign";
    std::string sweep_target = "inter", grid = "0,0.25,0.5,1,2,4";
    std::string text;
    Overrides overrides;

    const auto add_shared = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file");
        cmd->add_option("--out", out_dir, "Output directory");
        add_common_flags(cmd, overrides);
    };

    CLI::App* score = app.add_subcommand("score", "Score existing lyrics against melodies");
    add_shared(score);
    score->add_option("--melody", melody_path, "Melody records (JSONL)")->required();
    score->add_option("--field", field, "Lyrics field: auto, source, or reference");
    score->add_option("--label", label, "Row label for the report");

    CLI::App* translate = app.add_subcommand("translate", "Generate melody-aligned lyrics");
    add_shared(translate);
    translate->add_option("--melody", melody_path, "Melody records (JSONL)")->required();

    CLI::App* eval = app.add_subcommand("eval", "Evaluate hypothesis lyrics against references");
    add_shared(eval);
    eval->add_option("--melody", melody_path, "Melody records (JSONL)")->required();
    eval->add_option("--hyp", hyp_path, "Hypotheses, one line per record")->required();
    eval->add_option("--label", label, "Row label for the report");

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Sweep one constraint weight");
    add_shared(sweep_cmd);
    sweep_cmd->add_option("--melody", melody_path, "Melody records (JSONL)")->required();
    sweep_cmd->add_option("--sweep-lambda", sweep_target, "inter, intra, or rest");
    sweep_cmd->add_option("--grid", grid, "Comma-separated weight values");

    CLI::App* segment_cmd = app.add_subcommand("segment", "Dump word segmentation");
    add_shared(segment_cmd);
    segment_cmd->add_option("--text", text, "Text to segment (default: stdin)");

    CLI::App* tones_cmd = app.add_subcommand("tones", "Dump tones and sandhi");
    add_shared(tones_cmd);
    tones_cmd->add_option("--text", text, "Text to annotate (default: stdin)");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig run;
        if (!config_path.empty()) merge_config_file(run, config_path);
        apply_overrides(run, overrides);
        const Session session = open_session(run);

        if (score->parsed()) return cmd_score(session, melody_path, field, out_dir, label);
        if (translate->parsed()) return cmd_translate(session, melody_path, out_dir);
        if (eval->parsed()) return cmd_eval(session, melody_path, hyp_path, out_dir, label);
        if (sweep_cmd->parsed()) {
            return cmd_sweep(session, melody_path, sweep_target, grid, out_dir);
        }
        if (segment_cmd->parsed()) return cmd_segment(session, text);
        if (tones_cmd->parsed()) return cmd_tones(session, text);
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "tonalign: " << e.what() << "\n";
        return 2;
    }
}
