#include <benchmark/benchmark.h>

#include <fstream>

#include "tonalign/candidates.hpp"
#include "tonalign/decoder.hpp"
#include "tonalign/utf8.hpp"

using namespace tonalign;

static void BM_BeamSearch(benchmark::State& state) {
    std::ifstream tones_in(std::string(TONALIGN_DATA_DIR) + "/tone_lexicon.tsv");
    const ToneLexicon tones = ToneLexicon::load(tones_in);
    std::ifstream segs_in(std::string(TONALIGN_DATA_DIR) + "/seg_lexicon.txt");
    const SegLexicon segs = SegLexicon::load(segs_in);

    std::ifstream corpus_in(std::string(TONALIGN_DATA_DIR) + "/examples/corpus.txt");
    std::vector<std::vector<std::string>> corpus;
    std::string line;
    std::vector<std::string> tokens;
    while (std::getline(corpus_in, line)) {
        if (line.empty()) continue;
        corpus.push_back(utf8_chars(line));
        for (const auto& t : corpus.back()) tokens.push_back(t);
    }
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    const auto model = train_ngram(corpus, 2, 0.5,
                                   Vocabulary::build(std::move(tokens), "</s>", tones));

    MelodyLine melody;
    for (int pitch : {60, 62, 64, 62, 60, 57}) {
        melody.groups.push_back(NoteGroup{{pitch}, {Rational(1)}});
        melody.rests.push_back(Rational(0));
    }

    std::ifstream table_in(std::string(TONALIGN_DATA_DIR) + "/transitions_default.tsv");
    DecodeRequest req;
    req.melody = &melody;
    req.cfg.transitions = TransitionTable::load(table_in);
    req.beam_size = static_cast<int>(state.range(0));
    req.model = model.get();
    req.tone_lexicon = &tones;
    req.seg_lexicon = &segs;

    for (auto _ : state) {
        benchmark::DoNotOptimize(beam_search(req));
    }
}
BENCHMARK(BM_BeamSearch)->Arg(4)->Arg(16)->Arg(64);
