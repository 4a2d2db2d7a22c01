#include <benchmark/benchmark.h>

#include <fstream>

#include "tonalign/segmentation.hpp"
#include "tonalign/utf8.hpp"

using namespace tonalign;

static void BM_SegmentLine(benchmark::State& state) {
    std::ifstream in(std::string(TONALIGN_DATA_DIR) + "/seg_lexicon.txt");
    const SegLexicon lex = SegLexicon::load(in);
    const auto chars = utf8_chars("月光在天空我们想念你永远的爱情像海洋一样温暖");
    for (auto _ : state) {
        benchmark::DoNotOptimize(segment(chars, lex));
    }
}
BENCHMARK(BM_SegmentLine);
