#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "tonalign/melody.hpp"
#include "tonalign/shape.hpp"

using namespace tonalign;

static void BM_ClassifyShape(benchmark::State& state) {
    std::mt19937 rng(42);
    std::uniform_int_distribution<int> pitch(48, 84);
    std::vector<NoteGroup> groups;
    for (int i = 0; i < 1024; ++i) {
        NoteGroup g;
        const int notes = 2 + static_cast<int>(rng() % 7);
        for (int k = 0; k < notes; ++k) {
            g.pitches.push_back(pitch(rng));
            g.durations.push_back(Rational(1));
        }
        groups.push_back(std::move(g));
    }
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(classify_shape(groups[i++ & 1023]));
    }
}
BENCHMARK(BM_ClassifyShape);

static void BM_FitParabola(benchmark::State& state) {
    const std::vector<int> pitches{65, 67, 65, 65, 62, 69, 64, 60};
    std::vector<double> xs(pitches.size());
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = static_cast<double>(i);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_parabola(pitches, xs));
    }
}
BENCHMARK(BM_FitParabola);
