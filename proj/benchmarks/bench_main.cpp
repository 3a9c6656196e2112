#include <benchmark/benchmark.h>

#include "fri/datagen.hpp"
#include "fri/lupi.hpp"
#include "fri/ordreg.hpp"
#include "fri/relevance.hpp"
#include "fri/thresholding.hpp"

namespace {

using namespace fri;

data::Dataset make_data(int samples, int features) {
    datagen::GenSpec spec;
    spec.n_samples = samples;
    spec.n_strong = std::min(2, features);
    spec.n_irrelevant = features - spec.n_strong;
    spec.n_bins = 5;
    spec.seed = 17;
    return datagen::generate(spec).first;
}

void bm_fit_explicit(benchmark::State& state) {
    const auto data = make_data(static_cast<int>(state.range(0)), 8);
    for (auto _ : state)
        benchmark::DoNotOptimize(ordreg::fit_explicit(data, 1.0));
}
BENCHMARK(bm_fit_explicit)->Arg(50)->Arg(150)->Arg(400);

void bm_fit_implicit(benchmark::State& state) {
    const auto data = make_data(static_cast<int>(state.range(0)), 8);
    for (auto _ : state)
        benchmark::DoNotOptimize(ordreg::fit_implicit(data, 1.0));
}
BENCHMARK(bm_fit_implicit)->Arg(50)->Arg(150);

void bm_feature_bounds(benchmark::State& state) {
    const auto data = make_data(150, static_cast<int>(state.range(0)));
    const relevance::RelevanceParams params;
    const auto baseline = ordreg::fit_explicit(data, params.C);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            relevance::min_relevance(data, baseline, 0, params));
        benchmark::DoNotOptimize(
            relevance::max_relevance(data, baseline, 0, params));
    }
}
BENCHMARK(bm_feature_bounds)->Arg(6)->Arg(12);

void bm_full_profile(benchmark::State& state) {
    const auto data = make_data(100, static_cast<int>(state.range(0)));
    const relevance::RelevanceParams params;
    for (auto _ : state)
        benchmark::DoNotOptimize(
            relevance::relevance_profile(data, params, 1, false));
}
BENCHMARK(bm_full_profile)->Arg(6)->Arg(12);

void bm_fit_lupi(benchmark::State& state) {
    datagen::GenSpec spec = datagen::preset("lupi-set5");
    spec.n_samples = static_cast<int>(state.range(0));
    spec.seed = 17;
    const auto data = datagen::generate_lupi(spec).first;
    for (auto _ : state)
        benchmark::DoNotOptimize(lupi::fit_lupi(data, {1.0, 0.1}));
}
BENCHMARK(bm_fit_lupi)->Arg(50)->Arg(100);

void bm_noise_population_draw(benchmark::State& state) {
    const auto data = make_data(100, 8);
    const relevance::RelevanceParams params;
    for (auto _ : state)
        benchmark::DoNotOptimize(
            thresholding::noise_populations(data, params, 2, 17, 1));
}
BENCHMARK(bm_noise_population_draw);

}  // namespace

BENCHMARK_MAIN();
