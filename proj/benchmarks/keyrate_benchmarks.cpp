// SPDX-License-Identifier: Apache-2.0
//
// Microbenchmarks for the hot paths: the k-NN mutual-information estimator
// (end to end and its kd-tree core), the scalar estimators, the
// autocorrelation/Levinson-Durbin pipeline, and the channel simulator.
//
// Run: keyrate_benchmarks [--benchmark_filter=...]

#include <cstdint>
#include <vector>

#include <benchmark/benchmark.h>

#include "keyrate/channel_sim.hpp"
#include "keyrate/estimators.hpp"
#include "keyrate/kdtree.hpp"
#include "keyrate/preprocess.hpp"
#include "keyrate/rng.hpp"

using namespace keyrate;

namespace {

void correlated_pairs(std::uint64_t seed, std::size_t n, double rho, std::vector<double>& x,
                      std::vector<double>& y) {
    GaussianSampler gauss(seed);
    x.resize(n);
    y.resize(n);
    const double ortho = std::sqrt(1.0 - rho * rho);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = gauss();
        const double v = gauss();
        x[i] = u;
        y[i] = rho * u + ortho * v;
    }
}

void bm_ksg_mutual_information(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<double> x, y;
    correlated_pairs(1, n, 0.9, x, y);
    for (auto _ : state) {
        MIEstimate est = ksg_mutual_information(x, y, 4, kAutoJitterAmplitude, 7, 1);
        benchmark::DoNotOptimize(est.value);
    }
    state.SetComplexityN(static_cast<benchmark::IterationCount>(n));
}
BENCHMARK(bm_ksg_mutual_information)->Arg(1000)->Arg(10000)->Arg(100000)->Complexity()->Unit(benchmark::kMillisecond);

void bm_kdtree_build(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<double> x, y;
    correlated_pairs(2, n, 0.5, x, y);
    for (auto _ : state) {
        KdTree2D tree(x, y);
        benchmark::DoNotOptimize(&tree);
    }
}
BENCHMARK(bm_kdtree_build)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void bm_kdtree_kth_neighbor(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<double> x, y;
    correlated_pairs(3, n, 0.5, x, y);
    KdTree2D tree(x, y);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(tree.kth_neighbor_distance(i, 4));
        i = (i + 1) % n;
    }
}
BENCHMARK(bm_kdtree_kth_neighbor)->Arg(10000)->Arg(100000);

void bm_digamma(benchmark::State& state) {
    double x = 0.5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(digamma(x));
        x += 1.0;
        if (x > 1e6) x = 0.5;
    }
}
BENCHMARK(bm_digamma);

void bm_pearson(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<double> x, y;
    correlated_pairs(4, n, 0.7, x, y);
    for (auto _ : state) benchmark::DoNotOptimize(pearson(x, y));
}
BENCHMARK(bm_pearson)->Arg(100000);

void bm_autocorrelation(benchmark::State& state) {
    GaussianSampler gauss(5);
    TimeSeries s;
    s.values.resize(100000);
    for (auto& v : s.values) v = gauss();
    for (auto _ : state) benchmark::DoNotOptimize(autocorrelation(s, 30));
}
BENCHMARK(bm_autocorrelation)->Unit(benchmark::kMillisecond);

void bm_levinson_durbin(benchmark::State& state) {
    const auto order = static_cast<std::size_t>(state.range(0));
    std::vector<double> r(order + 1, 0.0);
    r[0] = 1.1;
    for (std::size_t l = 0; l <= order; ++l) r[l] += std::cos(0.3 * static_cast<double>(l));
    for (auto _ : state) {
        PredictorModel m = levinson_durbin(r);
        benchmark::DoNotOptimize(m.coefficients.data());
    }
}
BENCHMARK(bm_levinson_durbin)->Arg(10)->Arg(30)->Arg(50);

void bm_simulate_trace_white(benchmark::State& state) {
    ChannelConfig config;
    config.seed = 6;
    for (auto _ : state) {
        TraceSet t = simulate_trace(config, 0.05, 100000, 5.0);
        benchmark::DoNotOptimize(t.x.values.data());
    }
}
BENCHMARK(bm_simulate_trace_white)->Unit(benchmark::kMillisecond);

void bm_simulate_trace_cyclic_ar(benchmark::State& state) {
    ChannelConfig config;
    config.seed = 7;
    config.temporal.ar_coefficients = {0.8};
    config.temporal.cyclic_mode = CyclicMode::continuous;
    for (auto _ : state) {
        TraceSet t = simulate_trace(config, 0.05, 100000, 5.0);
        benchmark::DoNotOptimize(t.x.values.data());
    }
}
BENCHMARK(bm_simulate_trace_cyclic_ar)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
