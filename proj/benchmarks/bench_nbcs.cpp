#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "nbcs/learner.hpp"
#include "nbcs/nested_system.hpp"

namespace {

nbcs::NestedSystem uniform_system(std::size_t d, int stages) {
    nbcs::NestedSystem sys = nbcs::NestedSystem::regular(d);
    for (int s = 0; s < stages; ++s)
        for (nbcs::NodeId leaf : sys.leaves()) sys.split(leaf, nbcs::barycenter(sys.node(leaf).simplex));
    return sys;
}

std::vector<nbcs::Point> probes(const nbcs::NestedSystem& sys, std::size_t n) {
    std::mt19937_64 rng(1);
    std::exponential_distribution<double> e(1.0);
    const auto& v = sys.root().simplex.vertices();
    std::vector<nbcs::Point> out;
    for (std::size_t i = 0; i < n; ++i) {
        Eigen::VectorXd w(v.cols());
        for (Eigen::Index k = 0; k < w.size(); ++k) w[k] = e(rng);
        out.push_back(v * (w / w.sum()));
    }
    return out;
}

void BM_Locate(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    const auto sys = uniform_system(d, static_cast<int>(state.range(1)));
    const auto pts = probes(sys, 1024);
    std::size_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(sys.locate(pts[i++ % pts.size()]));
}
BENCHMARK(BM_Locate)->Args({2, 4})->Args({4, 3})->Args({8, 2});

void BM_Embed(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    const auto sys = uniform_system(d, static_cast<int>(state.range(1)));
    const auto pts = probes(sys, 1024);
    std::size_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(sys.embed(pts[i++ % pts.size()]));
}
BENCHMARK(BM_Embed)->Args({2, 4})->Args({4, 3})->Args({8, 2});

void BM_FitUniform(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto data = nbcs::generate_polytope_dataset(n, 2, 5, 0.0, 1).data;
    for (auto _ : state) benchmark::DoNotOptimize(nbcs::fit_uniform(data, 3, 1.0));
    state.SetComplexityN(static_cast<benchmark::IterationCount>(n));
}
BENCHMARK(BM_FitUniform)->Arg(2500)->Arg(5000)->Arg(10000)->Unit(benchmark::kMillisecond)->Complexity();

}  // namespace

BENCHMARK_MAIN();
