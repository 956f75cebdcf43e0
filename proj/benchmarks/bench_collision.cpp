#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

#include "softboltz/collision.hpp"

namespace {

using namespace softboltz;

std::vector<double> smooth_ratio(const VelocityGrid& g) {
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Vec3 v = g.node(i);
        out[i] = 0.1 * std::exp(-0.25 * norm2(v - Vec3{0.5, 0.0, 0.0})) / std::sqrt(maxwellian(v));
    }
    return out;
}

void BM_GainSweep(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    auto grid = std::make_shared<const VelocityGrid>(8.0, n);
    const CollisionEngine engine(grid, 8, KernelParams{});
    const auto phi = smooth_ratio(*grid);
    for (auto _ : state) {
        auto sums = engine.gain_sums(phi, phi, grid->maxwellian(),
                                     CollisionEngine::kAB | CollisionEngine::kA1);
        benchmark::DoNotOptimize(sums.ab.data());
    }
}
BENCHMARK(BM_GainSweep)->Arg(9)->Arg(13)->Arg(17)->Arg(25)->Unit(benchmark::kMillisecond);

void BM_LossSum(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    auto grid = std::make_shared<const VelocityGrid>(8.0, n);
    const CollisionEngine engine(grid, 8, KernelParams{});
    const auto phi = smooth_ratio(*grid);
    for (auto _ : state) {
        auto l = engine.loss_sum(phi);
        benchmark::DoNotOptimize(l.data());
    }
}
BENCHMARK(BM_LossSum)->Arg(17)->Arg(25)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
