#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "hkdelay/dde.hpp"
#include "hkdelay/meanfield.hpp"
#include "hkdelay/particle.hpp"
#include "hkdelay/wasserstein.hpp"

namespace hk = hkdelay;

namespace {

hk::PointSet cloud(std::size_t n, std::size_t d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    hk::PointSet p(d, n);
    for (double& x : p.coords()) x = u(rng);
    return p;
}

hk::ModelConfig model(std::size_t m, std::size_t n) {
    hk::ModelConfig c;
    c.dim = 2;
    c.delays = hk::DelayConfig(0.25, 0.125);
    c.kernels.psi = hk::Kernel::inverse_power(1.0, 0.5);
    c.kernels.phi = hk::Kernel::inverse_power(1.0, 0.5);
    c.kernels.rho = hk::Kernel::truncated_exponential(1.0, 1.0, 0.1);
    const auto pts = cloud(m + n, 2, 11);
    for (std::size_t i = 0; i < m + n; ++i) {
        auto h = hk::HistoryFunction::constant(pts.point(i), 0.25);
        (i < m ? c.leader_histories : c.follower_histories).push_back(std::move(h));
    }
    return c;
}

}  // namespace

static void BM_IntegrateDelayedDecay(benchmark::State& state) {
    const hk::DelayedRhs rhs = [](double, std::span<const double>, const hk::LaggedStates& lag,
                                  std::span<double> dx) { dx[0] = -lag[0][0]; };
    for (auto _ : state) {
        auto sol = hk::integrate(rhs, {hk::HistoryFunction::constant({1.0}, 1.0)}, {1.0}, 10.0, 1e-3);
        benchmark::DoNotOptimize(sol.value_table().data());
    }
}
BENCHMARK(BM_IntegrateDelayedDecay)->Unit(benchmark::kMillisecond);

static void BM_ParticleSimulate(benchmark::State& state) {
    const auto c = model(3, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto sol = hk::simulate(c, 5.0, 0.0125);
        benchmark::DoNotOptimize(sol.value_table().data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ParticleSimulate)->RangeMultiplier(2)->Range(16, 128)->Unit(benchmark::kMillisecond)->Complexity();

static void BM_DpUniform(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = hk::EmpiricalMeasure::uniform(cloud(n, 2, 1));
    const auto b = hk::EmpiricalMeasure::uniform(cloud(n, 2, 2));
    for (auto _ : state) benchmark::DoNotOptimize(hk::dp_uniform(a, b, 2.0).distance);
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DpUniform)->RangeMultiplier(2)->Range(8, 256)->Complexity();

static void BM_DinfUniform(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = hk::EmpiricalMeasure::uniform(cloud(n, 2, 3));
    const auto b = hk::EmpiricalMeasure::uniform(cloud(n, 2, 4));
    for (auto _ : state) benchmark::DoNotOptimize(hk::dinf_uniform(a, b).distance);
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DinfUniform)->RangeMultiplier(2)->Range(8, 256)->Complexity();

BENCHMARK_MAIN();
