#include <benchmark/benchmark.h>

#include <squidbath/lindblad.hpp>
#include <squidbath/spectroscopy.hpp>

using namespace squidbath;

static void BM_HermitianEig(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const ComplexMatrix h = effective_hamiltonian(derive_params(DeviceInputs{}), FockSpace::with_default_pad(n), TermSet::all());
    for (auto _ : state) benchmark::DoNotOptimize(hermitian_eigenvalues(h));
}
BENCHMARK(BM_HermitianEig)->Arg(64)->Arg(128)->Arg(192)->Unit(benchmark::kMillisecond);

static void BM_EffectiveHamiltonian(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const SquidParams p = derive_params(DeviceInputs{});
    const FockOperators ops(FockSpace::with_default_pad(n));
    for (auto _ : state) benchmark::DoNotOptimize(effective_hamiltonian(p, ops, TermSet::all()));
}
BENCHMARK(BM_EffectiveHamiltonian)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

// Operators built once, so this times only the trig-free part.
static void BM_LindbladRhs(benchmark::State& state) {
    const auto n = static_cast<Eigen::Index>(state.range(0));
    const FockOperators ops(FockSpace::with_default_pad(static_cast<std::size_t>(n)));
    const DissipativeModel m = DissipativeModel::build(derive_params(DeviceInputs{}), ops);
    ComplexMatrix rho = ComplexMatrix::Zero(n, n);
    rho(0, 0) = 1.0;
    for (auto _ : state) benchmark::DoNotOptimize(m.lindblad(rho));
}
BENCHMARK(BM_LindbladRhs)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);

static void BM_BornMarkovRhs(benchmark::State& state) {
    const auto n = static_cast<Eigen::Index>(state.range(0));
    const FockOperators ops(FockSpace::with_default_pad(static_cast<std::size_t>(n)));
    const DissipativeModel m = DissipativeModel::build(derive_params(DeviceInputs{}), ops);
    ComplexMatrix rho = ComplexMatrix::Zero(n, n);
    rho(0, 0) = 1.0;
    for (auto _ : state) benchmark::DoNotOptimize(m.bm(rho));
}
BENCHMARK(BM_BornMarkovRhs)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);

static void BM_Completion(benchmark::State& state) {
    const SquidParams p = derive_params(DeviceInputs{});
    for (auto _ : state) benchmark::DoNotOptimize(coefficient_matrix(p, true));
}
BENCHMARK(BM_Completion);
BENCHMARK_MAIN();
