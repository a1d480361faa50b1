#include <benchmark/benchmark.h>

#include "sectoria/calculus.hpp"
#include "sectoria/model.hpp"
#include "sectoria/operator.hpp"
#include "sectoria/square_function.hpp"

using namespace sectoria;

namespace {

SectorialOperator bench_operator(Eigen::Index dim) {
    FamilyParams p;
    p.dim = dim;
    p.seed = 42;
    return make_family(Family::random_accretive, p);
}

void BM_OperatorConstruction(benchmark::State& state) {
    FamilyParams p;
    p.dim = state.range(0);
    p.seed = 42;
    const ComplexMatrix m = make_family(Family::random_accretive, p).matrix();
    for (auto _ : state) {
        SectorialOperator a(m);
        benchmark::DoNotOptimize(a.omega_est());
    }
}
BENCHMARK(BM_OperatorConstruction)->Arg(2)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_Resolvent(benchmark::State& state) {
    const SectorialOperator a = bench_operator(state.range(0));
    const Complex z(-1.3, 0.7);
    for (auto _ : state) benchmark::DoNotOptimize(a.resolvent(z));
}
BENCHMARK(BM_Resolvent)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

void BM_DunfordRiesz(benchmark::State& state) {
    const SectorialOperator a = bench_operator(state.range(0));
    const ScalarSymbol psi = symbol_registry("sqrt_over_1p");
    for (auto _ : state) benchmark::DoNotOptimize(dunford_riesz(a, psi));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DunfordRiesz)->Arg(2)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_FractionalPower(benchmark::State& state) {
    const SectorialOperator a = bench_operator(state.range(0));
    for (auto _ : state) {
        // bypass the operator cache by alternating exponents
        benchmark::DoNotOptimize(
            extended_calculus(a, power_symbol(0.5), QuadOptions{}, 1, 0.5));
    }
}
BENCHMARK(BM_FractionalPower)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_GramOperator(benchmark::State& state) {
    const SectorialOperator a = bench_operator(state.range(0));
    const ScalarSymbol psi = symbol_registry("sqrt_over_1p");
    for (auto _ : state) benchmark::DoNotOptimize(gram_operator(a, psi));
}
BENCHMARK(BM_GramOperator)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_ControlMap(benchmark::State& state) {
    const SectorialOperator a = bench_operator(4);
    const auto battery = default_test_battery(2.0, 4);
    for (auto _ : state) benchmark::DoNotOptimize(control_map(a, battery.front(), 2.0));
}
BENCHMARK(BM_ControlMap)->Unit(benchmark::kMillisecond);

void BM_HankelBuild(benchmark::State& state) {
    const SectorialOperator a = bench_operator(4);
    const CharFn c(a, 0.5, 2.0);
    const Contour contour =
        Contour::sector_boundary(2.0, RadialGrid::gauss_legendre(-24.0, 24.0, state.range(0)));
    for (auto _ : state) {
        HankelOperator h(c, contour);
        benchmark::DoNotOptimize(h.excluded_nodes());
    }
}
BENCHMARK(BM_HankelBuild)->Arg(256)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
