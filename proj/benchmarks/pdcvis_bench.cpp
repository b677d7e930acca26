// Microbenchmarks for the hot paths: the 2-D and 4-D spectral quadratures,
// the O(n^3) grid sums, and the cycle-contraction rate evaluation against its
// naive product-space counterpart. The contraction/naive pairs share the same
// discrete model at the same node count, so the ratio between their timings
// is the algorithmic speedup alone.

#include <benchmark/benchmark.h>

#include "pdcvis/oracle.hpp"
#include "pdcvis/quadrature.hpp"
#include "pdcvis/spectral.hpp"

namespace {

using namespace pdcvis;

SpectralModel bench_model() {
    return SpectralModel(0.5, 1.0, 1.0, ModelShape::gaussian);
}

FilterSpec bench_filter_a() { return FilterSpec(FilterShape::gaussian, 1.2, 0.0); }
FilterSpec bench_filter_b() { return FilterSpec(FilterShape::gaussian, 2.0, 0.0); }

QuadratureConfig bench_quadrature(int nodes) {
    QuadratureConfig cfg;
    cfg.nodes_per_axis = nodes;
    cfg.rule = QuadratureRule::trapezoid;
    return cfg;
}

// Discrete model plus the rate-evaluation knobs shared by the oracle pairs.
// tau*delta_p = 10 keeps the configuration in the regime the closed forms
// describe, though for timing purposes only the grid size matters.
struct OracleBench {
    DiscreteModel dm;
    OracleConfig cfg;

    explicit OracleBench(int nodes)
        : dm(make_discrete_model(bench_model(), bench_filter_a(), bench_filter_b(),
                                 bench_quadrature(nodes), nodes)),
          cfg(20.0, 10.0, 0.05) {
        cfg.max_grid = static_cast<std::size_t>(nodes);
    }
};

void BM_TwoDimIntegrals(benchmark::State& state) {
    const auto model = bench_model();
    const auto fa = bench_filter_a();
    const auto fb = bench_filter_b();
    QuadratureConfig cfg;
    cfg.nodes_per_axis = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto result = compute_two_dim(model, fa, fb, cfg);
        benchmark::DoNotOptimize(result);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_TwoDimIntegrals)
    ->Arg(16)->Arg(32)->Arg(64)->Arg(128)
    ->Unit(benchmark::kMillisecond)->Complexity(benchmark::oNSquared);

void BM_ExchangeIntegral(benchmark::State& state) {
    const auto model = bench_model();
    const auto fa = bench_filter_a();
    const auto fb = bench_filter_b();
    QuadratureConfig cfg;
    cfg.j4_nodes_per_axis = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto result = compute_j4(model, fa, fb, cfg);
        benchmark::DoNotOptimize(result);
    }
    state.SetComplexityN(state.range(0));
}
// Node counts start where the built-in n-vs-2n refinement check accepts the
// result for this model; the wide tails of the twin-beam weight need ~16
// nodes per axis before the 4-D sum settles.
BENCHMARK(BM_ExchangeIntegral)
    ->Arg(16)->Arg(20)->Arg(24)
    ->Unit(benchmark::kMillisecond);

void BM_GridSums(benchmark::State& state) {
    OracleBench b(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto sums = oracle_j_sums(b.dm);
        benchmark::DoNotOptimize(sums);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GridSums)
    ->Arg(32)->Arg(64)->Arg(128)->Arg(256)
    ->Unit(benchmark::kMillisecond)->Complexity(benchmark::oNCubed);

void BM_PairRateContraction(benchmark::State& state) {
    OracleBench b(static_cast<int>(state.range(0)));
    const double tau = b.cfg.tau;
    for (auto _ : state) {
        double r = oracle_R2(b.dm, b.cfg, SetupKind::franson, tau, tau, 0.0, 0.0);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_PairRateContraction)
    ->Arg(8)->Arg(12)->Arg(16)
    ->Unit(benchmark::kMicrosecond);

void BM_PairRateNaive(benchmark::State& state) {
    OracleBench b(static_cast<int>(state.range(0)));
    const double tau = b.cfg.tau;
    for (auto _ : state) {
        double r = detail::oracle_R2_naive(b.dm, b.cfg, SetupKind::franson,
                                           tau, tau, 0.0, 0.0);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_PairRateNaive)
    ->Arg(8)->Arg(12)->Arg(16)
    ->Unit(benchmark::kMicrosecond);

void BM_FourfoldContraction(benchmark::State& state) {
    OracleBench b(static_cast<int>(state.range(0)));
    const double tau = b.cfg.tau;
    for (auto _ : state) {
        auto r = oracle_R4(b.dm, b.cfg, SetupKind::franson, tau, tau, 0.0, 0.0);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_FourfoldContraction)
    ->Arg(6)->Arg(8)->Arg(16)->Arg(24)
    ->Unit(benchmark::kMillisecond);

// The 6-deep product-space sum; n = 8 already costs ~n^6 = 2.6e5 times the
// per-point work, so the argument range stays small on purpose.
void BM_FourfoldNaive(benchmark::State& state) {
    OracleBench b(static_cast<int>(state.range(0)));
    const double tau = b.cfg.tau;
    for (auto _ : state) {
        double r41 = detail::oracle_R41_naive(b.dm, b.cfg, SetupKind::franson,
                                              tau, tau, 0.0, 0.0);
        double r42 = detail::oracle_R42cc_naive(b.dm, b.cfg, SetupKind::franson,
                                                tau, tau, 0.0, 0.0);
        double r43 = detail::oracle_R43_naive(b.dm, b.cfg, SetupKind::franson,
                                              tau, tau, 0.0, 0.0);
        benchmark::DoNotOptimize(r41 + r42 + r43);
    }
}
BENCHMARK(BM_FourfoldNaive)
    ->Arg(6)->Arg(8)
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
