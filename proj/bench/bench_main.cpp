#include <benchmark/benchmark.h>

#include "lts/analytic.hpp"
#include "lts/compose.hpp"
#include "lts/normalize.hpp"
#include "lts/parse.hpp"

using namespace lts;

namespace {

TruncationGrid bench_grid() {
    TruncationGrid g;
    g.z_cap = Q(8);
    g.block_cap = 10;
    g.depth = 3;
    return g;
}

void BM_compose(benchmark::State& st) {
    auto g = bench_grid();
    auto a = parse_series("z*l1 + z^2*l1^-1*l2 + z^3*l3", g);
    auto b = parse_series("z^2 + z^3*l1 + z^(7/2)", g);
    ComposeOptions opt{st.range(0) != 0};
    for (auto _ : st) benchmark::DoNotOptimize(compose(a, b, opt));
}
BENCHMARK(BM_compose)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_compose_serial_reference(benchmark::State& st) {
    auto g = bench_grid();
    auto a = parse_series("z*l1 + z^2*l1^-1*l2 + z^3*l3", g);
    auto b = parse_series("z^2 + z^3*l1 + z^(7/2)", g);
    for (auto _ : st) benchmark::DoNotOptimize(compose_serial(a, b));
}
BENCHMARK(BM_compose_serial_reference)->Unit(benchmark::kMillisecond);

void BM_verify(benchmark::State& st) {
    TruncationGrid g;
    g.z_cap = Q(8);
    g.block_cap = 6;
    g.depth = 2;
    auto f = parse_series("z^3+z^4*l1^2*l2^-1", g);
    auto phi = normalize(f, false).phi;
    VerifyOptions opt{st.range(0) != 0};
    for (auto _ : st) benchmark::DoNotOptimize(verify_normalization(f, phi, opt));
}
BENCHMARK(BM_verify)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_koenigs_grid(benchmark::State& st) {
    AsymptoticSpec s{2, 1, 0, 0};
    auto dom = DomainSpec::standard_quadratic(1);
    CMap f = [](cd z) { return 2.0 * z + std::exp(-z); };
    double R = invariant_threshold(f, s, dom);
    auto k = koenigs_normalize(f, s, dom, R, 1e-13);
    auto pts = domain_samples(dom, R, {40, 60, 10});
    bool par = st.range(0) != 0;
    for (auto _ : st) benchmark::DoNotOptimize(evaluate_grid(k, pts, par));
    st.SetItemsProcessed(st.iterations() * pts.size());
}
BENCHMARK(BM_koenigs_grid)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
