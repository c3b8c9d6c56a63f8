#include <benchmark/benchmark.h>

#include <random>

#include "amf/cluster.hpp"
#include "amf/lasso.hpp"
#include "amf/stats.hpp"
#include "amf/sweep.hpp"
#include "amf/synth.hpp"

using namespace amf;

namespace {

Matrix gaussian(std::mt19937_64& rng, Index n, Index p) {
    std::normal_distribution<double> z;
    Matrix m(n, p);
    for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < n; ++i) m(i, j) = z(rng);
    }
    return m;
}

}  // namespace

static void BM_LassoSolve(benchmark::State& state) {
    std::mt19937_64 rng(1);
    const Index p = state.range(0);
    const Matrix x = gaussian(rng, 156, p);
    const Vector y = x.leftCols(3).rowwise().sum() + gaussian(rng, 156, 1).col(0);
    const double lam = 0.05 * lambda_max(x, y);
    for (auto _ : state) benchmark::DoNotOptimize(lasso_solve(x, y, lam));
}
BENCHMARK(BM_LassoSolve)->Arg(10)->Arg(40)->Arg(120);

static void BM_CvPath(benchmark::State& state) {
    std::mt19937_64 rng(2);
    const Index p = state.range(0);
    const Matrix x = gaussian(rng, 156, p);
    const Vector y = x.leftCols(3).rowwise().sum() + gaussian(rng, 156, 1).col(0);
    for (auto _ : state) benchmark::DoNotOptimize(cv_path(x, y));
}
BENCHMARK(BM_CvPath)->Arg(20)->Arg(60)->Unit(benchmark::kMillisecond);

static void BM_MinimaxCluster(benchmark::State& state) {
    std::mt19937_64 rng(3);
    const Index n = state.range(0);
    const Matrix d = correlation_distance_matrix(gaussian(rng, 156, n));
    std::vector<std::string> leaves(static_cast<std::size_t>(n), "x");
    for (auto _ : state) benchmark::DoNotOptimize(minimax_cluster(leaves, d));
}
BENCHMARK(BM_MinimaxCluster)->Arg(20)->Arg(80)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_BhyAdjust(benchmark::State& state) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u;
    std::vector<double> p(static_cast<std::size_t>(state.range(0)));
    for (auto& v : p) v = u(rng);
    for (auto _ : state) benchmark::DoNotOptimize(bhy_adjust(p));
}
BENCHMARK(BM_BhyAdjust)->Arg(100)->Arg(10000);

static void BM_WindowGibs(benchmark::State& state) {
    SynthSpec spec;
    spec.n_stocks = 10;
    spec.n_weeks = 200;
    const auto market = generate(spec);
    const SweepConfig cfg;
    const auto wd = window_data(market.data, enumerate_windows(2007, 2009, 3).front(), cfg.min_coverage);
    for (auto _ : state) {
        const auto ctx = prepare_gibs(wd.dv, market.data.factors.factors(), Taxonomy::builtin(), cfg.gibs);
        for (Index a : wd.assets) {
            benchmark::DoNotOptimize(run_gibs(ctx, asset_differences(market.data.prices, a, wd.rows), cfg.gibs));
        }
    }
}
BENCHMARK(BM_WindowGibs)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
