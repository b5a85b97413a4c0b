#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "swing/lsmc.hpp"
#include "swing/mlp.hpp"
#include "swing/oracle.hpp"
#include "swing/rng.hpp"

namespace {

swing::FiniteStateModel chain(int states) {
    swing::FiniteStateModel m;
    Eigen::MatrixXd p(states, states);
    for (int i = 0; i < states; ++i) {
        m.states.push_back(-2.0 + 4.0 * i / std::max(1, states - 1));
    }
    for (int i = 0; i < states; ++i) {
        for (int j = 0; j < states; ++j) {
            const double d = m.states[static_cast<std::size_t>(j)] - 0.6 * m.states[static_cast<std::size_t>(i)];
            p(i, j) = std::exp(-d * d / 1.28);
        }
        p.row(i) /= p.row(i).sum();
    }
    m.transitions = {p};
    m.initial.assign(static_cast<std::size_t>(states), 1.0 / states);
    std::vector<double> spot;
    for (double x : m.states) spot.push_back(20.0 * std::exp(0.25 * x));
    m.spot_values = {spot};
    return m;
}

swing::SwingContract contract(int n) {
    swing::SwingContract c;
    c.n_dates = n;
    c.strike = 20.0;
    c.local_max = 1.0;
    c.global_min = n / 3;
    c.global_max = 2 * n / 3;
    return c;
}

void BM_BackwardSweep(benchmark::State& state) {
    const auto n_paths = static_cast<std::size_t>(state.range(0));
    swing::GaussianOneFactorModel g;
    g.forward_curve.assign(12, 20.0);
    const auto c = contract(12);
    const auto ladder = swing::build_ladder(c, true);
    const auto grid = swing::make_grid(c, ladder);
    const auto paths = swing::simulate_paths(g, 12, n_paths, 1);
    const swing::BasisSpec basis{swing::BasisKind::normalized_hermite, 4, {}};
    swing::BackwardOptions opt;
    opt.realized_std_error = false;
    for (auto _ : state) {
        benchmark::DoNotOptimize(swing::backward_sweep(c, ladder, paths, basis, grid, opt).in_sample.value);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n_paths));
}
BENCHMARK(BM_BackwardSweep)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_SolveExact(benchmark::State& state) {
    const auto m = chain(static_cast<int>(state.range(0)));
    const auto c = contract(30);
    const auto ladder = swing::build_ladder(c, true);
    const auto grid = swing::make_grid(c, ladder);
    for (auto _ : state) benchmark::DoNotOptimize(swing::solve_exact(c, ladder, m, grid).price);
}
BENCHMARK(BM_SolveExact)->Arg(5)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_MlpGradient(benchmark::State& state) {
    swing::MlpSpec spec;
    spec.width = static_cast<std::size_t>(state.range(0));
    const auto params = swing::random_params(spec, 3);
    swing::CounterRng rng(5, 0);
    std::vector<double> xs(256);
    std::vector<double> ys(256);
    for (double& v : xs) v = rng.normal();
    for (double& v : ys) v = rng.normal();
    for (auto _ : state) benchmark::DoNotOptimize(swing::mlp_gradient(spec, params, xs, ys).loss);
    state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(BM_MlpGradient)->Arg(2)->Arg(8)->Arg(32);

}  // namespace
BENCHMARK_MAIN();
