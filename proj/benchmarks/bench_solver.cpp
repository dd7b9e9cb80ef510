#include <benchmark/benchmark.h>

#include <random>

#include "mflq/epsilon.hpp"
#include "mflq/montecarlo.hpp"

using namespace mflq;

namespace {

MatrixFn scalar_fn(const std::string& text) {
    return MatrixFn::from_expressions(1, 1, {parse_expression(text)});
}

ProblemSpec bench_problem(int n, int m, int steps) {
    std::mt19937 rng(12);
    std::uniform_real_distribution<double> coef(-0.6, 0.6);
    auto rand_matrix = [&](int r, int c) {
        Matrix M(r, c);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) M(i, j) = coef(rng);
        return M;
    };
    auto rand_psd = [&](int d) {
        const Matrix L = rand_matrix(d, d);
        return Matrix(L * L.transpose());
    };
    ProblemSpec p = ProblemSpec::zeros(n, m, TimeGrid(0.0, 1.0, steps));
    p.A = MatrixFn::constant(rand_matrix(n, n));
    p.B = MatrixFn::constant(rand_matrix(n, m));
    p.C = MatrixFn::constant(rand_matrix(n, n));
    p.D = MatrixFn::constant(rand_matrix(n, m));
    p.Q = MatrixFn::constant(rand_psd(n));
    p.R = MatrixFn::constant(Matrix(rand_psd(m) + Matrix::Identity(m, m)));
    p.G = rand_psd(n);
    return p;
}

void BM_riccati_solve(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const int steps = static_cast<int>(state.range(1));
    const ProblemSpec spec = bench_problem(n, n, steps);
    const ValidatedProblem vp = validate_problem(spec);
    for (auto _ : state) {
        RiccatiOutcome outcome = solve_riccati(vp, vp.grid());
        benchmark::DoNotOptimize(outcome);
    }
    state.SetItemsProcessed(state.iterations() * steps);
}
BENCHMARK(BM_riccati_solve)->Args({1, 2000})->Args({3, 2000})->Args({6, 2000});

void BM_expression_eval(benchmark::State& state) {
    const MatrixFn f = scalar_fn("(s+1)^3 - 4*(s+1)^2 + exp(-s)");
    double s = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(f.eval(s));
        s += 1e-6;
    }
}
BENCHMARK(BM_expression_eval);

void BM_moment_propagation(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const ProblemSpec spec = bench_problem(n, n, 1000);
    const ValidatedProblem vp = validate_problem(spec);
    const AffineControlLaw law = AffineControlLaw::zero(n, n);
    const InitialLaw law0 =
        InitialLaw::gaussian(Vector::Zero(n), 0.3 * Matrix::Identity(n, n));
    for (auto _ : state) {
        MomentPath moments = propagate_moments(vp, law, law0, vp.grid());
        benchmark::DoNotOptimize(moments);
    }
}
BENCHMARK(BM_moment_propagation)->Arg(1)->Arg(3)->Arg(6);

void BM_monte_carlo_paths(benchmark::State& state) {
    const ProblemSpec spec = bench_problem(2, 2, 500);
    const ValidatedProblem vp = validate_problem(spec);
    const AffineControlLaw law = AffineControlLaw::zero(2, 2);
    const InitialLaw law0 = InitialLaw::gaussian(Vector::Zero(2), 0.5 * Matrix::Identity(2, 2));
    SimConfig cfg;
    cfg.n_paths = state.range(0);
    cfg.seed = 99;
    cfg.grid = vp.grid();
    for (auto _ : state) {
        CostEstimate est = estimate_cost(vp, law, law0, cfg);
        benchmark::DoNotOptimize(est);
    }
    state.SetItemsProcessed(state.iterations() * cfg.n_paths * cfg.grid.n_steps);
}
BENCHMARK(BM_monte_carlo_paths)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
