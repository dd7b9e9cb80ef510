#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "mflq/montecarlo.hpp"
#include "mflq/philox.hpp"

using namespace mflq;
using namespace mflq::testing;

TEST_CASE("philox known-answer and stream separation") {
    // Published philox4x32-10 vectors: all-ones and the pi-digits case.
    const auto ones = Philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                        {0xffffffffu, 0xffffffffu});
    CHECK(ones[0] == 0x408f276du);
    CHECK(ones[1] == 0x41c83b0eu);
    CHECK(ones[2] == 0xa20bc7c6u);
    CHECK(ones[3] == 0x6d5451fdu);
    const auto pi = Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                      {0xa4093822u, 0x299f31d0u});
    CHECK(pi[0] == 0xd16cfe09u);
    CHECK(pi[1] == 0x94fdccebu);
    CHECK(pi[2] == 0x5001e420u);
    CHECK(pi[3] == 0x24126ea1u);
    // regression anchor for the zero block
    const auto zero = Philox4x32::block({0, 0, 0, 0}, {0, 0});
    CHECK(zero[0] == 0x6627e8d5u);
    CHECK(zero[1] == 0xe169c58du);
    CHECK(zero[2] == 0xbc57ac4cu);
    CHECK(zero[3] == 0x9b00dbd8u);

    CHECK(counter_rng_u64(1, 2, 3, 0) == counter_rng_u64(1, 2, 3, 0));
    CHECK(counter_rng_u64(1, 2, 3, 0) != counter_rng_u64(1, 2, 3, 1));
    CHECK(counter_rng_u64(1, 2, 3, 0) != counter_rng_u64(2, 2, 3, 0));
    CHECK(counter_rng_u64(1, 2, 3, 0) != counter_rng_u64(1, 3, 3, 0));
}

TEST_CASE("uniforms live strictly inside (0,1) and normals match moments") {
    double sum = 0.0, sum_sq = 0.0;
    const int count = 200000;
    for (int i = 0; i < count; ++i) {
        const double u = counter_rng_uniform(42, 0, static_cast<std::uint64_t>(i), 0);
        CHECK(u > 0.0);
        CHECK(u < 1.0);
        const double z = normal_icdf(u);
        sum += z;
        sum_sq += z * z;
    }
    const double mean = sum / count;
    const double var = sum_sq / count - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("normal inverse cdf inverts the normal cdf") {
    CHECK(std::abs(normal_icdf(0.5)) < 1e-15);
    CHECK(normal_icdf(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
    CHECK(normal_icdf(0.3) == doctest::Approx(-normal_icdf(0.7)).epsilon(1e-13));
    for (double p : {1e-12, 1e-6, 0.02, 0.3, 0.5, 0.7, 0.98, 1.0 - 1e-6}) {
        const double x = normal_icdf(p);
        const double cdf = 0.5 * std::erfc(-x * 0.70710678118654752440);
        CHECK(cdf == doctest::Approx(p).epsilon(1e-11));
    }
}

TEST_CASE("estimates are bit-identical across thread counts and reproducible") {
    const SolvedProblem solved = solve_fully(example61_spec(0.05, 200), TimeGrid(0.0, 1.0, 200));
    const InitialLaw law0 = InitialLaw::gaussian(v1(0.0), m1(1.0));
    SimConfig cfg;
    cfg.n_paths = 6000;
    cfg.seed = 7;
    cfg.grid = solved.vp.grid();
    cfg.threads = 1;
    const CostEstimate one = estimate_cost(solved.vp, solved.law, law0, cfg);
    cfg.threads = 3;
    const CostEstimate three = estimate_cost(solved.vp, solved.law, law0, cfg);
    CHECK(one.mean == three.mean);
    CHECK(one.std_error == three.std_error);

    const CostEstimate again = estimate_cost(solved.vp, solved.law, law0, cfg);
    CHECK(again.mean == three.mean);

    cfg.seed = 8;
    const CostEstimate other = estimate_cost(solved.vp, solved.law, law0, cfg);
    CHECK(other.mean != three.mean);
}

TEST_CASE("zero-noise paths collapse onto the mean path") {
    // no diffusion at all: every path follows the deterministic flow
    ProblemSpec p = ProblemSpec::zeros(1, 1, TimeGrid(0.0, 1.0, 64));
    p.A = scalar_const(0.5);
    p.B = scalar_const(1.0);
    p.R = scalar_const(1.0);
    p.G = m1(1.0);
    const ValidatedProblem vp = validate_problem(p);
    const AffineControlLaw law = AffineControlLaw::open_loop(1, scalar_const(0.3));
    const InitialLaw law0 = InitialLaw::deterministic(v1(1.0));
    SimConfig cfg;
    cfg.n_paths = 4;
    cfg.seed = 1;
    cfg.grid = vp.grid();
    const PathEnsemble paths = simulate_paths(vp, law, law0, cfg);
    const MomentPath moments = propagate_moments(vp, law, law0, vp.grid());
    for (long path = 0; path < cfg.n_paths; ++path)
        for (int k = 0; k <= cfg.grid.n_steps; ++k) {
            // Euler vs RK4: discrepancy is O(dt), not zero
            CHECK(std::abs(paths.x(path, k, 0) - moments.mean.at(k)(0)) < 5.0 / 64.0);
            CHECK(paths.x(path, k, 0) == paths.x(0, k, 0));  // identical across paths
        }
}

TEST_CASE("euler drift error halves when the step count doubles") {
    // Zero diffusion, active centered flow: z' = (A + BK) z with
    // A + BK = 1.5, so the Euler endpoint factor must approach e^{1.5}
    // at first order while the mean is exact by construction.
    ProblemSpec p = ProblemSpec::zeros(1, 1, TimeGrid(0.0, 1.0, 100));
    p.A = scalar_const(1.0);
    p.B = scalar_const(1.0);
    p.R = scalar_const(1.0);
    const AffineControlLaw law = AffineControlLaw::feedback(
        scalar_const(0.5), MatrixFn::zero(1, 1), MatrixFn::zero(1, 1));
    const InitialLaw law0 = InitialLaw::gaussian(v1(0.0), m1(1.0));
    const double exact_flow = std::exp(1.5);
    double prev_err = 0.0;
    for (int i = 0; i < 3; ++i) {
        const int steps = 200 << i;
        const ValidatedProblem vp = validate_problem(
            [&] { ProblemSpec q = p; q.grid = TimeGrid(0.0, 1.0, steps); return q; }());
        SimConfig cfg;
        cfg.n_paths = 2;
        cfg.seed = 3;
        cfg.grid = vp.grid();
        const PathEnsemble paths = simulate_paths(vp, law, law0, cfg);
        const MomentPath moments = propagate_moments(vp, law, law0, vp.grid());
        const double z0 = paths.x(0, 0, 0) - moments.mean.front()(0);
        const double zT = paths.x(0, steps, 0) - moments.mean.back()(0);
        REQUIRE(z0 != 0.0);
        const double err = std::abs(zT / z0 - exact_flow);
        if (i > 0) CHECK(prev_err / err == doctest::Approx(2.0).epsilon(0.1));
        prev_err = err;
    }
}

TEST_CASE("zero problem estimates zero with zero spread") {
    ProblemSpec p = ProblemSpec::zeros(1, 1, TimeGrid(0.0, 1.0, 32));
    const ValidatedProblem vp = validate_problem(p);
    SimConfig cfg;
    cfg.n_paths = 64;
    cfg.seed = 5;
    cfg.grid = vp.grid();
    const CostEstimate est =
        estimate_cost(vp, AffineControlLaw::zero(1, 1), InitialLaw::deterministic(v1(0.0)), cfg);
    CHECK(est.mean == 0.0);
    CHECK(est.std_error == 0.0);
}

TEST_CASE("sampling statistics agree with the exact moments") {
    // mean of the regularized benchmark problem 2 under its optimal law
    const double eps = 0.3, mu = 1.0;
    const SolvedProblem solved =
        solve_fully(regularize(example62_spec(500), eps), TimeGrid(0.0, 1.0, 500));
    SimConfig cfg;
    cfg.n_paths = 20000;
    cfg.seed = 11;
    cfg.grid = solved.vp.grid();
    const PathEnsemble paths =
        simulate_paths(solved.vp, solved.law, InitialLaw::deterministic(v1(mu)), cfg);
    for (int k : {125, 250, 500}) {
        double sum = 0.0, sum_sq = 0.0;
        for (long path = 0; path < cfg.n_paths; ++path) {
            sum += paths.x(path, k, 0);
            sum_sq += paths.x(path, k, 0) * paths.x(path, k, 0);
        }
        const double sample_mean = sum / cfg.n_paths;
        const double sample_var = sum_sq / cfg.n_paths - sample_mean * sample_mean;
        const double se = std::sqrt(sample_var / cfg.n_paths);
        const double s = cfg.grid.node(k);
        const double expected = mu * (eps + 3.0 * (1.0 - s)) / (eps + 3.0);
        CHECK(std::abs(sample_mean - expected) <= 3.0 * se + 3.0 / 500.0);
    }

    // terminal variance of benchmark problem 1 against the moment oracle
    const SolvedProblem ex1 = solve_fully(example61_spec(0.05, 500), TimeGrid(0.0, 1.0, 500));
    const InitialLaw law0 = InitialLaw::gaussian(v1(0.0), m1(1.0));
    SimConfig cfg1;
    cfg1.n_paths = 20000;
    cfg1.seed = 13;
    cfg1.grid = ex1.vp.grid();
    const PathEnsemble ens = simulate_paths(ex1.vp, ex1.law, law0, cfg1);
    const MomentPath moments = propagate_moments(ex1.vp, ex1.law, law0, ex1.vp.grid());
    double sum = 0.0, sum_sq = 0.0, sum_4 = 0.0;
    const int kT = cfg1.grid.n_steps;
    for (long path = 0; path < cfg1.n_paths; ++path) {
        const double x = ens.x(path, kT, 0);
        sum += x;
        sum_sq += x * x;
        sum_4 += x * x * x * x;
    }
    const double mean = sum / cfg1.n_paths;
    const double var = sum_sq / cfg1.n_paths - mean * mean;
    const double var_of_sq = sum_4 / cfg1.n_paths - (sum_sq / cfg1.n_paths) * (sum_sq / cfg1.n_paths);
    const double se_var = std::sqrt(var_of_sq / cfg1.n_paths);
    CHECK(std::abs(var - moments.cov.back()(0, 0)) <= 3.0 * se_var + 0.05);
}

TEST_CASE("antithetic pairing works and validates inputs") {
    const SolvedProblem solved = solve_fully(example61_spec(0.05, 200), TimeGrid(0.0, 1.0, 200));
    const InitialLaw law0 = InitialLaw::gaussian(v1(0.0), m1(1.0));
    SimConfig cfg;
    cfg.n_paths = 4000;
    cfg.seed = 21;
    cfg.grid = solved.vp.grid();
    cfg.antithetic = true;
    const CostEstimate est = estimate_cost(solved.vp, solved.law, law0, cfg);
    CHECK(std::isfinite(est.mean));
    cfg.n_paths = 4001;
    CHECK_THROWS_AS(estimate_cost(solved.vp, solved.law, law0, cfg), ValidationError);
    cfg.n_paths = 1;
    cfg.antithetic = false;
    CHECK_THROWS_AS(estimate_cost(solved.vp, solved.law, law0, cfg), ValidationError);
}

TEST_CASE("cost expansion is exactly quadratic along open-loop directions") {
    const SolvedProblem solved = solve_fully(example61_spec(0.05, 1000), TimeGrid(0.0, 1.0, 1000));
    const InitialLaw law0 = InitialLaw::gaussian(v1(0.0), m1(1.0));
    SimConfig cfg;
    cfg.grid = solved.vp.grid();
    const AffineControlLaw direction = AffineControlLaw::open_loop(1, scalar_const(1.0));
    const std::vector<double> lambdas{-0.2, -0.1, 0.0, 0.1, 0.2};

    // from the zero law the quadratic coefficient is the homogeneous cost
    // of the direction itself
    const AffineControlLaw zero_law = AffineControlLaw::zero(1, 1);
    const QuadraticFitReport from_zero =
        quadratic_expansion_check(solved.vp, zero_law, direction, lambdas, law0, cfg);
    CHECK(from_zero.residual_relative <= 1e-9);
    CHECK(from_zero.quadratic ==
          doctest::Approx(from_zero.quadratic_ref).epsilon(1e-9));

    // from the optimal law the linear coefficient is stationary
    const QuadraticFitReport at_opt =
        quadratic_expansion_check(solved.vp, solved.law, direction, lambdas, law0, cfg);
    CHECK(std::abs(at_opt.linear) <= 1e-6);
    CHECK(at_opt.residual_relative <= 1e-9);
    CHECK(at_opt.quadratic == doctest::Approx(at_opt.quadratic_ref).epsilon(1e-7));

    // degenerate settings are rejected
    CHECK_THROWS_AS(quadratic_expansion_check(solved.vp, zero_law, direction, {0.0, 0.0, 0.1},
                                              law0, cfg),
                    ValidationError);
    const AffineControlLaw feedback_dir = AffineControlLaw::feedback(
        scalar_const(1.0), MatrixFn::zero(1, 1), MatrixFn::zero(1, 1));
    CHECK_THROWS_AS(
        quadratic_expansion_check(solved.vp, zero_law, feedback_dir, lambdas, law0, cfg),
        ValidationError);
}

TEST_CASE("zero law on the zero problem has an all-zero expansion") {
    ProblemSpec p = ProblemSpec::zeros(1, 1, TimeGrid(0.0, 1.0, 64));
    const ValidatedProblem vp = validate_problem(p);
    SimConfig cfg;
    cfg.grid = vp.grid();
    const QuadraticFitReport report = quadratic_expansion_check(
        vp, AffineControlLaw::zero(1, 1), AffineControlLaw::open_loop(1, scalar_const(1.0)),
        {-1.0, 0.0, 1.0}, InitialLaw::deterministic(v1(0.0)), cfg);
    CHECK(report.constant == 0.0);
    CHECK(report.linear == 0.0);
    CHECK(report.quadratic == 0.0);
    CHECK(report.residual == 0.0);
}
