#include "doctest.h"
#include "helpers.hpp"
#include "mflq/oracle.hpp"

using namespace mflq;
using namespace mflq::testing;

TEST_CASE("coordinate descent recovers the scalar optimum") {
    const ProblemSpec spec = oracle1d_spec(400);
    const ValidatedProblem vp = validate_problem(spec);
    const InitialLaw law0 = InitialLaw::deterministic(v1(1.0));
    BruteForceOptions opts;
    opts.intervals = 2;
    opts.optimize_K = false;  // the deviation is identically zero here
    const BruteForceResult result = brute_force_minimize(vp, law0, spec.grid, opts);
    // the optimal control is the constant -1/2, representable exactly;
    // the (Kbar, k_mean) valley is degenerate, so only the cost is sharp
    CHECK(result.cost == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(result.evaluations > 0);
    // no law can beat the value function
    CHECK(result.cost >= 0.5 - 1e-9);
}

TEST_CASE("descent on a zero problem stays at zero") {
    const ProblemSpec spec = ProblemSpec::zeros(1, 1, TimeGrid(0.0, 1.0, 50));
    const ValidatedProblem vp = validate_problem(spec);
    BruteForceOptions opts;
    opts.intervals = 2;
    opts.max_sweeps = 10;
    const BruteForceResult result =
        brute_force_minimize(vp, InitialLaw::deterministic(v1(0.0)), spec.grid, opts);
    CHECK(result.cost == 0.0);
    for (double s : {0.0, 0.6, 1.0}) {
        CHECK(result.law.K.eval(s).norm() == 0.0);
        CHECK(result.law.k_mean.eval(s).norm() == 0.0);
    }
}

TEST_CASE("piecewise-constant laws evaluate as step functions") {
    const ProblemSpec spec = oracle1d_spec(100);
    const ValidatedProblem vp = validate_problem(spec);
    BruteForceOptions opts;
    opts.intervals = 4;
    opts.optimize_K = false;
    opts.optimize_Kbar = false;
    const BruteForceResult result =
        brute_force_minimize(vp, InitialLaw::deterministic(v1(1.0)), spec.grid, opts);
    // offsets only: still reaches the constant -1/2 on every interval
    CHECK(result.cost == doctest::Approx(0.5).epsilon(1e-3));
    for (double s : {0.1, 0.3, 0.6, 0.9})
        CHECK(result.law.k_mean.eval(s)(0, 0) == doctest::Approx(-0.5).epsilon(1e-2));
}
