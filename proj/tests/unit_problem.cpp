#include <random>

#include "doctest.h"
#include "helpers.hpp"

using namespace mflq;
using namespace mflq::testing;

TEST_CASE("time grid nodes hit the endpoints exactly") {
    const TimeGrid grid(0.1, 1.0, 7);
    CHECK(grid.node(0) == 0.1);
    CHECK(grid.node(7) == 1.0);
    for (int k = 1; k <= 7; ++k) CHECK(grid.node(k) > grid.node(k - 1));
    CHECK_THROWS_AS(TimeGrid(1.0, 1.0, 4), ValidationError);
    CHECK_THROWS_AS(TimeGrid(0.0, 1.0, 0), ValidationError);
}

TEST_CASE("validate_problem accepts the benchmark data") {
    CHECK_NOTHROW(validate_problem(example61_spec()));
    CHECK_NOTHROW(validate_problem(example62_spec()));

    // degenerate-but-legal: all-zero with unit control weight
    ProblemSpec flat = ProblemSpec::zeros(1, 1, TimeGrid(0.0, 1.0, 10));
    flat.R = scalar_const(1.0);
    CHECK_NOTHROW(validate_problem(flat));
}

TEST_CASE("validate_problem rejects bad data") {
    ProblemSpec p = ProblemSpec::zeros(2, 1, TimeGrid(0.0, 1.0, 10));
    p.G << 1, 2, 0, 1;  // asymmetric terminal weight
    CHECK_THROWS_AS(validate_problem(p), ValidationError);

    ProblemSpec shape = ProblemSpec::zeros(2, 1, TimeGrid(0.0, 1.0, 10));
    shape.B = MatrixFn::zero(1, 1);
    CHECK_THROWS_AS(validate_problem(shape), ValidationError);

    ProblemSpec bad_eval = ProblemSpec::zeros(1, 1, TimeGrid(0.0, 1.0, 10));
    bad_eval.A = MatrixFn::from_expressions(1, 1, {parse_expression("1/(s-0.5)")});
    CHECK_THROWS_AS(validate_problem(bad_eval), ValidationError);
}

TEST_CASE("validation is idempotent") {
    const ValidatedProblem first = validate_problem(example61_spec());
    const ValidatedProblem second = validate_problem(first.spec());
    for (double s : {0.0, 0.3, 1.0}) {
        CHECK((first.R(s) - second.R(s)).norm() == 0.0);
        CHECK((first.D(s) - second.D(s)).norm() == 0.0);
    }
    CHECK((first.G() - second.G()).norm() == 0.0);
}

TEST_CASE("symmetrization preserves the quadratic form") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    Matrix M(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) M(i, j) = coef(rng);
    const Matrix sym = symmetrized(M);
    for (int trial = 0; trial < 20; ++trial) {
        Vector x(3);
        for (int i = 0; i < 3; ++i) x(i) = coef(rng);
        CHECK(x.dot(M * x) == doctest::Approx(x.dot(sym * x)).epsilon(1e-12));
    }
}

TEST_CASE("matrix function evaluation") {
    const ValidatedProblem vp = validate_problem(example61_spec());
    CHECK(vp.R(0.0)(0, 0) == doctest::Approx(-3.0));  // (0+1)^3 - 4(0+1)^2

    const MatrixFn zero = MatrixFn::zero(2, 2);
    CHECK(zero.eval(0.4).norm() == 0.0);

    // constant samples interpolate to the constant
    const MatrixFn sampled = MatrixFn::sampled({0.0, 1.0},
                                               {Matrix::Identity(2, 2), Matrix::Identity(2, 2)},
                                               Interp::Linear);
    CHECK((sampled.eval(0.5) - Matrix::Identity(2, 2)).norm() == 0.0);
}

TEST_CASE("sampled functions return stored samples exactly at nodes") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::vector<double> times{0.0, 0.17, 0.44, 0.81, 1.0};
    std::vector<Matrix> values;
    for (std::size_t i = 0; i < times.size(); ++i) {
        Matrix M(2, 2);
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) M(r, c) = coef(rng);
        values.push_back(M);
    }
    const MatrixFn linear = MatrixFn::sampled(times, values, Interp::Linear);
    const MatrixFn steps = MatrixFn::sampled(times, values, Interp::PiecewiseConstantLeft);
    for (std::size_t i = 0; i < times.size(); ++i) {
        CHECK((linear.eval(times[i]) - values[i]).norm() == 0.0);
        CHECK((steps.eval(times[i]) - values[i]).norm() == 0.0);
    }
    // between nodes: left sample for the step mode, chord for linear
    CHECK((steps.eval(0.3) - values[1]).norm() == 0.0);
    const double w = (0.3 - 0.17) / (0.44 - 0.17);
    CHECK((linear.eval(0.3) - ((1 - w) * values[1] + w * values[2])).norm() < 1e-15);
    CHECK_THROWS_AS(linear.eval(1.5), EvalError);
}

TEST_CASE("initial law validation") {
    CHECK_NOTHROW(validate_initial_law(InitialLaw::gaussian(v1(0.0), m1(1.0)), 1));
    CHECK_THROWS_AS(validate_initial_law(InitialLaw::gaussian(v1(0.0), m1(-0.5)), 1),
                    ValidationError);
    InitialLaw det = InitialLaw::deterministic(v1(2.0));
    CHECK_NOTHROW(validate_initial_law(det, 1));
    det.cov = m1(0.1);
    CHECK_THROWS_AS(validate_initial_law(det, 1), ValidationError);
}

TEST_CASE("control law shape checks and structural zero offset") {
    const AffineControlLaw law = AffineControlLaw::zero(2, 1);
    CHECK(law.k_dev.rows() == 1);
    CHECK(law.k_dev.eval(0.0).norm() == 0.0);
    CHECK_THROWS_AS(
        AffineControlLaw::feedback(MatrixFn::zero(1, 2), MatrixFn::zero(1, 1), MatrixFn::zero(1, 1)),
        ValidationError);
}
