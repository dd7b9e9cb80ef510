#pragma once

#include <cmath>
#include <random>

#include "mflq/auxiliary.hpp"
#include "mflq/epsilon.hpp"
#include "mflq/moments.hpp"

namespace mflq::testing {

inline MatrixFn scalar_fn(const std::string& expr) {
    return MatrixFn::from_expressions(1, 1, {parse_expression(expr)});
}

inline MatrixFn scalar_const(double v) { return MatrixFn::constant(Matrix::Constant(1, 1, v)); }

inline Matrix m1(double v) { return Matrix::Constant(1, 1, v); }
inline Vector v1(double v) { return Vector::Constant(1, v); }

// ---------------------------------------------------------------------------
// Benchmark problem 1 (scalar, horizon [0, 1]):
//   dX = {E[X] + u + E[u]} ds + sqrt(2) u dW
//   J  = E{ 8 X(1)^2 - (alpha+8) E[X(1)]^2
//           + int [((s+1)^3 - 4(s+1)^2) u^2 + (1 - (s+1)^3) E[u]^2] ds }
// Closed forms: P(s) = 2(s+1)^2,
//   Pi(s) = alpha e^{2(1-s)} / (2 alpha (e^{2(1-s)} - 1) - 1),
//   Theta(s) = -2/(s+1), mean gain (coefficient of E[X] in the expanded
//   control) = 2/(s+1) - 2 Pi(s).
// ---------------------------------------------------------------------------
inline ProblemSpec example61_spec(double alpha = 0.05, int steps = 2000) {
    ProblemSpec p = ProblemSpec::zeros(1, 1, TimeGrid(0.0, 1.0, steps));
    p.Abar = scalar_const(1.0);
    p.B = scalar_const(1.0);
    p.Bbar = scalar_const(1.0);
    p.D = scalar_fn("2^0.5");
    p.G = m1(8.0);
    p.Gbar = m1(-alpha - 8.0);
    p.R = scalar_fn("(s+1)^3 - 4*(s+1)^2");
    p.Rbar = scalar_fn("1 - (s+1)^3");
    return p;
}

inline double example61_P(double s) { return 2.0 * (s + 1.0) * (s + 1.0); }

inline double example61_Pi(double s, double alpha = 0.05) {
    const double e2 = std::exp(2.0 * (1.0 - s));
    return alpha * e2 / (2.0 * alpha * (e2 - 1.0) - 1.0);
}

inline double example61_Theta(double s) { return -2.0 / (s + 1.0); }

// Coefficient of E[X] when the optimal control is written on (X, E[X]).
inline double example61_mean_gain(double s, double alpha = 0.05) {
    return 2.0 / (s + 1.0) - 2.0 * example61_Pi(s, alpha);
}

// ---------------------------------------------------------------------------
// Benchmark problem 2 (scalar, horizon [t, T]):
//   dX = {X - E[X] + E[u]} ds + u dW
//   J  = E{ 2 X(T)^2 + E[X(T)]^2 + int [-4 X^2 - u^2 + 4 E[X]^2 - E[u]^2] ds }
// P == 2; the base mean-equation control weight Sigma is exactly 0.  With
// the +eps control penalty: Pi_eps(s) = 3 eps / (eps + 3(T-s)),
// u*_eps == -3 E[xi] / (eps + 3(T-t)),
// E[X*_eps(s)] = (eps + 3(T-s)) / (eps + 3(T-t)) E[xi],
// V_eps = 2 Var[xi] + 3 eps E[xi]^2 / (eps + 3(T-t)).
// ---------------------------------------------------------------------------
inline ProblemSpec example62_spec(int steps = 2000) {
    ProblemSpec p = ProblemSpec::zeros(1, 1, TimeGrid(0.0, 1.0, steps));
    p.A = scalar_const(1.0);
    p.Abar = scalar_const(-1.0);
    p.Bbar = scalar_const(1.0);
    p.D = scalar_const(1.0);
    p.G = m1(2.0);
    p.Gbar = m1(1.0);
    p.Q = scalar_const(-4.0);
    p.Qbar = scalar_const(4.0);
    p.R = scalar_const(-1.0);
    p.Rbar = scalar_const(-1.0);
    return p;
}

inline double example62_Pi_eps(double s, double eps, double T = 1.0) {
    return 3.0 * eps / (eps + 3.0 * (T - s));
}

inline double example62_value_eps(double mean, double var, double eps, double t = 0.0,
                                  double T = 1.0) {
    return 2.0 * var + 3.0 * eps * mean * mean / (eps + 3.0 * (T - t));
}

inline double example62_control_eps(double mean, double eps, double t = 0.0, double T = 1.0) {
    return -3.0 * mean / (eps + 3.0 * (T - t));
}

// ---------------------------------------------------------------------------
// Scalar oracle problem: B = 1, R = 1, G = 1, all else zero, horizon [0, 1].
// Backward P' = P^2, P(1) = 1 separates to P(s) = 1/(2-s); Pi coincides.
// With driver b == 1 and g = 0 the offset equation eta' = P (eta - 1)
// integrates to eta(s) = (1-s)/(2-s); the same closed form holds for
// etaBar.  Optimal value from xi == 1 deterministic is Pi(0) = 1/2.
// ---------------------------------------------------------------------------
inline ProblemSpec oracle1d_spec(int steps = 2000) {
    ProblemSpec p = ProblemSpec::zeros(1, 1, TimeGrid(0.0, 1.0, steps));
    p.B = scalar_const(1.0);
    p.R = scalar_const(1.0);
    p.G = m1(1.0);
    return p;
}

inline double oracle1d_P(double s) { return 1.0 / (2.0 - s); }
inline double oracle1d_eta(double s) { return (1.0 - s) / (2.0 - s); }

// ---------------------------------------------------------------------------
// Random problems satisfying the standard sufficient condition (PSD Q,
// Qbar, G, Gbar; S = Sbar = 0; R >= delta I), which guarantees uniform
// convexity and hence Riccati solvability with margin >= delta.
// ---------------------------------------------------------------------------
inline ProblemSpec random_standard_spec(std::mt19937& rng, int max_dim = 3, double delta = 0.5,
                                        int steps = 400) {
    std::uniform_int_distribution<int> dim(1, max_dim);
    std::uniform_real_distribution<double> coef(-0.8, 0.8);
    const int n = dim(rng);
    const int m = dim(rng);
    auto rand_matrix = [&](int r, int c) {
        Matrix M(r, c);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) M(i, j) = coef(rng);
        return M;
    };
    auto rand_psd = [&](int d, double scale) {
        const Matrix L = rand_matrix(d, d);
        return Matrix(scale * (L * L.transpose()));
    };
    ProblemSpec p = ProblemSpec::zeros(n, m, TimeGrid(0.0, 1.0, steps));
    p.A = MatrixFn::constant(rand_matrix(n, n));
    p.Abar = MatrixFn::constant(rand_matrix(n, n));
    p.B = MatrixFn::constant(rand_matrix(n, m));
    p.Bbar = MatrixFn::constant(rand_matrix(n, m));
    p.C = MatrixFn::constant(rand_matrix(n, n));
    p.Cbar = MatrixFn::constant(rand_matrix(n, n));
    p.D = MatrixFn::constant(rand_matrix(n, m));
    p.Dbar = MatrixFn::constant(rand_matrix(n, m));
    p.Q = MatrixFn::constant(rand_psd(n, 1.0));
    p.Qbar = MatrixFn::constant(rand_psd(n, 1.0));
    p.R = MatrixFn::constant(Matrix(rand_psd(m, 1.0) + delta * Matrix::Identity(m, m)));
    p.Rbar = MatrixFn::constant(rand_psd(m, 1.0));
    p.G = rand_psd(n, 1.0);
    p.Gbar = rand_psd(n, 1.0);
    return p;
}

/// Random affine law with bounded constant gains.
inline AffineControlLaw random_law(std::mt19937& rng, int n, int m, double scale = 0.5) {
    std::uniform_real_distribution<double> coef(-scale, scale);
    Matrix K(m, n), Kbar(m, n), k(m, 1);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            K(i, j) = coef(rng);
            Kbar(i, j) = coef(rng);
        }
        k(i, 0) = coef(rng);
    }
    return AffineControlLaw::feedback(MatrixFn::constant(K), MatrixFn::constant(Kbar),
                                      MatrixFn::constant(k));
}

/// Optimal law of a problem whose Riccati pair is solvable; throws when
/// it is not (test setup error).
struct SolvedProblem {
    ValidatedProblem vp;
    RiccatiSolution riccati;
    GainSet gains;
    AuxiliarySolution aux;
    AffineControlLaw law;
};

inline SolvedProblem solve_fully(const ProblemSpec& spec, const TimeGrid& grid) {
    ValidatedProblem vp = validate_problem(spec);
    RiccatiOutcome outcome = solve_riccati(vp, grid);
    if (!outcome.ok()) throw std::runtime_error("solve_fully: riccati failed unexpectedly");
    GainSet gains = feedback_gains(vp, outcome.solution->P, outcome.solution->Pi);
    AuxiliarySolution aux = make_auxiliary(vp, *outcome.solution, gains);
    AffineControlLaw law = optimal_law(gains, aux);
    return SolvedProblem{std::move(vp), std::move(*outcome.solution), std::move(gains),
                         std::move(aux), std::move(law)};
}

}  // namespace mflq::testing
