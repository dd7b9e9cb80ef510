#include "mflq/problem.hpp"

#include <cmath>

namespace mflq {

InitialLaw InitialLaw::deterministic(Vector x) {
    InitialLaw law;
    law.cov = Matrix::Zero(x.size(), x.size());
    law.mean = std::move(x);
    law.kind = Kind::Deterministic;
    return law;
}

InitialLaw InitialLaw::gaussian(Vector mean, Matrix cov) {
    InitialLaw law;
    law.mean = std::move(mean);
    law.cov = std::move(cov);
    law.kind = Kind::Gaussian;
    return law;
}

AffineControlLaw AffineControlLaw::feedback(MatrixFn K, MatrixFn Kbar, MatrixFn k_mean) {
    AffineControlLaw law;
    const int m = K.rows();
    law.k_dev = MatrixFn::zero(m, 1);
    law.K = std::move(K);
    law.Kbar = std::move(Kbar);
    law.k_mean = std::move(k_mean);
    if (law.Kbar.rows() != m || law.Kbar.cols() != law.K.cols() || law.k_mean.rows() != m ||
        law.k_mean.cols() != 1)
        throw ValidationError("AffineControlLaw: inconsistent shapes");
    return law;
}

AffineControlLaw AffineControlLaw::open_loop(int n, MatrixFn k_mean) {
    const int m = k_mean.rows();
    return feedback(MatrixFn::zero(m, n), MatrixFn::zero(m, n), std::move(k_mean));
}

AffineControlLaw AffineControlLaw::zero(int n, int m) {
    return feedback(MatrixFn::zero(m, n), MatrixFn::zero(m, n), MatrixFn::zero(m, 1));
}

ProblemSpec ProblemSpec::zeros(int n, int m, TimeGrid grid) {
    ProblemSpec p;
    p.n = n;
    p.m = m;
    p.grid = grid;
    p.A = p.Abar = p.C = p.Cbar = p.Q = p.Qbar = MatrixFn::zero(n, n);
    p.B = p.Bbar = p.D = p.Dbar = MatrixFn::zero(n, m);
    p.S = p.Sbar = MatrixFn::zero(m, n);
    p.R = p.Rbar = MatrixFn::zero(m, m);
    p.G = p.Gbar = Matrix::Zero(n, n);
    p.b = p.sigma = p.q = p.qbar = MatrixFn::zero(n, 1);
    p.rho = p.rhobar = MatrixFn::zero(m, 1);
    p.g = p.gbar = Vector::Zero(n);
    return p;
}

ProblemSpec ProblemSpec::homogenized() const {
    ProblemSpec p = *this;
    p.b = p.sigma = p.q = p.qbar = MatrixFn::zero(n, 1);
    p.rho = p.rhobar = MatrixFn::zero(m, 1);
    p.g = p.gbar = Vector::Zero(n);
    return p;
}

namespace {

void require_shape(const MatrixFn& f, int rows, int cols, const std::string& name) {
    if (f.rows() != rows || f.cols() != cols)
        throw ValidationError("validate_problem: " + name + " must be " + std::to_string(rows) +
                              "x" + std::to_string(cols) + ", got " + std::to_string(f.rows()) +
                              "x" + std::to_string(f.cols()));
}

void check_symmetric_on_grid(const MatrixFn& f, const TimeGrid& grid, double sym_tol,
                             const std::string& name) {
    for (int k = 0; k <= grid.n_steps; ++k) {
        const double s = grid.node(k);
        const Matrix M = f.eval(s);
        const double scale = std::max(1.0, M.norm());
        if (asymmetry(M) > sym_tol * scale)
            throw ValidationError("validate_problem: " + name + " asymmetric at s=" +
                                  std::to_string(s) + " beyond sym_tol");
    }
}

void check_constant_symmetric(const Matrix& M, double sym_tol, const std::string& name) {
    const double scale = std::max(1.0, M.norm());
    if (asymmetry(M) > sym_tol * scale)
        throw ValidationError("validate_problem: " + name + " asymmetric beyond sym_tol");
}

void check_evaluable(const MatrixFn& f, const TimeGrid& grid, const std::string& name) {
    for (int k = 0; k <= grid.n_steps; ++k) {
        try {
            (void)f.eval(grid.node(k));
        } catch (const EvalError& e) {
            throw ValidationError("validate_problem: " + name + ": " + e.what());
        }
    }
}

}  // namespace

ValidatedProblem validate_problem(const ProblemSpec& spec, ValidationOptions opts) {
    const int n = spec.n;
    const int m = spec.m;
    if (n < 1 || m < 1) throw ValidationError("validate_problem: dimensions must be positive");
    (void)TimeGrid(spec.grid.t0, spec.grid.T, spec.grid.n_steps);  // re-checks the horizon

    require_shape(spec.A, n, n, "A");
    require_shape(spec.Abar, n, n, "Abar");
    require_shape(spec.B, n, m, "B");
    require_shape(spec.Bbar, n, m, "Bbar");
    require_shape(spec.C, n, n, "C");
    require_shape(spec.Cbar, n, n, "Cbar");
    require_shape(spec.D, n, m, "D");
    require_shape(spec.Dbar, n, m, "Dbar");
    require_shape(spec.Q, n, n, "Q");
    require_shape(spec.Qbar, n, n, "Qbar");
    require_shape(spec.S, m, n, "S");
    require_shape(spec.Sbar, m, n, "Sbar");
    require_shape(spec.R, m, m, "R");
    require_shape(spec.Rbar, m, m, "Rbar");
    require_shape(spec.b, n, 1, "b");
    require_shape(spec.sigma, n, 1, "sigma");
    require_shape(spec.q, n, 1, "q");
    require_shape(spec.qbar, n, 1, "qbar");
    require_shape(spec.rho, m, 1, "rho");
    require_shape(spec.rhobar, m, 1, "rhobar");
    if (spec.G.rows() != n || spec.G.cols() != n) throw ValidationError("validate_problem: G must be n x n");
    if (spec.Gbar.rows() != n || spec.Gbar.cols() != n)
        throw ValidationError("validate_problem: Gbar must be n x n");
    if (spec.g.size() != n || spec.gbar.size() != n)
        throw ValidationError("validate_problem: g, gbar must have length n");

    for (const auto* f : {&spec.A, &spec.Abar, &spec.B, &spec.Bbar, &spec.C, &spec.Cbar, &spec.D,
                          &spec.Dbar, &spec.S, &spec.Sbar, &spec.b, &spec.sigma, &spec.q,
                          &spec.qbar, &spec.rho, &spec.rhobar})
        check_evaluable(*f, spec.grid, "coefficient");

    check_symmetric_on_grid(spec.Q, spec.grid, opts.sym_tol, "Q");
    check_symmetric_on_grid(spec.Qbar, spec.grid, opts.sym_tol, "Qbar");
    check_symmetric_on_grid(spec.R, spec.grid, opts.sym_tol, "R");
    check_symmetric_on_grid(spec.Rbar, spec.grid, opts.sym_tol, "Rbar");
    check_constant_symmetric(spec.G, opts.sym_tol, "G");
    check_constant_symmetric(spec.Gbar, opts.sym_tol, "Gbar");
    if (!all_finite(spec.G) || !all_finite(spec.Gbar) || !spec.g.allFinite() || !spec.gbar.allFinite())
        throw ValidationError("validate_problem: terminal data must be finite");

    ProblemSpec out = spec;
    out.G = symmetrized(spec.G);
    out.Gbar = symmetrized(spec.Gbar);
    return ValidatedProblem(std::move(out), opts);
}

void validate_initial_law(const InitialLaw& law, int n, const ValidationOptions& opts) {
    if (law.mean.size() != n) throw ValidationError("InitialLaw: mean must have length n");
    if (law.cov.rows() != n || law.cov.cols() != n)
        throw ValidationError("InitialLaw: cov must be n x n");
    if (!law.mean.allFinite() || !all_finite(law.cov))
        throw ValidationError("InitialLaw: non-finite data");
    check_constant_symmetric(law.cov, opts.sym_tol, "cov");
    if (law.kind == InitialLaw::Kind::Deterministic) {
        if (law.cov.norm() != 0.0)
            throw ValidationError("InitialLaw: deterministic law requires cov = 0");
        return;
    }
    const double scale = std::max(1.0, law.cov.norm());
    if (lambda_min(law.cov) < -opts.psd_tol * scale)
        throw ValidationError("InitialLaw: cov is not positive semidefinite");
}

}  // namespace mflq
