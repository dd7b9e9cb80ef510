#pragma once

#include <optional>
#include <string>

#include "mflq/matrix_fn.hpp"
#include "mflq/time_grid.hpp"

namespace mflq {

/// Law of the initial state: only the mean and covariance matter for the
/// value function, plus which sampler the Monte Carlo module should use.
struct InitialLaw {
    enum class Kind { Gaussian, Deterministic };

    Vector mean;
    Matrix cov;
    Kind kind = Kind::Deterministic;

    static InitialLaw deterministic(Vector x);
    static InitialLaw gaussian(Vector mean, Matrix cov);

    int dim() const { return static_cast<int>(mean.size()); }
    double variance_trace() const { return cov.trace(); }
};

/// Affine mean-field feedback law
///     u(s) = K(s) (X - E[X]) + Kbar(s) E[X] + k_dev(s) + k_mean(s).
/// Under deterministic drivers the centered offset phi - E[phi] of the
/// optimal control vanishes identically, so k_dev is kept for shape
/// fidelity with the feedback representation but is zero by
/// construction.
struct AffineControlLaw {
    MatrixFn K;       // m x n, acts on X - E[X]
    MatrixFn Kbar;    // m x n, acts on E[X]
    MatrixFn k_dev;   // m x 1, identically zero
    MatrixFn k_mean;  // m x 1, deterministic offset

    static AffineControlLaw feedback(MatrixFn K, MatrixFn Kbar, MatrixFn k_mean);
    static AffineControlLaw open_loop(int n, MatrixFn k_mean);
    static AffineControlLaw zero(int n, int m);

    int state_dim() const { return K.cols(); }
    int control_dim() const { return K.rows(); }
};

/// All coefficient and weight functions of the mean-field LQ problem on
/// the horizon carried by `grid`.  Shapes follow the state dimension n
/// and control dimension m.
struct ProblemSpec {
    int n = 1;
    int m = 1;
    TimeGrid grid;

    // dynamics: dX = {AX + Abar E[X] + Bu + Bbar E[u] + b} ds
    //              + {CX + Cbar E[X] + Du + Dbar E[u] + sigma} dW
    MatrixFn A, Abar;  // n x n
    MatrixFn B, Bbar;  // n x m
    MatrixFn C, Cbar;  // n x n
    MatrixFn D, Dbar;  // n x m

    // running weights
    MatrixFn Q, Qbar;  // n x n, symmetric
    MatrixFn S, Sbar;  // m x n
    MatrixFn R, Rbar;  // m x m, symmetric

    // terminal weights
    Matrix G, Gbar;  // n x n, symmetric

    // deterministic inhomogeneous drivers
    MatrixFn b, sigma;    // n x 1
    MatrixFn q, qbar;     // n x 1
    MatrixFn rho, rhobar;  // m x 1
    Vector g, gbar;       // n

    /// All-zero problem of the given shape; tests and builders start here.
    static ProblemSpec zeros(int n, int m, TimeGrid grid);

    /// Copy with every driver (b, sigma, q, qbar, rho, rhobar, g, gbar)
    /// zeroed; the J^0 problem of the same dynamics and weights.
    ProblemSpec homogenized() const;
};

struct ValidationOptions {
    double sym_tol = 1e-10;  // relative asymmetry allowed in Q, Qbar, R, Rbar, G, Gbar
    double psd_tol = 1e-10;  // eigenvalue slack for covariance PSD checks
};

/// Problem data that passed shape/symmetry/evaluability checks.  The
/// symmetric weights are symmetrized on evaluation so downstream code
/// never sees asymmetry drift from user input.
class ValidatedProblem {
public:
    const ProblemSpec& spec() const { return spec_; }
    int n() const { return spec_.n; }
    int m() const { return spec_.m; }
    const TimeGrid& grid() const { return spec_.grid; }

    Matrix A(double s) const { return spec_.A.eval(s); }
    Matrix Abar(double s) const { return spec_.Abar.eval(s); }
    Matrix B(double s) const { return spec_.B.eval(s); }
    Matrix Bbar(double s) const { return spec_.Bbar.eval(s); }
    Matrix C(double s) const { return spec_.C.eval(s); }
    Matrix Cbar(double s) const { return spec_.Cbar.eval(s); }
    Matrix D(double s) const { return spec_.D.eval(s); }
    Matrix Dbar(double s) const { return spec_.Dbar.eval(s); }

    Matrix Q(double s) const { return symmetrized(spec_.Q.eval(s)); }
    Matrix Qbar(double s) const { return symmetrized(spec_.Qbar.eval(s)); }
    Matrix S(double s) const { return spec_.S.eval(s); }
    Matrix Sbar(double s) const { return spec_.Sbar.eval(s); }
    Matrix R(double s) const { return symmetrized(spec_.R.eval(s)); }
    Matrix Rbar(double s) const { return symmetrized(spec_.Rbar.eval(s)); }

    const Matrix& G() const { return spec_.G; }
    const Matrix& Gbar() const { return spec_.Gbar; }

    Vector b(double s) const { return spec_.b.eval(s).col(0); }
    Vector sigma(double s) const { return spec_.sigma.eval(s).col(0); }
    Vector q(double s) const { return spec_.q.eval(s).col(0); }
    Vector qbar(double s) const { return spec_.qbar.eval(s).col(0); }
    Vector rho(double s) const { return spec_.rho.eval(s).col(0); }
    Vector rhobar(double s) const { return spec_.rhobar.eval(s).col(0); }
    const Vector& g() const { return spec_.g; }
    const Vector& gbar() const { return spec_.gbar; }

    const ValidationOptions& options() const { return opts_; }

    friend ValidatedProblem validate_problem(const ProblemSpec& spec, ValidationOptions opts);

private:
    ValidatedProblem(ProblemSpec spec, ValidationOptions opts)
        : spec_(std::move(spec)), opts_(opts) {}
    ProblemSpec spec_;
    ValidationOptions opts_;
};

/// Check shapes, horizon, evaluability on the grid, symmetry of the
/// symmetric weights (within sym_tol, then symmetrized) and PSD-ness
/// where required.  Throws ValidationError.  Idempotent: validating the
/// spec of a ValidatedProblem yields identical evaluations.
ValidatedProblem validate_problem(const ProblemSpec& spec, ValidationOptions opts = {});

void validate_initial_law(const InitialLaw& law, int n, const ValidationOptions& opts = {});

}  // namespace mflq
