#include "mflq/riccati.hpp"

#include <cmath>
#include <limits>

#include "mflq/num_format.hpp"

namespace mflq {

std::string to_string(RiccatiFailureKind kind) {
    switch (kind) {
        case RiccatiFailureKind::SingularSigma0: return "SingularSigma0";
        case RiccatiFailureKind::SingularSigma: return "SingularSigma";
        case RiccatiFailureKind::BlowUp: return "BlowUp";
    }
    return "?";
}

std::string RiccatiFailure::message() const {
    return to_string(kind) + " at s=" + format_double(time) + " (value " + format_double(value) + ")";
}

namespace {

// Positivity gate for the control-weight curvature.  The relative
// threshold keeps a unit floor so the exactly-zero matrix is singular.
bool singular(const Matrix& Sigma, double inv_tol, double* lmin_out) {
    const double lmin = lambda_min(Sigma);
    if (lmin_out) *lmin_out = lmin;
    const double scale = std::max(1.0, Sigma.norm());
    return lmin < inv_tol * scale;
}

struct StageFailure {
    RiccatiFailure failure;
    bool set = false;
};

}  // namespace

PSolveResult solve_P(const ValidatedProblem& vp, const TimeGrid& grid, RiccatiOptions opts) {
    const int n_steps = grid.n_steps;
    PSolveResult out;
    out.P.grid = grid;
    out.P.values.assign(static_cast<std::size_t>(n_steps + 1), Matrix());
    out.sigma0_min.assign(static_cast<std::size_t>(n_steps + 1), 0.0);

    StageFailure sf;
    auto rhs = [&](double s, const Matrix& P) -> Matrix {
        const Matrix A = vp.A(s), B = vp.B(s), C = vp.C(s), D = vp.D(s);
        const Matrix Q = vp.Q(s), S = vp.S(s), R = vp.R(s);
        const Matrix Sigma0 = symmetrized(R + D.transpose() * P * D);
        double lmin = 0.0;
        if (singular(Sigma0, opts.inv_tol, &lmin)) {
            if (!sf.set)
                sf = {{RiccatiFailureKind::SingularSigma0, s, lmin}, true};
            return Matrix::Zero(P.rows(), P.cols());
        }
        const Matrix M = B.transpose() * P + D.transpose() * P * C + S;
        const Matrix drift =
            P * A + A.transpose() * P + C.transpose() * P * C + Q - M.transpose() * Sigma0.llt().solve(M);
        return -drift;  // dP/ds
    };

    out.P.at(n_steps) = vp.G();  // terminal condition set exactly
    const double h = -grid.dt();
    for (int k = n_steps; k >= 1 && !sf.set; --k) {
        const double s = grid.node(k);
        const Matrix& P = out.P.at(k);
        const Matrix k1 = rhs(s, P);
        const Matrix k2 = rhs(s + 0.5 * h, P + 0.5 * h * k1);
        const Matrix k3 = rhs(s + 0.5 * h, P + 0.5 * h * k2);
        const Matrix k4 = rhs(s + h, P + h * k3);
        if (sf.set) break;
        Matrix next = P + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        next = symmetrized(next);
        if (!all_finite(next) || next.norm() > opts.blowup_cap) {
            sf = {{RiccatiFailureKind::BlowUp, grid.node(k - 1), next.norm()}, true};
            break;
        }
        out.P.at(k - 1) = std::move(next);
    }
    if (sf.set) {
        out.failure = sf.failure;
        return out;
    }

    double delta0 = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= n_steps; ++k) {
        const double s = grid.node(k);
        const Matrix D = vp.D(s);
        const Matrix Sigma0 = symmetrized(vp.R(s) + D.transpose() * out.P.at(k) * D);
        const double lmin = lambda_min(Sigma0);
        out.sigma0_min[static_cast<std::size_t>(k)] = lmin;
        delta0 = std::min(delta0, lmin);
    }
    out.delta0 = delta0;
    out.strongly_regular = delta0 >= opts.reg_threshold;
    return out;
}

PiSolveResult solve_Pi(const ValidatedProblem& vp, const MatrixPath& P, const TimeGrid& grid,
                       RiccatiOptions opts) {
    const int n_steps = grid.n_steps;
    PiSolveResult out;
    out.Pi.grid = grid;
    out.Pi.values.assign(static_cast<std::size_t>(n_steps + 1), Matrix());
    out.sigma_min.assign(static_cast<std::size_t>(n_steps + 1), 0.0);

    StageFailure sf;
    auto rhs = [&](double s, const Matrix& Pi) -> Matrix {
        const Matrix Ps = P.eval(s);
        const Matrix Asum = vp.A(s) + vp.Abar(s);
        const Matrix Bsum = vp.B(s) + vp.Bbar(s);
        const Matrix Csum = vp.C(s) + vp.Cbar(s);
        const Matrix Dsum = vp.D(s) + vp.Dbar(s);
        const Matrix Sigma = symmetrized(vp.R(s) + vp.Rbar(s) + Dsum.transpose() * Ps * Dsum);
        double lmin = 0.0;
        if (singular(Sigma, opts.inv_tol, &lmin)) {
            if (!sf.set)
                sf = {{RiccatiFailureKind::SingularSigma, s, lmin}, true};
            return Matrix::Zero(Pi.rows(), Pi.cols());
        }
        const Matrix M = Bsum.transpose() * Pi + Dsum.transpose() * Ps * Csum + vp.S(s) + vp.Sbar(s);
        const Matrix drift = Pi * Asum + Asum.transpose() * Pi + vp.Q(s) + vp.Qbar(s) +
                             Csum.transpose() * Ps * Csum - M.transpose() * Sigma.llt().solve(M);
        return -drift;
    };

    out.Pi.at(n_steps) = vp.G() + vp.Gbar();  // terminal condition set exactly
    const double h = -grid.dt();
    for (int k = n_steps; k >= 1 && !sf.set; --k) {
        const double s = grid.node(k);
        const Matrix& Pi = out.Pi.at(k);
        const Matrix k1 = rhs(s, Pi);
        const Matrix k2 = rhs(s + 0.5 * h, Pi + 0.5 * h * k1);
        const Matrix k3 = rhs(s + 0.5 * h, Pi + 0.5 * h * k2);
        const Matrix k4 = rhs(s + h, Pi + h * k3);
        if (sf.set) break;
        Matrix next = Pi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        next = symmetrized(next);
        if (!all_finite(next) || next.norm() > opts.blowup_cap) {
            sf = {{RiccatiFailureKind::BlowUp, grid.node(k - 1), next.norm()}, true};
            break;
        }
        out.Pi.at(k - 1) = std::move(next);
    }
    if (sf.set) {
        out.failure = sf.failure;
        return out;
    }

    double deltaSigma = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= n_steps; ++k) {
        const double s = grid.node(k);
        const Matrix Dsum = vp.D(s) + vp.Dbar(s);
        const Matrix Sigma =
            symmetrized(vp.R(s) + vp.Rbar(s) + Dsum.transpose() * P.eval(s) * Dsum);
        const double lmin = lambda_min(Sigma);
        out.sigma_min[static_cast<std::size_t>(k)] = lmin;
        deltaSigma = std::min(deltaSigma, lmin);
    }
    out.deltaSigma = deltaSigma;
    out.sigma_positive = deltaSigma >= opts.reg_threshold;
    return out;
}

RiccatiOutcome solve_riccati(const ValidatedProblem& vp, const TimeGrid& grid, RiccatiOptions opts) {
    RiccatiOutcome out;
    PSolveResult p = solve_P(vp, grid, opts);
    if (!p.ok()) {
        out.failure = p.failure;
        return out;
    }
    if (!p.strongly_regular) {
        out.failure = RiccatiFailure{RiccatiFailureKind::SingularSigma0, grid.t0, p.delta0};
        return out;
    }
    PiSolveResult pi = solve_Pi(vp, p.P, grid, opts);
    if (!pi.ok()) {
        out.failure = pi.failure;
        return out;
    }
    if (!pi.sigma_positive) {
        out.failure = RiccatiFailure{RiccatiFailureKind::SingularSigma, grid.t0, pi.deltaSigma};
        return out;
    }
    RiccatiSolution sol;
    sol.P = std::move(p.P);
    sol.Pi = std::move(pi.Pi);
    sol.delta0 = p.delta0;
    sol.deltaSigma = pi.deltaSigma;
    sol.strongly_regular = p.strongly_regular;
    sol.sigma_positive = pi.sigma_positive;
    sol.sigma0_min = std::move(p.sigma0_min);
    sol.sigma_min = std::move(pi.sigma_min);
    out.solution = std::move(sol);
    return out;
}

MatrixPath solve_lyapunov(const ValidatedProblem& vp, const MatrixFn& Theta, const TimeGrid& grid) {
    const int n_steps = grid.n_steps;
    MatrixPath path;
    path.grid = grid;
    path.values.assign(static_cast<std::size_t>(n_steps + 1), Matrix());

    auto rhs = [&](double s, const Matrix& P) -> Matrix {
        const Matrix Th = Theta.eval(s);
        const Matrix Acl = vp.A(s) + vp.B(s) * Th;
        const Matrix Ccl = vp.C(s) + vp.D(s) * Th;
        const Matrix S = vp.S(s);
        const Matrix drift = P * Acl + Acl.transpose() * P + Ccl.transpose() * P * Ccl +
                             Th.transpose() * vp.R(s) * Th + S.transpose() * Th +
                             Th.transpose() * S + vp.Q(s);
        return -drift;
    };

    path.at(n_steps) = vp.G();
    const double h = -grid.dt();
    for (int k = n_steps; k >= 1; --k) {
        const double s = grid.node(k);
        const Matrix& P = path.at(k);
        const Matrix k1 = rhs(s, P);
        const Matrix k2 = rhs(s + 0.5 * h, P + 0.5 * h * k1);
        const Matrix k3 = rhs(s + 0.5 * h, P + 0.5 * h * k2);
        const Matrix k4 = rhs(s + h, P + h * k3);
        Matrix next = symmetrized(P + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
        if (!all_finite(next))
            throw EvalError("solve_lyapunov: non-finite value at s=" + format_double(grid.node(k - 1)));
        path.at(k - 1) = std::move(next);
    }
    return path;
}

GainSet feedback_gains(const ValidatedProblem& vp, const MatrixPath& P, const MatrixPath& Pi,
                       RiccatiOptions opts) {
    const TimeGrid& grid = P.grid;
    std::vector<double> times(static_cast<std::size_t>(grid.n_nodes()));
    std::vector<Matrix> theta(times.size()), theta_bar(times.size());
    for (int k = 0; k <= grid.n_steps; ++k) {
        const double s = grid.node(k);
        times[static_cast<std::size_t>(k)] = s;
        const Matrix B = vp.B(s), C = vp.C(s), D = vp.D(s);
        const Matrix& Pk = P.at(k);
        const Matrix Sigma0 = symmetrized(vp.R(s) + D.transpose() * Pk * D);
        double lmin = 0.0;
        if (singular(Sigma0, opts.inv_tol, &lmin))
            throw EvalError("feedback_gains: Sigma0 singular at s=" + format_double(s));
        theta[static_cast<std::size_t>(k)] =
            -Sigma0.llt().solve(B.transpose() * Pk + D.transpose() * Pk * C + vp.S(s));

        const Matrix Bsum = B + vp.Bbar(s);
        const Matrix Csum = C + vp.Cbar(s);
        const Matrix Dsum = D + vp.Dbar(s);
        const Matrix Sigma = symmetrized(vp.R(s) + vp.Rbar(s) + Dsum.transpose() * Pk * Dsum);
        if (singular(Sigma, opts.inv_tol, &lmin))
            throw EvalError("feedback_gains: Sigma singular at s=" + format_double(s));
        theta_bar[static_cast<std::size_t>(k)] = -Sigma.llt().solve(
            Bsum.transpose() * Pi.at(k) + Dsum.transpose() * Pk * Csum + vp.S(s) + vp.Sbar(s));
    }
    GainSet gains;
    gains.Theta = MatrixFn::sampled(times, std::move(theta), Interp::Linear);
    gains.ThetaBar = MatrixFn::sampled(std::move(times), std::move(theta_bar), Interp::Linear);
    return gains;
}

namespace {

struct ClauseCheck {
    ConditionReport& report;
    double delta = std::numeric_limits<double>::infinity();

    void psd(const std::string& clause, const Matrix& M, double s, double tol) {
        const double lmin = lambda_min(M);
        if (lmin < -tol * std::max(1.0, M.norm()))
            report.violations.push_back({clause, s, lmin});
    }
    void zero(const std::string& clause, const Matrix& M, double s, double tol) {
        const double mx = M.cwiseAbs().maxCoeff();
        if (mx > tol) report.violations.push_back({clause, s, mx});
    }
    void margin(const std::string& clause, const Matrix& M, double s) {
        const double lmin = lambda_min(M);
        delta = std::min(delta, lmin);
        if (lmin <= 0.0) report.violations.push_back({clause, s, lmin});
    }
};

}  // namespace

ConditionReport check_classic_condition(const ValidatedProblem& vp) {
    const double tol = vp.options().psd_tol;
    ConditionReport report;
    ClauseCheck c{report};
    c.psd("G >= 0", vp.G(), vp.grid().T, tol);
    c.psd("G + Gbar >= 0", vp.G() + vp.Gbar(), vp.grid().T, tol);
    const TimeGrid& grid = vp.grid();
    for (int k = 0; k <= grid.n_steps; ++k) {
        const double s = grid.node(k);
        c.psd("Q >= 0", vp.Q(s), s, tol);
        c.psd("Q + Qbar >= 0", vp.Q(s) + vp.Qbar(s), s, tol);
        c.zero("S = 0", vp.S(s), s, tol);
        c.zero("Sbar = 0", vp.Sbar(s), s, tol);
        c.margin("R >= delta I", vp.R(s), s);
        c.margin("R + Rbar >= delta I", vp.R(s) + vp.Rbar(s), s);
    }
    report.holds = report.violations.empty();
    report.delta = report.holds ? std::max(0.0, c.delta) : 0.0;
    return report;
}

ConditionReport check_standard_condition(const ValidatedProblem& vp) {
    const double tol = vp.options().psd_tol;
    ConditionReport report;
    ClauseCheck c{report};
    c.psd("G >= 0", vp.G(), vp.grid().T, tol);
    c.psd("G + Gbar >= 0", vp.G() + vp.Gbar(), vp.grid().T, tol);
    const TimeGrid& grid = vp.grid();
    for (int k = 0; k <= grid.n_steps; ++k) {
        const double s = grid.node(k);
        const Matrix R = vp.R(s);
        const Matrix Rsum = R + vp.Rbar(s);
        c.margin("R >= delta I", R, s);
        c.margin("R + Rbar >= delta I", Rsum, s);
        // Schur complements only make sense once the R blocks are invertible.
        if (lambda_min(R) > 0.0) {
            const Matrix S = vp.S(s);
            c.psd("Q - S'R^{-1}S >= 0", vp.Q(s) - S.transpose() * R.llt().solve(S), s, tol);
        }
        if (lambda_min(Rsum) > 0.0) {
            const Matrix Ssum = vp.S(s) + vp.Sbar(s);
            c.psd("Q+Qbar - (S+Sbar)'(R+Rbar)^{-1}(S+Sbar) >= 0",
                  vp.Q(s) + vp.Qbar(s) - Ssum.transpose() * Rsum.llt().solve(Ssum), s, tol);
        }
    }
    report.holds = report.violations.empty();
    report.delta = report.holds ? std::max(0.0, c.delta) : 0.0;
    return report;
}

}  // namespace mflq
