#include "mflq/auxiliary.hpp"

#include <cmath>
#include <functional>

#include "mflq/num_format.hpp"
#include "mflq/quadrature.hpp"

namespace mflq {

AffineControlLaw FeedbackLaw::to_control_law() const {
    // phi - E[phi] = 0 for deterministic phi, so the centered offset is
    // structurally zero and only phiBar survives.
    return AffineControlLaw::feedback(gains.Theta, gains.ThetaBar, phiBar);
}

namespace {

VectorPath integrate_backward(const TimeGrid& grid, const Vector& terminal,
                              const std::function<Vector(double, const Vector&)>& rhs,
                              const char* what) {
    VectorPath path;
    path.grid = grid;
    path.values.assign(static_cast<std::size_t>(grid.n_nodes()), Vector());
    path.at(grid.n_steps) = terminal;  // terminal condition set exactly
    const double h = -grid.dt();
    for (int k = grid.n_steps; k >= 1; --k) {
        const double s = grid.node(k);
        const Vector& y = path.at(k);
        const Vector k1 = rhs(s, y);
        const Vector k2 = rhs(s + 0.5 * h, y + 0.5 * h * k1);
        const Vector k3 = rhs(s + 0.5 * h, y + 0.5 * h * k2);
        const Vector k4 = rhs(s + h, y + h * k3);
        Vector next = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!next.allFinite())
            throw EvalError(std::string(what) + ": non-finite value at s=" +
                            format_double(grid.node(k - 1)));
        path.at(k - 1) = std::move(next);
    }
    return path;
}

}  // namespace

VectorPath solve_eta(const ValidatedProblem& vp, const MatrixPath& P, const MatrixFn& Theta,
                     const TimeGrid& grid) {
    auto rhs = [&](double s, const Vector& eta) -> Vector {
        const Matrix Th = Theta.eval(s);
        const Matrix Ps = P.eval(s);
        const Matrix Acl = vp.A(s) + vp.B(s) * Th;
        const Matrix Ccl = vp.C(s) + vp.D(s) * Th;
        return -(Acl.transpose() * eta + Ccl.transpose() * (Ps * vp.sigma(s)) +
                 Th.transpose() * vp.rho(s) + Ps * vp.b(s) + vp.q(s));
    };
    return integrate_backward(grid, vp.g(), rhs, "solve_eta");
}

VectorPath solve_eta_bar(const ValidatedProblem& vp, const MatrixPath& P, const MatrixPath& Pi,
                         const MatrixFn& ThetaBar, const VectorPath& eta, const TimeGrid& grid) {
    (void)eta;  // enters only with stochastic drivers, which are out of scope
    auto rhs = [&](double s, const Vector& ebar) -> Vector {
        const Matrix Tb = ThetaBar.eval(s);
        const Matrix Ps = P.eval(s);
        const Matrix Asum = vp.A(s) + vp.Abar(s);
        const Matrix Bsum = vp.B(s) + vp.Bbar(s);
        const Matrix Csum = vp.C(s) + vp.Cbar(s);
        const Matrix Dsum = vp.D(s) + vp.Dbar(s);
        const Vector Psig = Ps * vp.sigma(s);
        return -((Asum + Bsum * Tb).transpose() * ebar +
                 Tb.transpose() * (Dsum.transpose() * Psig + vp.rho(s) + vp.rhobar(s)) +
                 Csum.transpose() * Psig + vp.q(s) + vp.qbar(s) + Pi.eval(s) * vp.b(s));
    };
    return integrate_backward(grid, vp.g() + vp.gbar(), rhs, "solve_eta_bar");
}

Offsets offsets(const ValidatedProblem& vp, const MatrixPath& P, const VectorPath& eta,
                const VectorPath& etaBar, RiccatiOptions opts) {
    const TimeGrid& grid = P.grid;
    std::vector<double> times(static_cast<std::size_t>(grid.n_nodes()));
    std::vector<Matrix> phi(times.size()), phi_bar(times.size());
    for (int k = 0; k <= grid.n_steps; ++k) {
        const double s = grid.node(k);
        times[static_cast<std::size_t>(k)] = s;
        const Matrix B = vp.B(s), D = vp.D(s);
        const Matrix& Pk = P.at(k);
        const Vector Psig = Pk * vp.sigma(s);

        const Matrix Sigma0 = symmetrized(vp.R(s) + D.transpose() * Pk * D);
        double lmin = lambda_min(Sigma0);
        if (lmin < opts.inv_tol * std::max(1.0, Sigma0.norm()))
            throw EvalError("offsets: Sigma0 singular at s=" + format_double(s));
        phi[static_cast<std::size_t>(k)] =
            -Sigma0.llt().solve((B.transpose() * eta.at(k) + D.transpose() * Psig + vp.rho(s)).eval());

        const Matrix Bsum = B + vp.Bbar(s);
        const Matrix Dsum = D + vp.Dbar(s);
        const Matrix Sigma = symmetrized(vp.R(s) + vp.Rbar(s) + Dsum.transpose() * Pk * Dsum);
        lmin = lambda_min(Sigma);
        if (lmin < opts.inv_tol * std::max(1.0, Sigma.norm()))
            throw EvalError("offsets: Sigma singular at s=" + format_double(s));
        phi_bar[static_cast<std::size_t>(k)] = -Sigma.llt().solve(
            (Bsum.transpose() * etaBar.at(k) + Dsum.transpose() * Psig + vp.rho(s) + vp.rhobar(s))
                .eval());
    }
    Offsets out;
    out.phi = MatrixFn::sampled(times, std::move(phi), Interp::Linear);
    out.phiBar = MatrixFn::sampled(std::move(times), std::move(phi_bar), Interp::Linear);
    return out;
}

AuxiliarySolution make_auxiliary(const ValidatedProblem& vp, const RiccatiSolution& riccati,
                                 const GainSet& gains, RiccatiOptions opts) {
    AuxiliarySolution aux;
    aux.eta = solve_eta(vp, riccati.P, gains.Theta, riccati.P.grid);
    aux.etaBar = solve_eta_bar(vp, riccati.P, riccati.Pi, gains.ThetaBar, aux.eta, riccati.P.grid);
    Offsets off = offsets(vp, riccati.P, aux.eta, aux.etaBar, opts);
    aux.phi = std::move(off.phi);
    aux.phiBar = std::move(off.phiBar);
    aux.zeta_is_zero = true;
    return aux;
}

AffineControlLaw optimal_law(const GainSet& gains, const AuxiliarySolution& aux) {
    return AffineControlLaw::feedback(gains.Theta, gains.ThetaBar, aux.phiBar);
}

double value_at(const ValidatedProblem& vp, const MatrixPath& P, const MatrixPath& Pi,
                const AuxiliarySolution& aux, const InitialLaw& law0) {
    validate_initial_law(law0, vp.n(), vp.options());
    const TimeGrid& grid = P.grid;
    const Vector& mu = law0.mean;

    double value = (P.front() * law0.cov).trace() + mu.dot(Pi.front() * mu) +
                   2.0 * aux.etaBar.front().dot(mu);

    std::vector<double> integrand(static_cast<std::size_t>(grid.n_nodes()));
    for (int k = 0; k <= grid.n_steps; ++k) {
        const double s = grid.node(k);
        const Vector sig = vp.sigma(s);
        const Matrix Dsum = vp.D(s) + vp.Dbar(s);
        const Matrix Sigma = symmetrized(vp.R(s) + vp.Rbar(s) + Dsum.transpose() * P.at(k) * Dsum);
        const Vector phi_bar = aux.phiBar.eval(s).col(0);
        integrand[static_cast<std::size_t>(k)] = sig.dot(P.at(k) * sig) +
                                                 2.0 * aux.etaBar.at(k).dot(vp.b(s)) -
                                                 phi_bar.dot(Sigma * phi_bar);
    }
    return value + simpson(grid, integrand);
}

DlqClosedLoop dlq_closed_loop(const ValidatedProblem& vp, const MatrixFn& Theta, const MatrixFn& v,
                              const Vector& x0, const TimeGrid& grid) {
    DlqClosedLoop out;
    out.y.grid = grid;
    out.y.values.assign(static_cast<std::size_t>(grid.n_nodes()), Vector());
    out.y.at(0) = x0;
    auto rhs = [&](double s, const Vector& y) -> Vector {
        const Matrix Th = Theta.eval(s);
        return (vp.A(s) + vp.Abar(s)) * y +
               (vp.B(s) + vp.Bbar(s)) * (Th * y + v.eval(s).col(0));
    };
    const double h = grid.dt();
    for (int k = 0; k < grid.n_steps; ++k) {
        const double s = grid.node(k);
        const Vector& y = out.y.at(k);
        const Vector k1 = rhs(s, y);
        const Vector k2 = rhs(s + 0.5 * h, y + 0.5 * h * k1);
        const Vector k3 = rhs(s + 0.5 * h, y + 0.5 * h * k2);
        const Vector k4 = rhs(s + h, y + h * k3);
        out.y.at(k + 1) = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    std::vector<double> times(static_cast<std::size_t>(grid.n_nodes()));
    std::vector<Matrix> w(times.size());
    for (int k = 0; k <= grid.n_steps; ++k) {
        const double s = grid.node(k);
        times[static_cast<std::size_t>(k)] = s;
        w[static_cast<std::size_t>(k)] = Theta.eval(s) * out.y.at(k) + v.eval(s);
    }
    out.w = MatrixFn::sampled(std::move(times), std::move(w), Interp::Linear);
    return out;
}

double dlq_cost(const ValidatedProblem& vp, const MatrixPath& P, const MatrixFn& v,
                const Vector& x0, const TimeGrid& grid) {
    // Forward state under the open-loop control.
    VectorPath y;
    y.grid = grid;
    y.values.assign(static_cast<std::size_t>(grid.n_nodes()), Vector());
    y.at(0) = x0;
    auto rhs = [&](double s, const Vector& ys) -> Vector {
        return (vp.A(s) + vp.Abar(s)) * ys + (vp.B(s) + vp.Bbar(s)) * v.eval(s).col(0);
    };
    const double h = grid.dt();
    for (int k = 0; k < grid.n_steps; ++k) {
        const double s = grid.node(k);
        const Vector& yk = y.at(k);
        const Vector k1 = rhs(s, yk);
        const Vector k2 = rhs(s + 0.5 * h, yk + 0.5 * h * k1);
        const Vector k3 = rhs(s + 0.5 * h, yk + 0.5 * h * k2);
        const Vector k4 = rhs(s + h, yk + h * k3);
        y.at(k + 1) = yk + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }

    std::vector<double> integrand(static_cast<std::size_t>(grid.n_nodes()));
    for (int k = 0; k <= grid.n_steps; ++k) {
        const double s = grid.node(k);
        const Matrix Ps = P.eval(s);
        const Matrix Csum = vp.C(s) + vp.Cbar(s);
        const Matrix Dsum = vp.D(s) + vp.Dbar(s);
        const Matrix Upsilon = vp.Q(s) + vp.Qbar(s) + Csum.transpose() * Ps * Csum;
        const Matrix Gamma = Dsum.transpose() * Ps * Csum + vp.S(s) + vp.Sbar(s);
        const Matrix Sigma = vp.R(s) + vp.Rbar(s) + Dsum.transpose() * Ps * Dsum;
        const Vector yk = y.at(k);
        const Vector vk = v.eval(s).col(0);
        integrand[static_cast<std::size_t>(k)] =
            yk.dot(Upsilon * yk) + 2.0 * vk.dot(Gamma * yk) + vk.dot(Sigma * vk);
    }
    const Vector yT = y.back();
    return yT.dot((vp.G() + vp.Gbar()) * yT) + simpson(grid, integrand);
}

}  // namespace mflq
