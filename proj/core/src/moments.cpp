#include "mflq/moments.hpp"

#include "mflq/quadrature.hpp"

namespace mflq {

MomentPath propagate_moments(const ValidatedProblem& vp, const AffineControlLaw& law,
                             const InitialLaw& law0, const TimeGrid& grid) {
    validate_initial_law(law0, vp.n(), vp.options());
    MomentPath out;
    out.grid = grid;
    out.mean.grid = grid;
    out.cov.grid = grid;
    out.mean.values.assign(static_cast<std::size_t>(grid.n_nodes()), Vector());
    out.cov.values.assign(static_cast<std::size_t>(grid.n_nodes()), Matrix());
    out.mean.at(0) = law0.mean;
    out.cov.at(0) = symmetrized(law0.cov);

    auto mean_rhs = [&](double s, const Vector& m) -> Vector {
        const Vector ubar = law.Kbar.eval(s) * m + law.k_mean.eval(s).col(0);
        return (vp.A(s) + vp.Abar(s)) * m + (vp.B(s) + vp.Bbar(s)) * ubar + vp.b(s);
    };
    auto cov_rhs = [&](double s, const Vector& m, const Matrix& V) -> Matrix {
        const Matrix K = law.K.eval(s);
        const Matrix Acl = vp.A(s) + vp.B(s) * K;
        const Matrix Ccl = vp.C(s) + vp.D(s) * K;
        const Vector ubar = law.Kbar.eval(s) * m + law.k_mean.eval(s).col(0);
        const Vector d = vp.sigma(s) + (vp.C(s) + vp.Cbar(s)) * m + (vp.D(s) + vp.Dbar(s)) * ubar;
        return Acl * V + V * Acl.transpose() + Ccl * V * Ccl.transpose() + d * d.transpose();
    };

    const double h = grid.dt();
    for (int k = 0; k < grid.n_steps; ++k) {
        const double s = grid.node(k);
        const Vector& m = out.mean.at(k);
        const Matrix& V = out.cov.at(k);

        // Joint RK4 stage evaluation keeps the covariance forcing d d'
        // consistent with the stage means.
        const Vector km1 = mean_rhs(s, m);
        const Matrix kv1 = cov_rhs(s, m, V);
        const Vector km2 = mean_rhs(s + 0.5 * h, m + 0.5 * h * km1);
        const Matrix kv2 = cov_rhs(s + 0.5 * h, m + 0.5 * h * km1, V + 0.5 * h * kv1);
        const Vector km3 = mean_rhs(s + 0.5 * h, m + 0.5 * h * km2);
        const Matrix kv3 = cov_rhs(s + 0.5 * h, m + 0.5 * h * km2, V + 0.5 * h * kv2);
        const Vector km4 = mean_rhs(s + h, m + h * km3);
        const Matrix kv4 = cov_rhs(s + h, m + h * km3, V + h * kv3);

        Vector m_next = m + (h / 6.0) * (km1 + 2.0 * km2 + 2.0 * km3 + km4);
        Matrix V_next = symmetrized(V + (h / 6.0) * (kv1 + 2.0 * kv2 + 2.0 * kv3 + kv4));
        if (!m_next.allFinite() || !all_finite(V_next))
            throw EvalError("propagate_moments: non-finite value");
        out.mean.at(k + 1) = std::move(m_next);
        out.cov.at(k + 1) = std::move(V_next);
    }
    return out;
}

double mean_part_cost(const ValidatedProblem& vp, const AffineControlLaw& law,
                      const MomentPath& moments) {
    const TimeGrid& grid = moments.grid;
    std::vector<double> integrand(static_cast<std::size_t>(grid.n_nodes()));
    for (int k = 0; k <= grid.n_steps; ++k) {
        const double s = grid.node(k);
        const Vector& m = moments.mean.at(k);
        const Vector ubar = law.Kbar.eval(s) * m + law.k_mean.eval(s).col(0);
        const Matrix Qsum = vp.Q(s) + vp.Qbar(s);
        const Matrix Ssum = vp.S(s) + vp.Sbar(s);
        const Matrix Rsum = vp.R(s) + vp.Rbar(s);
        integrand[static_cast<std::size_t>(k)] =
            m.dot(Qsum * m) + 2.0 * ubar.dot(Ssum * m) + ubar.dot(Rsum * ubar) +
            2.0 * (vp.q(s) + vp.qbar(s)).dot(m) + 2.0 * (vp.rho(s) + vp.rhobar(s)).dot(ubar);
    }
    const Vector& mT = moments.mean.back();
    const double terminal =
        mT.dot((vp.G() + vp.Gbar()) * mT) + 2.0 * (vp.g() + vp.gbar()).dot(mT);
    return terminal + simpson(grid, integrand);
}

CostSplit exact_cost_split(const ValidatedProblem& vp, const AffineControlLaw& law,
                           const InitialLaw& law0, const TimeGrid& grid) {
    const MomentPath moments = propagate_moments(vp, law, law0, grid);
    CostSplit split;
    split.mean_part = mean_part_cost(vp, law, moments);

    std::vector<double> integrand(static_cast<std::size_t>(grid.n_nodes()));
    for (int k = 0; k <= grid.n_steps; ++k) {
        const double s = grid.node(k);
        const Matrix K = law.K.eval(s);
        const Matrix& V = moments.cov.at(k);
        const Matrix S = vp.S(s);
        const Matrix W =
            vp.Q(s) + K.transpose() * vp.R(s) * K + S.transpose() * K + K.transpose() * S;
        integrand[static_cast<std::size_t>(k)] = (W * V).trace();
    }
    split.centered_part = (vp.G() * moments.cov.back()).trace() + simpson(grid, integrand);
    return split;
}

double exact_cost(const ValidatedProblem& vp, const AffineControlLaw& law, const InitialLaw& law0,
                  const TimeGrid& grid) {
    return exact_cost_split(vp, law, law0, grid).total();
}

double control_norm(const ValidatedProblem& vp, const AffineControlLaw& law,
                    const InitialLaw& law0, const TimeGrid& grid) {
    const MomentPath moments = propagate_moments(vp, law, law0, grid);
    std::vector<double> integrand(static_cast<std::size_t>(grid.n_nodes()));
    for (int k = 0; k <= grid.n_steps; ++k) {
        const double s = grid.node(k);
        const Matrix K = law.K.eval(s);
        const Vector ubar = law.Kbar.eval(s) * moments.mean.at(k) + law.k_mean.eval(s).col(0);
        integrand[static_cast<std::size_t>(k)] =
            (K * moments.cov.at(k) * K.transpose()).trace() + ubar.squaredNorm();
    }
    return simpson(grid, integrand);
}

VectorPath mean_control(const AffineControlLaw& law, const MomentPath& moments) {
    VectorPath out;
    out.grid = moments.grid;
    out.values.assign(static_cast<std::size_t>(moments.grid.n_nodes()), Vector());
    for (int k = 0; k <= moments.grid.n_steps; ++k) {
        const double s = moments.grid.node(k);
        out.at(k) = law.Kbar.eval(s) * moments.mean.at(k) + law.k_mean.eval(s).col(0);
    }
    return out;
}

}  // namespace mflq
