#include "mflq/epsilon.hpp"

#include <algorithm>
#include <cmath>

namespace mflq {

std::string to_string(SolvabilityVerdict v) {
    switch (v) {
        case SolvabilityVerdict::UniformlyConvex: return "UNIFORMLY_CONVEX";
        case SolvabilityVerdict::Solvable: return "SOLVABLE";
        case SolvabilityVerdict::FiniteUnresolved: return "FINITE_UNRESOLVED";
        case SolvabilityVerdict::NotFiniteEvidence: return "NOT_FINITE_EVIDENCE";
        case SolvabilityVerdict::NotConvexEvidence: return "NOT_CONVEX_EVIDENCE";
    }
    return "?";
}

ProblemSpec regularize(const ProblemSpec& spec, double epsilon) {
    if (!(epsilon > 0.0)) throw ValidationError("regularize: epsilon must be > 0");
    ProblemSpec out = spec;
    out.R = MatrixFn::shifted(spec.R, epsilon * Matrix::Identity(spec.m, spec.m));
    return out;
}

namespace {

EpsilonEntry solve_at(const ValidatedProblem& base, double epsilon, const InitialLaw& law0,
                      const TimeGrid& grid, const EpsilonTolerances& tol) {
    EpsilonEntry entry;
    entry.epsilon = epsilon;
    const ValidatedProblem vp =
        epsilon > 0.0 ? validate_problem(regularize(base.spec(), epsilon), base.options()) : base;

    const RiccatiOutcome outcome = solve_riccati(vp, grid, tol.riccati);
    if (!outcome.ok()) {
        entry.riccati_ok = false;
        entry.failure = outcome.failure;
        return entry;
    }
    const RiccatiSolution& sol = *outcome.solution;
    entry.riccati_ok = true;
    entry.delta0 = sol.delta0;
    entry.deltaSigma = sol.deltaSigma;

    const GainSet gains = feedback_gains(vp, sol.P, sol.Pi, tol.riccati);
    const AuxiliarySolution aux = make_auxiliary(vp, sol, gains, tol.riccati);
    entry.law = optimal_law(gains, aux);
    entry.value = value_at(vp, sol.P, sol.Pi, aux, law0);
    entry.norm = control_norm(vp, *entry.law, law0, grid);
    entry.mean_control = mean_control(*entry.law, propagate_moments(vp, *entry.law, law0, grid));
    return entry;
}

/// Node-wise linear extrapolation to eps = 0 from (eps1, f1), (eps2, f2),
/// eps1 < eps2:  f0 = (eps2 f1 - eps1 f2) / (eps2 - eps1).
template <typename V>
V extrapolate(double eps1, const V& f1, double eps2, const V& f2) {
    return (eps2 * f1 - eps1 * f2) / (eps2 - eps1);
}

MatrixFn extrapolate_fn(double eps1, const MatrixFn& f1, double eps2, const MatrixFn& f2,
                        const TimeGrid& grid) {
    std::vector<double> times(static_cast<std::size_t>(grid.n_nodes()));
    std::vector<Matrix> values(times.size());
    for (int k = 0; k <= grid.n_steps; ++k) {
        const double s = grid.node(k);
        times[static_cast<std::size_t>(k)] = s;
        values[static_cast<std::size_t>(k)] = extrapolate(eps1, f1.eval(s), eps2, f2.eval(s));
    }
    return MatrixFn::sampled(std::move(times), std::move(values), Interp::Linear);
}

}  // namespace

EpsilonEntry solve_epsilon_problem(const ValidatedProblem& vp, double epsilon,
                                   const InitialLaw& law0, const TimeGrid& grid,
                                   EpsilonTolerances tol) {
    if (!(epsilon > 0.0)) throw ValidationError("solve_epsilon_problem: epsilon must be > 0");
    return solve_at(vp, epsilon, law0, grid, tol);
}

EpsilonReport diagnose_solvability(const ValidatedProblem& vp, const InitialLaw& law0,
                                   const std::vector<double>& schedule, const TimeGrid& grid,
                                   EpsilonTolerances tol) {
    if (schedule.empty()) throw ValidationError("diagnose_solvability: empty schedule");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (!(schedule[i] > 0.0))
            throw ValidationError("diagnose_solvability: schedule must be positive");
        if (i > 0 && !(schedule[i] < schedule[i - 1]))
            throw ValidationError("diagnose_solvability: schedule must be strictly decreasing");
    }

    EpsilonReport report;

    // The unregularized problem first: if its own Riccati pair is
    // strongly regular the cost is already uniformly convex and the
    // eps = 0 law is the answer.
    report.base = solve_at(vp, 0.0, law0, grid, tol);
    if (report.base->riccati_ok) {
        report.verdict = SolvabilityVerdict::UniformlyConvex;
        report.limit_law = report.base->law;
        report.limit_control = report.base->mean_control;
        for (double eps : schedule) report.entries.push_back(solve_at(vp, eps, law0, grid, tol));
        return report;
    }

    bool any_failure = false;
    for (double eps : schedule) {
        report.entries.push_back(solve_at(vp, eps, law0, grid, tol));
        if (!report.entries.back().riccati_ok) any_failure = true;
    }
    if (any_failure) {
        report.verdict = SolvabilityVerdict::NotConvexEvidence;
        return report;
    }

    const EpsilonEntry& last = report.entries.back();
    if (last.value < -tol.value_floor) {
        report.verdict = SolvabilityVerdict::NotFiniteEvidence;
        return report;
    }

    if (report.entries.size() >= 2) {
        const EpsilonEntry& prev = report.entries[report.entries.size() - 2];
        const double growth =
            (last.norm - prev.norm) / std::max(1e-300, std::abs(prev.norm));
        if (growth < tol.norm_growth_tol) {
            report.verdict = SolvabilityVerdict::Solvable;
            const double e1 = last.epsilon, e2 = prev.epsilon;
            report.limit_law = AffineControlLaw::feedback(
                extrapolate_fn(e1, last.law->K, e2, prev.law->K, grid),
                extrapolate_fn(e1, last.law->Kbar, e2, prev.law->Kbar, grid),
                extrapolate_fn(e1, last.law->k_mean, e2, prev.law->k_mean, grid));
            VectorPath limit;
            limit.grid = grid;
            limit.values.assign(static_cast<std::size_t>(grid.n_nodes()), Vector());
            for (int k = 0; k <= grid.n_steps; ++k)
                limit.at(k) = extrapolate(e1, last.mean_control.at(k), e2, prev.mean_control.at(k));
            report.limit_control = std::move(limit);
            return report;
        }
        report.verdict = SolvabilityVerdict::FiniteUnresolved;
        return report;
    }

    // A single-point schedule that solves is weak evidence either way;
    // treat a finite value as unresolved.
    report.verdict = SolvabilityVerdict::FiniteUnresolved;
    return report;
}

}  // namespace mflq
