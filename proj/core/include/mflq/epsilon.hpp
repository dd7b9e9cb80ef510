#pragma once

#include <optional>

#include "mflq/auxiliary.hpp"
#include "mflq/moments.hpp"

namespace mflq {

/// Finite-schedule proxies for the asymptotic statements the sweep can
/// only sample.  Verdicts other than UNIFORMLY_CONVEX are evidence, not
/// proof.
struct EpsilonTolerances {
    // A decade schedule ending at eps = 0.01 already shows ~6% growth of
    // the control norm on solvable problems, so the certification gate
    // sits at 10%.
    double norm_growth_tol = 0.10;  // relative growth of norm_eps between the two smallest eps
    double value_floor = 1e9;       // V_eps below -value_floor counts as divergence evidence
    RiccatiOptions riccati;
};

enum class SolvabilityVerdict {
    UniformlyConvex,
    Solvable,
    FiniteUnresolved,
    NotFiniteEvidence,
    NotConvexEvidence,
};

std::string to_string(SolvabilityVerdict v);

/// Result of solving the regularized problem at one epsilon.
struct EpsilonEntry {
    double epsilon = 0.0;
    bool riccati_ok = false;
    std::optional<RiccatiFailure> failure;
    double value = 0.0;        // V_eps at the initial pair
    double norm = 0.0;         // E int |u*_eps|^2 ds
    double delta0 = 0.0;       // Sigma0 margin of the regularized problem
    double deltaSigma = 0.0;   // Sigma margin of the regularized problem
    std::optional<AffineControlLaw> law;
    VectorPath mean_control;   // realized E[u*_eps] at the grid nodes
};

struct EpsilonReport {
    std::vector<EpsilonEntry> entries;  // in schedule order (decreasing eps)
    std::optional<EpsilonEntry> base;   // the eps = 0 attempt
    SolvabilityVerdict verdict = SolvabilityVerdict::NotConvexEvidence;
    /// Gains/offset extrapolated linearly in eps to 0 from the two
    /// smallest solved eps (node-wise Richardson step).
    std::optional<AffineControlLaw> limit_law;
    /// The realized controls E[u*_eps] extrapolated node-wise to eps = 0.
    /// This is the sequence whose convergence certifies solvability, and
    /// it stays well behaved even where the limit gain is singular
    /// because the optimal mean state vanishes there.
    std::optional<VectorPath> limit_control;
};

/// The regularized problem: R replaced by R + eps I (so R + Rbar picks
/// up the same shift).  Requires eps > 0.
ProblemSpec regularize(const ProblemSpec& spec, double epsilon);

/// Solve the regularized problem end to end: Riccati pair, gains,
/// auxiliary ODEs, value and control norm.  Riccati failure is returned
/// in the entry, not thrown: by the Riccati characterization it
/// witnesses that the cost at this regularization level is not
/// uniformly convex.
EpsilonEntry solve_epsilon_problem(const ValidatedProblem& vp, double epsilon,
                                   const InitialLaw& law0, const TimeGrid& grid,
                                   EpsilonTolerances tol = {});

/// Run the schedule (strictly decreasing, positive), classify:
///   - eps = 0 itself strongly regular with Sigma >> 0  -> UNIFORMLY_CONVEX
///   - all eps solve, control norms bounded              -> SOLVABLE
///   - values bounded below, norms diverging             -> FINITE_UNRESOLVED
///   - values below -value_floor                         -> NOT_FINITE_EVIDENCE
///   - some Riccati failure along the schedule           -> NOT_CONVEX_EVIDENCE
EpsilonReport diagnose_solvability(const ValidatedProblem& vp, const InitialLaw& law0,
                                   const std::vector<double>& schedule, const TimeGrid& grid,
                                   EpsilonTolerances tol = {});

}  // namespace mflq
