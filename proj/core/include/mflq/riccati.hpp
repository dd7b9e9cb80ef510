#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mflq/problem.hpp"

namespace mflq {

struct RiccatiOptions {
    double inv_tol = 1e-8;        // singularity gate, relative to the control-weight norm
    double reg_threshold = 1e-8;  // margin required to declare strong regularity
    double blowup_cap = 1e12;     // Frobenius cap signalling finite-time escape
};

enum class RiccatiFailureKind { SingularSigma0, SingularSigma, BlowUp };

std::string to_string(RiccatiFailureKind kind);

/// Where and how a Riccati integration failed.  `value` is the offending
/// minimum eigenvalue (singularities) or norm (blow-up).
struct RiccatiFailure {
    RiccatiFailureKind kind;
    double time = 0.0;
    double value = 0.0;
    std::string message() const;
};

/// Backward solution of the centered-dynamics Riccati equation
///     P' + PA + A'P + C'PC + Q
///        - (PB + C'PD + S') (R + D'PD)^{-1} (B'P + D'PC + S) = 0,
///     P(T) = G,
/// with Sigma0 = R + D'PD required positive at every stage.
struct PSolveResult {
    MatrixPath P;
    double delta0 = 0.0;  // min over nodes of lambda_min(R + D'PD)
    bool strongly_regular = false;
    std::optional<RiccatiFailure> failure;
    std::vector<double> sigma0_min;  // node-wise lambda_min(Sigma0)
    bool ok() const { return !failure.has_value(); }
};

/// Backward solution of the mean-dynamics Riccati equation (the Riccati
/// equation of the reduced deterministic LQ problem), terminal value
/// G + Gbar, with Sigma = R + Rbar + (D+Dbar)'P(D+Dbar) required
/// positive.  P is taken from a previous solve_P and interpolated
/// linearly between its nodes.
struct PiSolveResult {
    MatrixPath Pi;
    double deltaSigma = 0.0;  // min over nodes of lambda_min(Sigma)
    bool sigma_positive = false;
    std::optional<RiccatiFailure> failure;
    std::vector<double> sigma_min;  // node-wise lambda_min(Sigma)
    bool ok() const { return !failure.has_value(); }
};

/// Both Riccati paths plus the regularity certificates.
struct RiccatiSolution {
    MatrixPath P;
    MatrixPath Pi;
    double delta0 = 0.0;
    double deltaSigma = 0.0;
    bool strongly_regular = false;
    bool sigma_positive = false;
    std::vector<double> sigma0_min;
    std::vector<double> sigma_min;
};

/// Optimal feedback gains
///     Theta    = -(R + D'PD)^{-1} (B'P + D'PC + S)
///     ThetaBar = -Sigma^{-1} [(B+Bbar)'Pi + (D+Dbar)'P(C+Cbar) + S+Sbar]
/// sampled at the grid nodes with linear interpolation.  Theta acts on
/// X - E[X]; ThetaBar acts on E[X].
struct GainSet {
    MatrixFn Theta;
    MatrixFn ThetaBar;
};

PSolveResult solve_P(const ValidatedProblem& vp, const TimeGrid& grid, RiccatiOptions opts = {});

PiSolveResult solve_Pi(const ValidatedProblem& vp, const MatrixPath& P, const TimeGrid& grid,
                       RiccatiOptions opts = {});

/// Convenience: solve_P then solve_Pi.  Returns the failure of whichever
/// stage broke.
struct RiccatiOutcome {
    std::optional<RiccatiSolution> solution;
    std::optional<RiccatiFailure> failure;
    bool ok() const { return solution.has_value(); }
};
RiccatiOutcome solve_riccati(const ValidatedProblem& vp, const TimeGrid& grid,
                             RiccatiOptions opts = {});

/// Backward Lyapunov equation at a fixed gain Theta:
///     P' + P(A+B Theta) + (A+B Theta)'P + (C+D Theta)'P(C+D Theta)
///        + Theta'R Theta + S'Theta + Theta'S + Q = 0,  P(T) = G.
MatrixPath solve_lyapunov(const ValidatedProblem& vp, const MatrixFn& Theta, const TimeGrid& grid);

GainSet feedback_gains(const ValidatedProblem& vp, const MatrixPath& P, const MatrixPath& Pi,
                       RiccatiOptions opts = {});

/// One clause of a sufficient-condition check that did not hold.
struct ConditionViolation {
    std::string clause;
    double time = 0.0;
    double value = 0.0;
};

struct ConditionReport {
    bool holds = false;
    double delta = 0.0;  // largest margin for the R-clauses when the report holds
    std::vector<ConditionViolation> violations;
    const ConditionViolation* first_violation() const {
        return violations.empty() ? nullptr : &violations.front();
    }
};

/// Nonnegativity-based condition under which the classical theory already
/// gives solvability: G, G+Gbar, Q, Q+Qbar >= 0; S = Sbar = 0;
/// R, R+Rbar >= delta I.
ConditionReport check_classic_condition(const ValidatedProblem& vp);

/// Weaker sufficient condition for uniform convexity:
/// G, G+Gbar >= 0; R, R+Rbar >= delta I; Q - S'R^{-1}S >= 0;
/// Q+Qbar - (S+Sbar)'(R+Rbar)^{-1}(S+Sbar) >= 0.
ConditionReport check_standard_condition(const ValidatedProblem& vp);

}  // namespace mflq
