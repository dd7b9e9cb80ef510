#pragma once

#include "mflq/riccati.hpp"

namespace mflq {

/// Backward auxiliary data of the feedback representation.  With the
/// deterministic-driver restriction the martingale component of the
/// backward equation vanishes identically, so eta solves a plain linear
/// ODE and zeta_is_zero is always true.
struct AuxiliarySolution {
    VectorPath eta;      // eta(T) = g
    VectorPath etaBar;   // etaBar(T) = g + gbar
    MatrixFn phi;        // m x 1, sampled
    MatrixFn phiBar;     // m x 1, sampled
    bool zeta_is_zero = true;
};

/// Gains plus offsets: everything needed to write the optimal control
///     u* = Theta (X - E[X]) + ThetaBar E[X] + (phi - E[phi]) + phiBar.
struct FeedbackLaw {
    GainSet gains;
    MatrixFn phi;
    MatrixFn phiBar;
    AffineControlLaw to_control_law() const;
};

/// eta' = -[(A + B Theta)' eta + (C + D Theta)' P sigma + Theta' rho
///          + P b + q],  eta(T) = g.
VectorPath solve_eta(const ValidatedProblem& vp, const MatrixPath& P, const MatrixFn& Theta,
                     const TimeGrid& grid);

/// etaBar' = -[((A+Abar) + (B+Bbar) ThetaBar)' etaBar
///             + ThetaBar' ((D+Dbar)' P sigma + rho + rhobar)
///             + (C+Cbar)' P sigma + q + qbar + Pi b],
/// etaBar(T) = g + gbar.  The eta path is accepted for interface parity
/// with the stochastic-driver form; it does not enter under the
/// deterministic-driver restriction.
VectorPath solve_eta_bar(const ValidatedProblem& vp, const MatrixPath& P, const MatrixPath& Pi,
                         const MatrixFn& ThetaBar, const VectorPath& eta, const TimeGrid& grid);

/// Node-wise offsets
///     phi    = -(R + D'PD)^{-1} (B' eta + D'P sigma + rho)
///     phiBar = -Sigma^{-1} ((B+Bbar)' etaBar + (D+Dbar)'P sigma + rho + rhobar).
struct Offsets {
    MatrixFn phi;
    MatrixFn phiBar;
};
Offsets offsets(const ValidatedProblem& vp, const MatrixPath& P, const VectorPath& eta,
                const VectorPath& etaBar, RiccatiOptions opts = {});

/// Full auxiliary solve for a strongly regular Riccati solution.
AuxiliarySolution make_auxiliary(const ValidatedProblem& vp, const RiccatiSolution& riccati,
                                 const GainSet& gains, RiccatiOptions opts = {});

/// The optimal law assembled from gains and offsets; with deterministic
/// drivers phi - E[phi] = 0, so only phiBar enters the control.
AffineControlLaw optimal_law(const GainSet& gains, const AuxiliarySolution& aux);

/// Closed-form value at the initial pair:
///     V = tr(P(t0) Cov[xi]) + <Pi(t0) mu, mu> + 2 <etaBar(t0), mu>
///       + int [ <P sigma, sigma> + 2 <etaBar, b> - <Sigma phiBar, phiBar> ] ds
/// (the centered offset terms vanish under deterministic drivers).
double value_at(const ValidatedProblem& vp, const MatrixPath& P, const MatrixPath& Pi,
                const AuxiliarySolution& aux, const InitialLaw& law0);

/// Cost of the reduced deterministic LQ problem for an open-loop control
/// v: integrates y' = (A+Abar) y + (B+Bbar) v from y(t0) = x0 and
/// evaluates the quadratic cost with the P-dependent weights
///     Upsilon = Q+Qbar + (C+Cbar)'P(C+Cbar),
///     Gamma   = (D+Dbar)'P(C+Cbar) + S+Sbar,
///     Sigma   = R+Rbar + (D+Dbar)'P(D+Dbar),
/// terminal weight G+Gbar.
double dlq_cost(const ValidatedProblem& vp, const MatrixPath& P, const MatrixFn& v,
                const Vector& x0, const TimeGrid& grid);

/// Solution of the closed-loop reduced state equation
///     y' = (A+Abar) y + (B+Bbar)(Theta y + v),  y(t0) = x0,
/// returned together with the realized open-loop control w = Theta y + v
/// as a sampled function (used by the reduction-identity tests).
struct DlqClosedLoop {
    VectorPath y;
    MatrixFn w;
};
DlqClosedLoop dlq_closed_loop(const ValidatedProblem& vp, const MatrixFn& Theta, const MatrixFn& v,
                              const Vector& x0, const TimeGrid& grid);

}  // namespace mflq
