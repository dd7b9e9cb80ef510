#pragma once

#include "mflq/problem.hpp"

namespace mflq {

/// Exact first and second moments of the mean-field state under an
/// affine law: m(s) = E[X(s)] and V(s) = Cov[X(s)].
struct MomentPath {
    TimeGrid grid;
    VectorPath mean;
    MatrixPath cov;
};

/// Forward propagation of the coupled moment ODEs
///     m' = (A+Abar) m + (B+Bbar)(Kbar m + k_mean) + b
///     V' = (A+BK) V + V (A+BK)' + (C+DK) V (C+DK)' + d d'
/// with d(s) = sigma + (C+Cbar) m + (D+Dbar)(Kbar m + k_mean).
/// The covariance ODE follows from the centered dynamics
/// dz = (A+BK) z ds + {(C+DK) z + d} dW by bilinearity and E[z] = 0
/// (see docs/math_notes.md).  V is symmetrized each step.
MomentPath propagate_moments(const ValidatedProblem& vp, const AffineControlLaw& law,
                             const InitialLaw& law0, const TimeGrid& grid);

/// Deterministic cost of an affine law, evaluated from the moment paths
/// by trace identities: the centered part contributes
/// tr((Q + K'RK + S'K + K'S) V) running and tr(G V(T)) terminal, the
/// mean part is the reduced quadratic in (m, Kbar m + k_mean) plus the
/// linear driver terms.  Simpson quadrature on the grid.
double exact_cost(const ValidatedProblem& vp, const AffineControlLaw& law, const InitialLaw& law0,
                  const TimeGrid& grid);

/// E int |u|^2 ds = int [ tr(K V K') + |Kbar m + k_mean|^2 ] ds.
double control_norm(const ValidatedProblem& vp, const AffineControlLaw& law,
                    const InitialLaw& law0, const TimeGrid& grid);

/// Deterministic control mean ubar(s) = Kbar(s) m(s) + k_mean(s) at the
/// grid nodes (the realized optimal control when K acts on a zero-mean
/// deviation, e.g. for deterministic initial states).
VectorPath mean_control(const AffineControlLaw& law, const MomentPath& moments);

/// Cost split into its deterministic mean part and centered part so the
/// Monte Carlo estimator can reuse the exact deterministic piece and
/// only sample the centered remainder.
struct CostSplit {
    double mean_part = 0.0;      // deterministic: mean dynamics + drivers
    double centered_part = 0.0;  // E of the centered quadratic
    double total() const { return mean_part + centered_part; }
};
CostSplit exact_cost_split(const ValidatedProblem& vp, const AffineControlLaw& law,
                           const InitialLaw& law0, const TimeGrid& grid);

/// Mean part alone, computed without the covariance ODE.
double mean_part_cost(const ValidatedProblem& vp, const AffineControlLaw& law,
                      const MomentPath& moments);

}  // namespace mflq
