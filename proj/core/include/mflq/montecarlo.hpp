#pragma once

#include <cstdint>
#include <vector>

#include "mflq/moments.hpp"

namespace mflq {

struct SimConfig {
    long n_paths = 1000;
    std::uint64_t seed = 0;
    TimeGrid grid;
    bool antithetic = false;
    int threads = 0;  // 0 = hardware concurrency; results do not depend on it
};

struct CostEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    long n_paths = 0;
};

/// Dense ensemble of simulated states, path-major.
struct PathEnsemble {
    TimeGrid grid;
    long n_paths = 0;
    int dim = 0;
    std::vector<double> data;  // [path][step][component]

    double x(long path, int step, int comp) const {
        return data[(static_cast<std::size_t>(path) * static_cast<std::size_t>(grid.n_nodes()) +
                     static_cast<std::size_t>(step)) *
                        static_cast<std::size_t>(dim) +
                    static_cast<std::size_t>(comp)];
    }
};

/// Euler–Maruyama simulation of the state equation under an affine law.
/// The mean field E[X], E[u] is NOT estimated from the ensemble: it is
/// precomputed by propagate_moments and substituted into the dynamics,
/// so paths are independent and free of particle bias.  Increments use
/// the counter generator keyed by (seed, path, step).
PathEnsemble simulate_paths(const ValidatedProblem& vp, const AffineControlLaw& law,
                            const InitialLaw& law0, const SimConfig& cfg);

/// Monte Carlo estimate of the cost.  The deterministic mean part is
/// evaluated exactly (same quadrature as exact_cost); the centered part
/// is averaged over paths with a trapezoidal running-cost rule, so the
/// standard error reflects only the sampled component.  Accumulation is
/// chunked in fixed order: estimates are bit-identical for any thread
/// count.
CostEstimate estimate_cost(const ValidatedProblem& vp, const AffineControlLaw& law,
                           const InitialLaw& law0, const SimConfig& cfg);

/// Least-squares quadratic fit of lambda -> J(base + lambda * direction).
struct QuadraticFitReport {
    double constant = 0.0;   // J at lambda = 0
    double linear = 0.0;     // must be ~0 at an optimal base law
    double quadratic = 0.0;  // must equal J^0(t, 0; v)
    double quadratic_ref = 0.0;  // J^0(t, 0; v) computed independently
    double residual = 0.0;       // max |J_i - fit(lambda_i)|
    double residual_relative = 0.0;
    std::vector<double> lambdas;
    std::vector<double> costs;
};

/// Cost expansion check along an open-loop direction (direction law must
/// have zero gains; its offset k_mean is the direction v).  Costs are
/// evaluated by exact_cost, for which the family base + lambda*direction
/// is exactly quadratic in lambda; the quadratic coefficient is compared
/// against the homogeneous-problem cost of the realized direction
/// process from zero initial state.
QuadraticFitReport quadratic_expansion_check(const ValidatedProblem& vp,
                                             const AffineControlLaw& base,
                                             const AffineControlLaw& direction,
                                             const std::vector<double>& lambdas,
                                             const InitialLaw& law0, const SimConfig& cfg);

}  // namespace mflq
