#pragma once

#include "mflq/moments.hpp"

namespace mflq {

/// Settings for the brute-force search over piecewise-constant laws.
/// Coordinates are the entries of (K, Kbar, k_mean) on each interval of
/// a coarse partition of the horizon; descent tries +/- step moves per
/// coordinate and halves the step after each full sweep (nested grid
/// refinement).
struct BruteForceOptions {
    int intervals = 4;
    double initial_step = 0.5;
    double min_step = 1e-6;
    int max_sweeps = 200;
    bool optimize_K = true;
    bool optimize_Kbar = true;
    bool optimize_k_mean = true;
};

struct BruteForceResult {
    AffineControlLaw law;
    double cost = 0.0;
    int sweeps = 0;
    long evaluations = 0;
};

/// Coordinate descent on exact_cost over piecewise-constant affine laws.
/// Independent of the Riccati machinery: only the moment propagation is
/// shared, which the Riccati route never touches.
BruteForceResult brute_force_minimize(const ValidatedProblem& vp, const InitialLaw& law0,
                                      const TimeGrid& grid, BruteForceOptions opts = {});

}  // namespace mflq
