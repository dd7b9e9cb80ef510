#pragma once

#include <cstddef>
#include <vector>

#include "mflq/errors.hpp"

namespace mflq {

/// Uniform grid of n_steps+1 nodes on [t0, T].  The first and last node
/// are the stored endpoints exactly, not recomputed from the step size.
struct TimeGrid {
    double t0 = 0.0;
    double T = 1.0;
    int n_steps = 1;

    TimeGrid() = default;
    TimeGrid(double t0_, double T_, int n_steps_) : t0(t0_), T(T_), n_steps(n_steps_) {
        if (!(t0 < T)) throw ValidationError("TimeGrid: t0 must be < T");
        if (n_steps < 1) throw ValidationError("TimeGrid: n_steps must be >= 1");
    }

    double dt() const { return (T - t0) / n_steps; }
    int n_nodes() const { return n_steps + 1; }

    double node(int k) const {
        if (k <= 0) return t0;
        if (k >= n_steps) return T;
        return t0 + k * dt();
    }

    std::vector<double> nodes() const {
        std::vector<double> out(static_cast<std::size_t>(n_nodes()));
        for (int k = 0; k <= n_steps; ++k) out[static_cast<std::size_t>(k)] = node(k);
        return out;
    }

    /// Same horizon, different resolution.
    TimeGrid with_steps(int steps) const { return TimeGrid(t0, T, steps); }

    /// Index of the interval [node(k), node(k+1)] containing s, clamped.
    int interval_of(double s) const {
        int k = static_cast<int>((s - t0) / dt());
        if (k < 0) k = 0;
        if (k > n_steps - 1) k = n_steps - 1;
        return k;
    }

    bool contains(double s, double slack = 1e-9) const {
        const double pad = slack * (T - t0);
        return s >= t0 - pad && s <= T + pad;
    }

    bool operator==(const TimeGrid& o) const {
        return t0 == o.t0 && T == o.T && n_steps == o.n_steps;
    }
};

}  // namespace mflq
