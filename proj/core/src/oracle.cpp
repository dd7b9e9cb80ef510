#include "mflq/oracle.hpp"

#include <algorithm>

namespace mflq {

namespace {

struct PiecewiseParams {
    int intervals = 0;
    int n = 0, m = 0;
    std::vector<Matrix> K, Kbar;  // one m x n block per interval
    std::vector<Vector> k_mean;   // one m-vector per interval

    AffineControlLaw to_law(const TimeGrid& grid) const {
        // Left interval edges plus T so the sampled support covers the
        // whole horizon; the last block repeats at the final node.
        std::vector<double> times(static_cast<std::size_t>(intervals) + 1);
        std::vector<Matrix> kv(times.size()), kbv(times.size()), kmv(times.size());
        const double width = (grid.T - grid.t0) / intervals;
        for (int i = 0; i <= intervals; ++i) {
            const std::size_t idx = static_cast<std::size_t>(i);
            const std::size_t block = static_cast<std::size_t>(std::min(i, intervals - 1));
            times[idx] = i == intervals ? grid.T : grid.t0 + i * width;
            kv[idx] = K[block];
            kbv[idx] = Kbar[block];
            kmv[idx] = k_mean[block];
        }
        MatrixFn k_fn = MatrixFn::sampled(times, std::move(kv), Interp::PiecewiseConstantLeft);
        MatrixFn kbar_fn = MatrixFn::sampled(times, std::move(kbv), Interp::PiecewiseConstantLeft);
        MatrixFn km_fn =
            MatrixFn::sampled(std::move(times), std::move(kmv), Interp::PiecewiseConstantLeft);
        return AffineControlLaw::feedback(std::move(k_fn), std::move(kbar_fn), std::move(km_fn));
    }
};

}  // namespace

BruteForceResult brute_force_minimize(const ValidatedProblem& vp, const InitialLaw& law0,
                                      const TimeGrid& grid, BruteForceOptions opts) {
    const int n = vp.n(), m = vp.m();
    PiecewiseParams params;
    params.intervals = opts.intervals;
    params.n = n;
    params.m = m;
    params.K.assign(static_cast<std::size_t>(opts.intervals), Matrix::Zero(m, n));
    params.Kbar.assign(static_cast<std::size_t>(opts.intervals), Matrix::Zero(m, n));
    params.k_mean.assign(static_cast<std::size_t>(opts.intervals), Vector::Zero(m));

    long evals = 0;
    auto cost_of = [&](const PiecewiseParams& p) {
        ++evals;
        return exact_cost(vp, p.to_law(grid), law0, grid);
    };

    // Flat coordinate view over the piecewise blocks.
    std::vector<double*> coords;
    for (int i = 0; i < opts.intervals; ++i) {
        if (opts.optimize_K)
            for (int r = 0; r < m; ++r)
                for (int c = 0; c < n; ++c) coords.push_back(&params.K[static_cast<std::size_t>(i)](r, c));
        if (opts.optimize_Kbar)
            for (int r = 0; r < m; ++r)
                for (int c = 0; c < n; ++c)
                    coords.push_back(&params.Kbar[static_cast<std::size_t>(i)](r, c));
        if (opts.optimize_k_mean)
            for (int r = 0; r < m; ++r) coords.push_back(&params.k_mean[static_cast<std::size_t>(i)](r));
    }

    double best = cost_of(params);
    double step = opts.initial_step;
    int sweeps = 0;
    while (step >= opts.min_step && sweeps < opts.max_sweeps) {
        ++sweeps;
        bool improved = false;
        for (double* coord : coords) {
            const double original = *coord;
            // Walk in the better direction while it keeps paying.
            for (const double dir : {+1.0, -1.0}) {
                *coord = original + dir * step;
                double trial = cost_of(params);
                if (trial < best - 1e-15) {
                    do {
                        best = trial;
                        *coord += dir * step;
                        trial = cost_of(params);
                    } while (trial < best - 1e-15);
                    *coord -= dir * step;  // last move was not an improvement
                    improved = true;
                    break;
                }
                *coord = original;
            }
        }
        if (!improved) step *= 0.5;
    }

    BruteForceResult out;
    out.law = params.to_law(grid);
    out.cost = best;
    out.sweeps = sweeps;
    out.evaluations = evals;
    return out;
}

}  // namespace mflq
