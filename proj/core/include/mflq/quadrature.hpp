#pragma once

#include <cstddef>
#include <vector>

#include "mflq/errors.hpp"
#include "mflq/time_grid.hpp"

namespace mflq {

/// Composite Simpson rule over grid-node samples.  Odd interval counts
/// are closed with a 3/8 rule on the last three intervals so callers do
/// not have to care about parity.
inline double simpson(const TimeGrid& grid, const std::vector<double>& f) {
    const int n = grid.n_steps;
    if (static_cast<int>(f.size()) != n + 1)
        throw ValidationError("simpson: sample count does not match grid");
    const double h = grid.dt();
    if (n == 1) return 0.5 * h * (f[0] + f[1]);
    double total = 0.0;
    int even_end = n;          // integrate [0, even_end] with Simpson pairs
    if (n % 2 != 0) {
        even_end = n - 3;      // leave a 3/8 tail
        total += 3.0 * h / 8.0 *
                 (f[static_cast<std::size_t>(n - 3)] + 3.0 * f[static_cast<std::size_t>(n - 2)] +
                  3.0 * f[static_cast<std::size_t>(n - 1)] + f[static_cast<std::size_t>(n)]);
        if (even_end == 0) return total;
    }
    double sum = f[0] + f[static_cast<std::size_t>(even_end)];
    for (int k = 1; k < even_end; ++k)
        sum += (k % 2 == 1 ? 4.0 : 2.0) * f[static_cast<std::size_t>(k)];
    total += h / 3.0 * sum;
    return total;
}

inline double trapezoid(const TimeGrid& grid, const std::vector<double>& f) {
    const int n = grid.n_steps;
    if (static_cast<int>(f.size()) != n + 1)
        throw ValidationError("trapezoid: sample count does not match grid");
    double sum = 0.5 * (f[0] + f[static_cast<std::size_t>(n)]);
    for (int k = 1; k < n; ++k) sum += f[static_cast<std::size_t>(k)];
    return sum * grid.dt();
}

}  // namespace mflq
