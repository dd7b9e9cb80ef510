#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "mflq/time_grid.hpp"

namespace mflq {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline Matrix symmetrized(const Matrix& M) { return 0.5 * (M + M.transpose()); }

inline double asymmetry(const Matrix& M) { return (M - M.transpose()).norm(); }

/// Smallest eigenvalue of a (symmetrized) matrix.  Dimensions here are
/// tiny, so a dense self-adjoint solve is the robust choice.
inline double lambda_min(const Matrix& M) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(M), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

inline bool all_finite(const Matrix& M) { return M.allFinite(); }

/// Node-aligned path of matrix or vector values on a uniform grid,
/// with linear interpolation between nodes.
template <typename Value>
struct Path {
    TimeGrid grid;
    std::vector<Value> values;

    Path() = default;
    Path(TimeGrid g, std::vector<Value> v) : grid(g), values(std::move(v)) {}

    const Value& at(int k) const { return values[static_cast<std::size_t>(k)]; }
    Value& at(int k) { return values[static_cast<std::size_t>(k)]; }
    int n_nodes() const { return static_cast<int>(values.size()); }

    Value eval(double s) const {
        const int k = grid.interval_of(s);
        const double sk = grid.node(k);
        double w = (s - sk) / grid.dt();
        if (w < 0.0) w = 0.0;
        if (w > 1.0) w = 1.0;
        if (w == 0.0) return at(k);
        if (w == 1.0) return at(k + 1);
        return (1.0 - w) * at(k) + w * at(k + 1);
    }

    const Value& front() const { return values.front(); }
    const Value& back() const { return values.back(); }
};

using MatrixPath = Path<Matrix>;
using VectorPath = Path<Vector>;

}  // namespace mflq
