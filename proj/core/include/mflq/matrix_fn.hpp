#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mflq/expr.hpp"
#include "mflq/linalg.hpp"

namespace mflq {

enum class Interp { PiecewiseConstantLeft, Linear };

/// Time-dependent matrix-valued coefficient.  Entries are either parsed
/// scalar expressions in `s`, grid samples with an interpolation mode,
/// or a constant matrix.  A shifted view (base + constant offset) backs
/// the epsilon-regularization of R without touching the base data.
class MatrixFn {
public:
    MatrixFn() : rep_(Matrix::Zero(1, 1)) {}

    static MatrixFn constant(Matrix value);
    static MatrixFn zero(int rows, int cols) { return constant(Matrix::Zero(rows, cols)); }
    static MatrixFn identity(int n) { return constant(Matrix::Identity(n, n)); }

    /// Row-major list of per-entry expressions.
    static MatrixFn from_expressions(int rows, int cols, std::vector<Expr> entries);

    static MatrixFn sampled(std::vector<double> times, std::vector<Matrix> values, Interp mode);

    static MatrixFn shifted(MatrixFn base, Matrix offset);

    int rows() const;
    int cols() const;

    /// Entrywise evaluation at time s.  Throws EvalError when the result
    /// is not finite or s falls outside a sampled function's support.
    Matrix eval(double s) const;

    bool is_constant() const;
    /// Constant value if representable without evaluating (constant rep
    /// or expressions that do not mention s).
    std::optional<Matrix> constant_value() const;

    bool is_sampled() const { return std::holds_alternative<Samples>(rep_); }

    /// Source strings for config emission, row-major.  Only available for
    /// constant and expression representations.
    std::optional<std::vector<std::string>> entry_sources() const;

    /// Accumulated parser warnings from all entries.
    std::vector<std::string> warnings() const;

private:
    struct ExprEntries {
        int rows = 0, cols = 0;
        std::vector<Expr> entries;  // row-major
    };
    struct Samples {
        std::vector<double> times;
        std::vector<Matrix> values;
        Interp mode = Interp::Linear;
    };
    struct Shifted {
        std::shared_ptr<const MatrixFn> base;
        Matrix offset;
    };
    std::variant<Matrix, ExprEntries, Samples, Shifted> rep_;
};

}  // namespace mflq
