#include "mflq/matrix_fn.hpp"

#include <algorithm>
#include <cmath>

#include "mflq/num_format.hpp"

namespace mflq {

MatrixFn MatrixFn::constant(Matrix value) {
    MatrixFn f;
    f.rep_ = std::move(value);
    return f;
}

MatrixFn MatrixFn::from_expressions(int rows, int cols, std::vector<Expr> entries) {
    if (static_cast<int>(entries.size()) != rows * cols)
        throw ValidationError("MatrixFn: entry count does not match shape");
    MatrixFn f;
    f.rep_ = ExprEntries{rows, cols, std::move(entries)};
    return f;
}

MatrixFn MatrixFn::sampled(std::vector<double> times, std::vector<Matrix> values, Interp mode) {
    if (times.size() != values.size() || times.empty())
        throw ValidationError("MatrixFn: sample times and values must align and be non-empty");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw ValidationError("MatrixFn: sample times must be strictly increasing");
    for (const Matrix& v : values)
        if (v.rows() != values.front().rows() || v.cols() != values.front().cols())
            throw ValidationError("MatrixFn: inconsistent sample shapes");
    MatrixFn f;
    f.rep_ = Samples{std::move(times), std::move(values), mode};
    return f;
}

MatrixFn MatrixFn::shifted(MatrixFn base, Matrix offset) {
    if (base.rows() != offset.rows() || base.cols() != offset.cols())
        throw ValidationError("MatrixFn: shift offset shape mismatch");
    MatrixFn f;
    f.rep_ = Shifted{std::make_shared<const MatrixFn>(std::move(base)), std::move(offset)};
    return f;
}

int MatrixFn::rows() const {
    if (auto* m = std::get_if<Matrix>(&rep_)) return static_cast<int>(m->rows());
    if (auto* e = std::get_if<ExprEntries>(&rep_)) return e->rows;
    if (auto* s = std::get_if<Samples>(&rep_)) return static_cast<int>(s->values.front().rows());
    return std::get<Shifted>(rep_).base->rows();
}

int MatrixFn::cols() const {
    if (auto* m = std::get_if<Matrix>(&rep_)) return static_cast<int>(m->cols());
    if (auto* e = std::get_if<ExprEntries>(&rep_)) return e->cols;
    if (auto* s = std::get_if<Samples>(&rep_)) return static_cast<int>(s->values.front().cols());
    return std::get<Shifted>(rep_).base->cols();
}

Matrix MatrixFn::eval(double s) const {
    if (auto* m = std::get_if<Matrix>(&rep_)) return *m;

    if (auto* e = std::get_if<ExprEntries>(&rep_)) {
        Matrix out(e->rows, e->cols);
        for (int i = 0; i < e->rows; ++i)
            for (int j = 0; j < e->cols; ++j) {
                double v = e->entries[static_cast<std::size_t>(i * e->cols + j)].eval(s);
                if (!std::isfinite(v))
                    throw EvalError("MatrixFn: entry (" + std::to_string(i) + "," +
                                    std::to_string(j) + ") is not finite at s=" + format_double(s));
                out(i, j) = v;
            }
        return out;
    }

    if (auto* sm = std::get_if<Samples>(&rep_)) {
        const auto& t = sm->times;
        const double slack = 1e-9 * std::max(1.0, std::abs(t.back() - t.front()));
        if (s < t.front() - slack || s > t.back() + slack)
            throw EvalError("MatrixFn: s=" + format_double(s) + " outside sampled support [" +
                            format_double(t.front()) + ", " + format_double(t.back()) + "]");
        // Exact node hit returns the stored sample bit-for-bit.
        auto it = std::lower_bound(t.begin(), t.end(), s);
        if (it != t.end() && *it == s)
            return sm->values[static_cast<std::size_t>(it - t.begin())];
        if (it == t.begin()) return sm->values.front();
        if (it == t.end()) return sm->values.back();
        const std::size_t hi = static_cast<std::size_t>(it - t.begin());
        const std::size_t lo = hi - 1;
        if (sm->mode == Interp::PiecewiseConstantLeft) return sm->values[lo];
        const double w = (s - t[lo]) / (t[hi] - t[lo]);
        return (1.0 - w) * sm->values[lo] + w * sm->values[hi];
    }

    const auto& sh = std::get<Shifted>(rep_);
    return sh.base->eval(s) + sh.offset;
}

bool MatrixFn::is_constant() const { return constant_value().has_value(); }

std::optional<Matrix> MatrixFn::constant_value() const {
    if (auto* m = std::get_if<Matrix>(&rep_)) return *m;
    if (auto* e = std::get_if<ExprEntries>(&rep_)) {
        for (const Expr& x : e->entries)
            if (x.depends_on_s()) return std::nullopt;
        Matrix out(e->rows, e->cols);
        for (int i = 0; i < e->rows; ++i)
            for (int j = 0; j < e->cols; ++j)
                out(i, j) = e->entries[static_cast<std::size_t>(i * e->cols + j)].eval(0.0);
        return out;
    }
    if (auto* sh = std::get_if<Shifted>(&rep_)) {
        auto base = sh->base->constant_value();
        if (!base) return std::nullopt;
        return *base + sh->offset;
    }
    return std::nullopt;
}

std::optional<std::vector<std::string>> MatrixFn::entry_sources() const {
    if (auto* m = std::get_if<Matrix>(&rep_)) {
        std::vector<std::string> out;
        out.reserve(static_cast<std::size_t>(m->size()));
        for (int i = 0; i < m->rows(); ++i)
            for (int j = 0; j < m->cols(); ++j) out.push_back(format_double((*m)(i, j)));
        return out;
    }
    if (auto* e = std::get_if<ExprEntries>(&rep_)) {
        std::vector<std::string> out;
        out.reserve(e->entries.size());
        for (const Expr& x : e->entries) out.push_back(x.source());
        return out;
    }
    return std::nullopt;
}

std::vector<std::string> MatrixFn::warnings() const {
    std::vector<std::string> out;
    if (auto* e = std::get_if<ExprEntries>(&rep_))
        for (const Expr& x : e->entries)
            out.insert(out.end(), x.warnings().begin(), x.warnings().end());
    return out;
}

}  // namespace mflq
