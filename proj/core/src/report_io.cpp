#include "mflq/report_io.hpp"

#include <fstream>

#include "mflq/num_format.hpp"

namespace mflq {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open output file '" + path + "'");
    return out;
}

void write_matrix_cells(std::ofstream& out, const Matrix& M) {
    for (int i = 0; i < M.rows(); ++i)
        for (int j = 0; j < M.cols(); ++j) out << "," << format_double(M(i, j));
}

void write_vector_cells(std::ofstream& out, const Vector& v) {
    for (int i = 0; i < v.size(); ++i) out << "," << format_double(v(i));
}

void matrix_header(std::ofstream& out, const std::string& name, int rows, int cols) {
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) out << "," << name << "_" << i << j;
}

void vector_header(std::ofstream& out, const std::string& name, int n) {
    for (int i = 0; i < n; ++i) out << "," << name << "_" << i;
}

}  // namespace

void write_riccati_csv(const std::string& path, const RiccatiSolution& sol) {
    std::ofstream out = open_out(path);
    const TimeGrid& grid = sol.P.grid;
    const int n = static_cast<int>(sol.P.front().rows());
    out << "s";
    matrix_header(out, "P", n, n);
    matrix_header(out, "Pi", n, n);
    out << ",lambda_min_Sigma0,lambda_min_Sigma\n";
    for (int k = 0; k <= grid.n_steps; ++k) {
        out << format_double(grid.node(k));
        write_matrix_cells(out, sol.P.at(k));
        write_matrix_cells(out, sol.Pi.at(k));
        out << "," << format_double(sol.sigma0_min[static_cast<std::size_t>(k)]) << ","
            << format_double(sol.sigma_min[static_cast<std::size_t>(k)]) << "\n";
    }
}

void write_aux_csv(const std::string& path, const AuxiliarySolution& aux, const TimeGrid& grid) {
    std::ofstream out = open_out(path);
    const int n = static_cast<int>(aux.eta.front().size());
    const int m = aux.phiBar.rows();
    out << "s";
    vector_header(out, "eta", n);
    vector_header(out, "etaBar", n);
    vector_header(out, "phiBar", m);
    out << "\n";
    for (int k = 0; k <= grid.n_steps; ++k) {
        const double s = grid.node(k);
        out << format_double(s);
        write_vector_cells(out, aux.eta.at(k));
        write_vector_cells(out, aux.etaBar.at(k));
        write_matrix_cells(out, aux.phiBar.eval(s));
        out << "\n";
    }
}

void write_moments_csv(const std::string& path, const ValidatedProblem& vp,
                       const AffineControlLaw& law, const MomentPath& moments) {
    (void)vp;
    std::ofstream out = open_out(path);
    const TimeGrid& grid = moments.grid;
    const int n = static_cast<int>(moments.mean.front().size());
    out << "s";
    vector_header(out, "mean", n);
    matrix_header(out, "cov", n, n);
    out << ",control_sq_density\n";
    for (int k = 0; k <= grid.n_steps; ++k) {
        const double s = grid.node(k);
        const Matrix K = law.K.eval(s);
        const Vector ubar = law.Kbar.eval(s) * moments.mean.at(k) + law.k_mean.eval(s).col(0);
        const double density =
            (K * moments.cov.at(k) * K.transpose()).trace() + ubar.squaredNorm();
        out << format_double(s);
        write_vector_cells(out, moments.mean.at(k));
        write_matrix_cells(out, moments.cov.at(k));
        out << "," << format_double(density) << "\n";
    }
}

void write_epsilon_csv(const std::string& path, const EpsilonReport& report) {
    std::ofstream out = open_out(path);
    out << "epsilon,riccati_ok,V,control_norm,delta0,deltaSigma\n";
    for (const EpsilonEntry& e : report.entries) {
        out << format_double(e.epsilon) << "," << (e.riccati_ok ? 1 : 0) << ","
            << format_double(e.value) << "," << format_double(e.norm) << ","
            << format_double(e.delta0) << "," << format_double(e.deltaSigma) << "\n";
    }
}

void write_paths_csv(const std::string& path, const PathEnsemble& ensemble) {
    std::ofstream out = open_out(path);
    out << "s,path";
    vector_header(out, "X", ensemble.dim);
    out << "\n";
    for (long p = 0; p < ensemble.n_paths; ++p)
        for (int k = 0; k <= ensemble.grid.n_steps; ++k) {
            out << format_double(ensemble.grid.node(k)) << "," << p;
            for (int c = 0; c < ensemble.dim; ++c)
                out << "," << format_double(ensemble.x(p, k, c));
            out << "\n";
        }
}

}  // namespace mflq
