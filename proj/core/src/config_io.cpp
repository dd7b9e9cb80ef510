#include "mflq/config_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "mflq/num_format.hpp"

namespace mflq {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

/// Split a bracket list "[a, b, c]" into entry strings, honouring nested
/// brackets and parentheses.
std::vector<std::string> split_list(const std::string& text, const std::string& where) {
    if (text.empty() || text.front() != '[' || text.back() != ']')
        throw ConfigError(where + ": expected a bracket list, got '" + text + "'");
    std::vector<std::string> out;
    int bracket = 0, paren = 0;
    std::string current;
    for (std::size_t i = 1; i + 1 < text.size(); ++i) {
        const char c = text[i];
        if (c == '[') ++bracket;
        if (c == ']') --bracket;
        if (c == '(') ++paren;
        if (c == ')') --paren;
        if (c == ',' && bracket == 0 && paren == 0) {
            out.push_back(trim(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    if (bracket != 0 || paren != 0) throw ConfigError(where + ": unbalanced brackets");
    const std::string last = trim(current);
    if (!last.empty()) out.push_back(last);
    if (out.empty()) throw ConfigError(where + ": empty list");
    return out;
}

/// Parse a value into a rows x cols grid of expressions.
///   "[[a,b],[c,d]]" -> 2x2;  "[a,b,c]" -> 1x3;  "expr" -> 1x1.
struct ParsedGrid {
    int rows = 0, cols = 0;
    std::vector<Expr> entries;  // row-major
};

ParsedGrid parse_grid(const std::string& value, const std::string& where) {
    ParsedGrid grid;
    const std::string v = trim(value);
    if (v.empty()) throw ConfigError(where + ": empty value");
    if (v.front() != '[') {
        grid.rows = grid.cols = 1;
        grid.entries.push_back(parse_expression(v));
        return grid;
    }
    const std::vector<std::string> items = split_list(v, where);
    const bool nested = !items.empty() && !items.front().empty() && items.front().front() == '[';
    if (!nested) {
        grid.rows = 1;
        grid.cols = static_cast<int>(items.size());
        for (const auto& item : items) grid.entries.push_back(parse_expression(item));
        return grid;
    }
    grid.rows = static_cast<int>(items.size());
    for (const auto& row_text : items) {
        const std::vector<std::string> row = split_list(trim(row_text), where);
        if (grid.cols == 0) grid.cols = static_cast<int>(row.size());
        if (static_cast<int>(row.size()) != grid.cols)
            throw ConfigError(where + ": ragged rows");
        for (const auto& item : row) grid.entries.push_back(parse_expression(item));
    }
    return grid;
}

MatrixFn grid_to_fn(ParsedGrid grid, int rows, int cols, const std::string& where) {
    // A parsed row vector may stand for a column target and vice versa.
    if (grid.rows != rows || grid.cols != cols) {
        if ((rows == 1 || cols == 1) && grid.rows == cols && grid.cols == rows) {
            std::vector<Expr> transposed;
            transposed.reserve(grid.entries.size());
            for (int j = 0; j < grid.cols; ++j)
                for (int i = 0; i < grid.rows; ++i)
                    transposed.push_back(grid.entries[static_cast<std::size_t>(i * grid.cols + j)]);
            grid.entries = std::move(transposed);
            std::swap(grid.rows, grid.cols);
        } else {
            throw ConfigError(where + ": expected shape " + std::to_string(rows) + "x" +
                              std::to_string(cols) + ", got " + std::to_string(grid.rows) + "x" +
                              std::to_string(grid.cols));
        }
    }
    // Collapse constant grids so config round-trips emit plain literals.
    MatrixFn fn = MatrixFn::from_expressions(grid.rows, grid.cols, std::move(grid.entries));
    return fn;
}

Matrix grid_to_matrix(const ParsedGrid& grid, int rows, int cols, const std::string& where) {
    MatrixFn fn = grid_to_fn(ParsedGrid(grid), rows, cols, where);
    auto value = fn.constant_value();
    if (!value) throw ConfigError(where + ": must be constant (no dependence on s)");
    return *value;
}

Vector grid_to_vector(const ParsedGrid& grid, int n, const std::string& where) {
    return grid_to_matrix(grid, n, 1, where).col(0);
}

struct RawConfig {
    std::map<std::string, std::map<std::string, std::string>> sections;
    bool has(const std::string& sec, const std::string& key) const {
        auto it = sections.find(sec);
        return it != sections.end() && it->second.count(key) > 0;
    }
    const std::string& get(const std::string& sec, const std::string& key) const {
        return sections.at(sec).at(key);
    }
};

RawConfig tokenize(const std::string& text) {
    RawConfig raw;
    std::istringstream in(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']' && line.find(',') == std::string::npos &&
            line.find('=') == std::string::npos) {
            section = trim(line.substr(1, line.size() - 2));
            raw.sections[section];
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        if (section.empty())
            throw ConfigError("config line " + std::to_string(line_no) + ": key outside a section");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key or value");
        if (!raw.sections[section].emplace(key, value).second)
            throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key +
                              "'");
    }
    return raw;
}

double parse_scalar(const std::string& value, const std::string& where) {
    const Expr e = parse_expression(value);
    if (e.depends_on_s()) throw ConfigError(where + ": must not depend on s");
    return e.eval(0.0);
}

}  // namespace

ProblemConfig parse_problem_config(const std::string& text) {
    const RawConfig raw = tokenize(text);
    for (const auto& [section, keys] : raw.sections) {
        static const std::map<std::string, std::vector<std::string>> known = {
            {"dimensions", {"n", "m"}},
            {"horizon", {"t0", "T", "steps"}},
            {"dynamics", {"A", "Abar", "B", "Bbar", "C", "Cbar", "D", "Dbar", "b", "sigma"}},
            {"cost",
             {"Q", "Qbar", "S", "Sbar", "R", "Rbar", "G", "Gbar", "q", "qbar", "rho", "rhobar",
              "g", "gbar"}},
            {"initial", {"kind", "mean", "cov"}},
        };
        auto it = known.find(section);
        if (it == known.end()) throw ConfigError("unknown section [" + section + "]");
        for (const auto& [key, value] : keys) {
            (void)value;
            if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
                throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
        }
    }

    if (!raw.has("dimensions", "n") || !raw.has("dimensions", "m"))
        throw ConfigError("missing [dimensions] n, m");
    if (!raw.has("horizon", "t0") || !raw.has("horizon", "T"))
        throw ConfigError("missing [horizon] t0, T");

    const int n = static_cast<int>(parse_scalar(raw.get("dimensions", "n"), "n"));
    const int m = static_cast<int>(parse_scalar(raw.get("dimensions", "m"), "m"));
    if (n < 1 || m < 1) throw ConfigError("dimensions must be positive");
    const double t0 = parse_scalar(raw.get("horizon", "t0"), "t0");
    const double T = parse_scalar(raw.get("horizon", "T"), "T");
    int steps = 2000;
    if (raw.has("horizon", "steps")) {
        steps = static_cast<int>(parse_scalar(raw.get("horizon", "steps"), "steps"));
        if (steps < 1) throw ConfigError("steps must be >= 1");
    }
    if (steps % 2 != 0) ++steps;  // quadrature prefers an even interval count

    ProblemConfig config;
    config.default_steps = steps;
    config.spec = ProblemSpec::zeros(n, m, TimeGrid(t0, T, steps));

    auto coefficient = [&](const char* section, const char* key, MatrixFn& target, int rows,
                           int cols) {
        if (!raw.has(section, key)) return;
        target = grid_to_fn(parse_grid(raw.get(section, key), key), rows, cols, key);
    };
    ProblemSpec& p = config.spec;
    coefficient("dynamics", "A", p.A, n, n);
    coefficient("dynamics", "Abar", p.Abar, n, n);
    coefficient("dynamics", "B", p.B, n, m);
    coefficient("dynamics", "Bbar", p.Bbar, n, m);
    coefficient("dynamics", "C", p.C, n, n);
    coefficient("dynamics", "Cbar", p.Cbar, n, n);
    coefficient("dynamics", "D", p.D, n, m);
    coefficient("dynamics", "Dbar", p.Dbar, n, m);
    coefficient("dynamics", "b", p.b, n, 1);
    coefficient("dynamics", "sigma", p.sigma, n, 1);
    coefficient("cost", "Q", p.Q, n, n);
    coefficient("cost", "Qbar", p.Qbar, n, n);
    coefficient("cost", "S", p.S, m, n);
    coefficient("cost", "Sbar", p.Sbar, m, n);
    coefficient("cost", "R", p.R, m, m);
    coefficient("cost", "Rbar", p.Rbar, m, m);
    coefficient("cost", "q", p.q, n, 1);
    coefficient("cost", "qbar", p.qbar, n, 1);
    coefficient("cost", "rho", p.rho, m, 1);
    coefficient("cost", "rhobar", p.rhobar, m, 1);
    if (raw.has("cost", "G")) p.G = grid_to_matrix(parse_grid(raw.get("cost", "G"), "G"), n, n, "G");
    if (raw.has("cost", "Gbar"))
        p.Gbar = grid_to_matrix(parse_grid(raw.get("cost", "Gbar"), "Gbar"), n, n, "Gbar");
    if (raw.has("cost", "g")) p.g = grid_to_vector(parse_grid(raw.get("cost", "g"), "g"), n, "g");
    if (raw.has("cost", "gbar"))
        p.gbar = grid_to_vector(parse_grid(raw.get("cost", "gbar"), "gbar"), n, "gbar");

    config.initial = InitialLaw::deterministic(Vector::Zero(n));
    if (raw.has("initial", "kind")) {
        const std::string kind = raw.get("initial", "kind");
        if (kind == "gaussian") config.initial.kind = InitialLaw::Kind::Gaussian;
        else if (kind == "deterministic") config.initial.kind = InitialLaw::Kind::Deterministic;
        else throw ConfigError("initial kind must be gaussian or deterministic");
    }
    if (raw.has("initial", "mean"))
        config.initial.mean = grid_to_vector(parse_grid(raw.get("initial", "mean"), "mean"), n, "mean");
    if (raw.has("initial", "cov"))
        config.initial.cov = grid_to_matrix(parse_grid(raw.get("initial", "cov"), "cov"), n, n, "cov");
    validate_initial_law(config.initial, n);
    return config;
}

ProblemConfig load_problem_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_problem_config(buf.str());
}

namespace {

std::string fn_to_text(const MatrixFn& fn, const std::string& name) {
    auto sources = fn.entry_sources();
    if (!sources) throw ConfigError("emit: coefficient " + name + " has no text form (sampled)");
    const int rows = fn.rows(), cols = fn.cols();
    if (rows == 1 && cols == 1) return (*sources)[0];
    std::ostringstream out;
    if (cols == 1) {
        out << "[";
        for (int i = 0; i < rows; ++i) out << (i ? ", " : "") << (*sources)[static_cast<std::size_t>(i)];
        out << "]";
        return out.str();
    }
    out << "[";
    for (int i = 0; i < rows; ++i) {
        out << (i ? ", [" : "[");
        for (int j = 0; j < cols; ++j)
            out << (j ? ", " : "") << (*sources)[static_cast<std::size_t>(i * cols + j)];
        out << "]";
    }
    out << "]";
    return out.str();
}

std::string matrix_to_text(const Matrix& M) { return fn_to_text(MatrixFn::constant(M), "constant"); }

std::string vector_to_text(const Vector& v) {
    std::ostringstream out;
    out << "[";
    for (int i = 0; i < v.size(); ++i) out << (i ? ", " : "") << format_double(v(i));
    out << "]";
    return out.str();
}

bool is_zero_fn(const MatrixFn& fn) {
    auto c = fn.constant_value();
    return c && c->norm() == 0.0;
}

}  // namespace

std::string emit_problem_config(const ProblemConfig& config) {
    const ProblemSpec& p = config.spec;
    std::ostringstream out;
    out << "[dimensions]\n"
        << "n = " << p.n << "\n"
        << "m = " << p.m << "\n\n"
        << "[horizon]\n"
        << "t0 = " << format_double(p.grid.t0) << "\n"
        << "T = " << format_double(p.grid.T) << "\n"
        << "steps = " << config.default_steps << "\n\n";

    out << "[dynamics]\n";
    auto emit_fn = [&](const char* key, const MatrixFn& fn) {
        if (is_zero_fn(fn)) return;  // zero coefficients are the default
        out << key << " = " << fn_to_text(fn, key) << "\n";
    };
    emit_fn("A", p.A);
    emit_fn("Abar", p.Abar);
    emit_fn("B", p.B);
    emit_fn("Bbar", p.Bbar);
    emit_fn("C", p.C);
    emit_fn("Cbar", p.Cbar);
    emit_fn("D", p.D);
    emit_fn("Dbar", p.Dbar);
    emit_fn("b", p.b);
    emit_fn("sigma", p.sigma);

    out << "\n[cost]\n";
    emit_fn("Q", p.Q);
    emit_fn("Qbar", p.Qbar);
    emit_fn("S", p.S);
    emit_fn("Sbar", p.Sbar);
    emit_fn("R", p.R);
    emit_fn("Rbar", p.Rbar);
    if (p.G.norm() != 0.0) out << "G = " << matrix_to_text(p.G) << "\n";
    if (p.Gbar.norm() != 0.0) out << "Gbar = " << matrix_to_text(p.Gbar) << "\n";
    emit_fn("q", p.q);
    emit_fn("qbar", p.qbar);
    emit_fn("rho", p.rho);
    emit_fn("rhobar", p.rhobar);
    if (p.g.norm() != 0.0) out << "g = " << vector_to_text(p.g) << "\n";
    if (p.gbar.norm() != 0.0) out << "gbar = " << vector_to_text(p.gbar) << "\n";

    out << "\n[initial]\n";
    out << "kind = "
        << (config.initial.kind == InitialLaw::Kind::Gaussian ? "gaussian" : "deterministic")
        << "\n";
    out << "mean = " << vector_to_text(config.initial.mean) << "\n";
    if (config.initial.cov.norm() != 0.0) out << "cov = " << matrix_to_text(config.initial.cov) << "\n";
    return out.str();
}

}  // namespace mflq
