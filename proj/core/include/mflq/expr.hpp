#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mflq/errors.hpp"

namespace mflq {

/// Parsed scalar expression in the time variable `s`.
///
/// Grammar (loosest to tightest): `+ -`, then `* /`, then unary `-`,
/// then `^` (right-associative, so `-s^2 == -(s^2)` and `2^3^2 == 2^(3^2)`).
/// Atoms are decimal literals, `s`, `exp(...)` and parenthesized
/// subexpressions.
class Expr {
public:
    Expr();  // literal 0

    double eval(double s) const;

    /// Original text as parsed (or a canonical literal for constants
    /// built programmatically).  Used to round-trip config files.
    const std::string& source() const { return source_; }

    /// Warnings detected while parsing constant subexpressions
    /// (division by zero, negative base to a fractional power).
    const std::vector<std::string>& warnings() const { return warnings_; }

    bool depends_on_s() const;

    static Expr literal(double value);

    friend Expr parse_expression(const std::string& text);

    struct Node;  // definition private to the implementation

private:
    std::shared_ptr<const Node> root_;
    std::string source_;
    std::vector<std::string> warnings_;
};

/// Parse `text` into an Expr.  Throws ParseError with the byte offset of
/// the first offending character.
Expr parse_expression(const std::string& text);

}  // namespace mflq
