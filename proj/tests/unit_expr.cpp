#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "doctest.h"
#include "mflq/expr.hpp"
#include "mflq/matrix_fn.hpp"

using namespace mflq;

TEST_CASE("expression examples from the coefficient grammar") {
    CHECK(parse_expression("2*(s+1)^2").eval(0.0) == 2.0);
    CHECK(parse_expression("-s^2").eval(2.0) == -4.0);  // unary minus binds looser than ^
    CHECK(parse_expression("1-(s+1)^3").eval(1.0) == -7.0);
    CHECK(parse_expression("(s+1)^3 - 4*(s+1)^2").eval(0.0) == -3.0);
    CHECK(parse_expression("2^-1").eval(0.0) == 0.5);
    CHECK(parse_expression("2^3^2").eval(0.0) == 512.0);  // right associative
    CHECK(parse_expression("-2^2").eval(0.0) == -4.0);
    CHECK(parse_expression("2*-3").eval(0.0) == -6.0);
    CHECK(parse_expression("--2").eval(0.0) == 2.0);
    CHECK(parse_expression("6/3/2").eval(0.0) == 1.0);
    CHECK(parse_expression(".5+1").eval(0.0) == 1.5);
    CHECK(parse_expression("1e-10").eval(0.0) == 1e-10);
    CHECK(parse_expression("2.5e2").eval(0.0) == 250.0);
    CHECK(parse_expression("exp(0)").eval(0.0) == 1.0);
    CHECK(parse_expression("exp(1)").eval(3.0) == doctest::Approx(std::exp(1.0)));
    CHECK(parse_expression("exp(-2*s)").eval(0.5) == doctest::Approx(std::exp(-1.0)));
    CHECK(parse_expression("2^0.5").eval(0.0) == doctest::Approx(std::sqrt(2.0)));
    CHECK(parse_expression(" ( s + 1 ) * 2 ").eval(2.0) == 6.0);
}

TEST_CASE("parse errors carry byte offsets") {
    CHECK_THROWS_AS(parse_expression("2+*3"), ParseError);
    try {
        parse_expression("2+*3");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 2);
    }
    CHECK_THROWS_AS(parse_expression("foo(2)"), ParseError);
    try {
        parse_expression("x+1");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 0);
        CHECK(std::string(e.what()).find("unknown identifier") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_expression("(2"), ParseError);
    CHECK_THROWS_AS(parse_expression("2^"), ParseError);
    CHECK_THROWS_AS(parse_expression(""), ParseError);
    CHECK_THROWS_AS(parse_expression("1 2"), ParseError);
}

TEST_CASE("constant hazards are parse-time warnings and run-time errors") {
    const Expr div = parse_expression("1/0");
    REQUIRE(div.warnings().size() == 1);
    CHECK(div.warnings()[0].find("division") != std::string::npos);
    CHECK(std::isinf(div.eval(0.0)));

    const Expr pow = parse_expression("(-2)^0.5");
    REQUIRE(pow.warnings().size() == 1);

    MatrixFn f = MatrixFn::from_expressions(1, 1, {parse_expression("1/(s-1)")});
    CHECK_THROWS_AS(f.eval(1.0), EvalError);
    CHECK(f.eval(0.0)(0, 0) == -1.0);
}

TEST_CASE("source text round-trips through the parser") {
    const std::string text = "2*(s+1)^2 - exp(-s)/3";
    const Expr e = parse_expression(text);
    CHECK(e.source() == text);
    const Expr again = parse_expression(e.source());
    for (double s : {0.0, 0.25, 0.7, 1.0}) CHECK(e.eval(s) == again.eval(s));
}

// Golden precedence/associativity table: templates instantiated over all
// digit triples, with expected values computed by the compiler (which
// shares this grammar's precedence for + - * / and unary minus; the
// explicit std::pow nesting encodes the ^ rules).
TEST_CASE("golden precedence table") {
    struct Family {
        const char* pattern;
        double (*expected)(double a, double b, double c);
    };
    const std::vector<Family> families = {
        {"%d+%d*%d", [](double a, double b, double c) { return a + b * c; }},
        {"%d*%d+%d", [](double a, double b, double c) { return a * b + c; }},
        {"%d-%d-%d", [](double a, double b, double c) { return a - b - c; }},
        {"%d/%d/%d", [](double a, double b, double c) { return a / b / c; }},
        {"%d^%d^%d", [](double a, double b, double c) { return std::pow(a, std::pow(b, c)); }},
        {"-%d^%d+%d", [](double a, double b, double c) { return -std::pow(a, b) + c; }},
        {"%d*(%d+%d)", [](double a, double b, double c) { return a * (b + c); }},
        {"%d-%d/%d", [](double a, double b, double c) { return a - b / c; }},
    };
    int cases = 0;
    for (const Family& family : families)
        for (int a = 1; a <= 3; ++a)
            for (int b = 1; b <= 3; ++b)
                for (int c = 1; c <= 3; ++c) {
                    char text[32];
                    std::snprintf(text, sizeof text, family.pattern, a, b, c);
                    CAPTURE(text);
                    CHECK(parse_expression(text).eval(0.0) ==
                          family.expected(static_cast<double>(a), static_cast<double>(b),
                                          static_cast<double>(c)));
                    ++cases;
                }
    CHECK(cases == 216);
}
