#include "mflq/expr.hpp"

#include <cctype>
#include <cmath>
#include <optional>

#include "mflq/num_format.hpp"

namespace mflq {

enum class Op { Literal, Var, Neg, Add, Sub, Mul, Div, Pow, Exp };

struct Expr::Node {
    Op op = Op::Literal;
    double value = 0.0;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

double eval_node(const Expr::Node& n, double s) {
    switch (n.op) {
        case Op::Literal: return n.value;
        case Op::Var: return s;
        case Op::Neg: return -eval_node(*n.lhs, s);
        case Op::Add: return eval_node(*n.lhs, s) + eval_node(*n.rhs, s);
        case Op::Sub: return eval_node(*n.lhs, s) - eval_node(*n.rhs, s);
        case Op::Mul: return eval_node(*n.lhs, s) * eval_node(*n.rhs, s);
        case Op::Div: return eval_node(*n.lhs, s) / eval_node(*n.rhs, s);
        case Op::Pow: return std::pow(eval_node(*n.lhs, s), eval_node(*n.rhs, s));
        case Op::Exp: return std::exp(eval_node(*n.lhs, s));
    }
    return 0.0;
}

bool node_depends_on_s(const Expr::Node& n) {
    switch (n.op) {
        case Op::Literal: return false;
        case Op::Var: return true;
        default:
            if (n.lhs && node_depends_on_s(*n.lhs)) return true;
            if (n.rhs && node_depends_on_s(*n.rhs)) return true;
            return false;
    }
}

std::optional<double> constant_of(const Expr::Node& n) {
    if (node_depends_on_s(n)) return std::nullopt;
    return eval_node(n, 0.0);
}

class Parser {
public:
    Parser(const std::string& text, std::vector<std::string>& warnings)
        : text_(text), pos_(0), warnings_(warnings) {}

    NodePtr parse() {
        NodePtr e = parse_sum();
        skip_ws();
        if (pos_ != text_.size())
            fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
        return e;
    }

private:
    const std::string& text_;
    std::size_t pos_;
    std::vector<std::string>& warnings_;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("expression error at offset " + std::to_string(pos_) + ": " + msg, pos_);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool consume(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    static NodePtr make(Op op, NodePtr l = nullptr, NodePtr r = nullptr, double v = 0.0) {
        auto n = std::make_shared<Expr::Node>();
        n->op = op;
        n->value = v;
        n->lhs = std::move(l);
        n->rhs = std::move(r);
        return n;
    }

    NodePtr parse_sum() {
        NodePtr left = parse_term();
        for (;;) {
            if (consume('+')) left = make(Op::Add, left, parse_term());
            else if (consume('-')) left = make(Op::Sub, left, parse_term());
            else return left;
        }
    }

    NodePtr parse_term() {
        NodePtr left = parse_unary();
        for (;;) {
            char c = peek();
            if (c == '*') { ++pos_; left = checked_binary(Op::Mul, left, parse_unary()); }
            else if (c == '/') { ++pos_; left = checked_binary(Op::Div, left, parse_unary()); }
            else return left;
        }
    }

    NodePtr parse_unary() {
        if (consume('-')) return make(Op::Neg, parse_unary());
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_atom();
        if (consume('^')) {
            // Exponent is a unary expression so 2^-1 parses; recursion
            // through parse_unary gives right associativity.
            NodePtr exponent = parse_unary();
            return checked_binary(Op::Pow, base, exponent);
        }
        return base;
    }

    NodePtr checked_binary(Op op, NodePtr l, NodePtr r) {
        if (op == Op::Div) {
            auto c = constant_of(*r);
            if (c && *c == 0.0) warnings_.push_back("division by constant zero");
        } else if (op == Op::Pow) {
            auto cb = constant_of(*l);
            auto ce = constant_of(*r);
            if (cb && ce && *cb < 0.0 && *ce != std::floor(*ce))
                warnings_.push_back("negative base raised to a non-integer exponent");
        }
        return make(op, std::move(l), std::move(r));
    }

    NodePtr parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = parse_sum();
            if (!consume(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   std::isalnum(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
            std::string name = text_.substr(start, pos_ - start);
            if (name == "s") return make(Op::Var);
            if (name == "exp") {
                if (!consume('(')) fail("expected '(' after exp");
                NodePtr arg = parse_sum();
                if (!consume(')')) fail("expected ')'");
                return make(Op::Exp, std::move(arg));
            }
            pos_ = start;
            fail("unknown identifier '" + name + "'");
        }
        fail("expected a number, 's', 'exp' or '('");
    }

    NodePtr parse_number() {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t mark = pos_;
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    ++pos_;
            } else {
                pos_ = mark;  // bare 'e' is not an exponent
            }
        }
        if (pos_ == start || (pos_ == start + 1 && text_[start] == '.'))
            fail("malformed number");
        return make(Op::Literal, nullptr, nullptr, std::stod(text_.substr(start, pos_ - start)));
    }
};

}  // namespace

Expr::Expr() {
    auto n = std::make_shared<Node>();
    n->op = Op::Literal;
    n->value = 0.0;
    root_ = std::move(n);
    source_ = "0";
}

double Expr::eval(double s) const { return eval_node(*root_, s); }

bool Expr::depends_on_s() const { return node_depends_on_s(*root_); }

Expr Expr::literal(double value) {
    Expr e;
    auto n = std::make_shared<Node>();
    n->op = Op::Literal;
    n->value = value;
    e.root_ = std::move(n);
    e.source_ = format_double(value);
    return e;
}

Expr parse_expression(const std::string& text) {
    Expr e;
    std::vector<std::string> warnings;
    Parser p(text, warnings);
    e.root_ = p.parse();
    e.source_ = text;
    e.warnings_ = std::move(warnings);
    return e;
}

}  // namespace mflq
