#pragma once

#include "magheat/jets.hpp"

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace magheat {

/// Immutable expression tree over x1..xd built from constants, + - * /,
/// integer powers, sin, cos and exp.
///
/// Text form is parenthesized prefix notation, e.g.
/// "(+ (* 0.5 (^ x1 2)) (sin x2))". Variables are 1-based in text (x1, x2, ...)
/// and 0-based in the API. See docs/config.md for the grammar.
class FieldExpr {
public:
    enum class Op { Constant, Variable, Add, Sub, Neg, Mul, Div, Pow, Sin, Cos, Exp };

    FieldExpr();
    static FieldExpr constant(double value);
    static FieldExpr variable(int index);
    /// Throws ConfigError carrying the line and column of the offending token.
    static FieldExpr parse(std::string_view text);

    std::string to_string() const;
    Op op() const;
    /// Highest 0-based variable index referenced, -1 for constants.
    int max_variable() const;
    bool is_zero() const;

    double evaluate(std::span<const double> x) const;
    /// Jet of raw partial derivatives at x up to the given order; the jet
    /// dimension is x.size().
    TaylorJet jet(std::span<const double> x, int order) const;
    /// Symbolic partial derivative with respect to variable index var.
    FieldExpr diff(int var) const;

    friend FieldExpr operator+(const FieldExpr& a, const FieldExpr& b);
    friend FieldExpr operator-(const FieldExpr& a, const FieldExpr& b);
    friend FieldExpr operator*(const FieldExpr& a, const FieldExpr& b);
    friend FieldExpr operator/(const FieldExpr& a, const FieldExpr& b);
    friend FieldExpr operator-(const FieldExpr& a);
    friend FieldExpr pow(const FieldExpr& a, int exponent);
    friend FieldExpr sin(const FieldExpr& a);
    friend FieldExpr cos(const FieldExpr& a);
    friend FieldExpr exp(const FieldExpr& a);

    struct Node;

private:
    explicit FieldExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    static FieldExpr make(Op op, std::vector<FieldExpr> args, double value = 0.0, int index = 0);

    std::shared_ptr<const Node> node_;
};

} // namespace magheat
