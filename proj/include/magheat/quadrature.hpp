#pragma once

#include "magheat/field_config.hpp"
#include "magheat/jets.hpp"

#include <functional>
#include <vector>

namespace magheat {

/// Gauss-Legendre rule mapped to [0,1].
class QuadratureRule {
public:
    /// n >= 1 nodes, exact for polynomials of degree 2n-1.
    explicit QuadratureRule(int n);

    int size() const { return static_cast<int>(nodes_.size()); }
    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }

private:
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

/// Segment from y to x, point(s) = y + s (x - y).
class LineSegment {
public:
    LineSegment(Point x, Point y) : x_(std::move(x)), y_(std::move(y)), v_(x_ - y_) {}

    Point point(double s) const;
    const Point& velocity() const { return v_; }
    const Point& start() const { return y_; }
    const Point& end() const { return x_; }

private:
    Point x_;
    Point y_;
    Point v_;
};

/// Integral over [0,1] of f. Throws EvaluationError naming s on a non-finite
/// integrand value.
Complex line_integral(const std::function<Complex(double)>& f, const QuadratureRule& rule);

/// Integral over [0,1]^2 of f(t, s) by the tensor rule.
Complex double_integral(const std::function<Complex(double, double)>& f, const QuadratureRule& rule);

} // namespace magheat
