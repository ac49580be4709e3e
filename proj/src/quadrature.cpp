#include "magheat/quadrature.hpp"

#include "magheat/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace magheat {

QuadratureRule::QuadratureRule(int n) {
    if (n < 1 || n > 512) throw ConfigError("quadrature node count must be in [1, 512]");
    nodes_.resize(n);
    weights_.resize(n);
    // Newton iteration on P_n from the Chebyshev-like initial guess; roots are
    // symmetric so only half are computed.
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        // recompute the derivative at the converged root
        double p0 = 1.0;
        double p1 = 0.0;
        for (int j = 1; j <= n; ++j) {
            const double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
        }
        dp = n * (z * p0 - p1) / (z * z - 1.0);
        const double w = 1.0 / ((1.0 - z * z) * dp * dp); // 2/((1-z^2)P'^2) on [-1,1], halved
        nodes_[i] = 0.5 * (1.0 - z);
        nodes_[n - 1 - i] = 0.5 * (1.0 + z);
        weights_[i] = w;
        weights_[n - 1 - i] = w;
    }
}

Point LineSegment::point(double s) const {
    if (s == 1.0) return x_;
    if (s == 0.0) return y_;
    return y_ + s * v_;
}

namespace {

[[noreturn]] void non_finite(double s) {
    std::ostringstream os;
    os.precision(17);
    os << "non-finite integrand at s = " << s;
    throw EvaluationError(os.str());
}

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

} // namespace

Complex line_integral(const std::function<Complex(double)>& f, const QuadratureRule& rule) {
    Complex sum{};
    for (int i = 0; i < rule.size(); ++i) {
        const double s = rule.nodes()[i];
        const Complex v = f(s);
        if (!finite(v)) non_finite(s);
        sum += rule.weights()[i] * v;
    }
    return sum;
}

Complex double_integral(const std::function<Complex(double, double)>& f,
                        const QuadratureRule& rule) {
    Complex sum{};
    for (int i = 0; i < rule.size(); ++i) {
        const double t = rule.nodes()[i];
        Complex inner{};
        for (int j = 0; j < rule.size(); ++j) {
            const double s = rule.nodes()[j];
            const Complex v = f(t, s);
            if (!finite(v)) non_finite(s);
            inner += rule.weights()[j] * v;
        }
        sum += rule.weights()[i] * inner;
    }
    return sum;
}

} // namespace magheat
