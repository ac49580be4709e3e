#include "magheat/errors.hpp"
#include "magheat/oracle.hpp"

#include <cmath>
#include <numbers>

namespace magheat {

Complex mehler_kernel(const MehlerParams& p, double t, const Point& x, const Point& y) {
    if (!(t > 0.0)) throw DomainError("Mehler kernel needs t > 0");
    if (x.size() != 2 || y.size() != 2) throw UsageError("Mehler kernel is two-dimensional");
    const double z = p.B * t;
    // z/sinh z and z coth z, series near zero
    double ratio;
    double zcoth;
    if (std::abs(z) < 1e-6) {
        const double z2 = z * z;
        ratio = 1.0 - z2 / 6.0 + 7.0 * z2 * z2 / 360.0;
        zcoth = 1.0 + z2 / 3.0 - z2 * z2 / 45.0;
    } else {
        ratio = z / std::sinh(z);
        zcoth = z / std::tanh(z);
    }
    const double r2 = (x - y).squaredNorm();
    const double cross = x[0] * y[1] - x[1] * y[0];
    const Complex expo(-zcoth * r2 / (4.0 * t), -0.5 * p.B * cross);
    return ratio / (4.0 * std::numbers::pi * t) * std::exp(expo);
}

double harmonic_oscillator_kernel_1d(double omega, double t, double x, double y) {
    if (!(t > 0.0)) throw DomainError("oscillator kernel needs t > 0");
    if (omega == 0.0) {
        return std::exp(-(x - y) * (x - y) / (4.0 * t)) / std::sqrt(4.0 * std::numbers::pi * t);
    }
    const double s = std::sinh(2.0 * omega * t);
    const double c = std::cosh(2.0 * omega * t);
    return std::sqrt(omega / (2.0 * std::numbers::pi * s)) *
           std::exp(-omega * ((x * x + y * y) * c - 2.0 * x * y) / (2.0 * s));
}

double harmonic_oscillator_kernel(double omega, double t, const Point& x, const Point& y) {
    double v = 1.0;
    for (int i = 0; i < x.size(); ++i) v *= harmonic_oscillator_kernel_1d(omega, t, x[i], y[i]);
    return v;
}

double free_kernel(int d, double t, const Point& x, const Point& y) {
    if (!(t > 0.0)) throw DomainError("free kernel needs t > 0");
    return std::pow(4.0 * std::numbers::pi * t, -0.5 * d) * std::exp(-(x - y).squaredNorm() / (4.0 * t));
}

} // namespace magheat
