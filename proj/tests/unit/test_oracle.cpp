#include "magheat/errors.hpp"
#include "magheat/oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace magheat;

namespace {

Point pt(double a, double b) {
    Point p(2);
    p << a, b;
    return p;
}

// H K in x by finite differences, symmetric gauge A = (B/2)(-x2, x1)
Complex apply_h_fd(double B, double t, const Point& x, const Point& y) {
    const double h = 1e-3;
    auto K = [&](double a, double b) { return mehler_kernel({B}, t, pt(a, b), y); };
    const Complex f = K(x[0], x[1]);
    const Complex fx = (K(x[0] + h, x[1]) - K(x[0] - h, x[1])) / (2 * h);
    const Complex fy = (K(x[0], x[1] + h) - K(x[0], x[1] - h)) / (2 * h);
    const Complex lap = (K(x[0] + h, x[1]) + K(x[0] - h, x[1]) + K(x[0], x[1] + h) +
                         K(x[0], x[1] - h) - 4.0 * f) / (h * h);
    const double A1 = -B / 2 * x[1], A2 = B / 2 * x[0];
    const Complex I(0, 1);
    return -lap + 2.0 * I * (A1 * fx + A2 * fy) + (A1 * A1 + A2 * A2) * f;
}

} // namespace

TEST_CASE("Mehler kernel examples") {
    const Point x = pt(0.4, -0.2), y = pt(-0.3, 0.5);
    CHECK(std::abs(mehler_kernel({0.0}, 0.3, x, y) - free_kernel(2, 0.3, x, y)) < 1e-15);
    CHECK(std::abs(mehler_kernel({1e-9}, 0.3, x, y) - free_kernel(2, 0.3, x, y)) < 1e-9);
    CHECK(std::abs(mehler_kernel({1.0}, 1.0, x, x) - 1.0 / (4 * std::numbers::pi * std::sinh(1.0))) < 1e-15);
    CHECK(std::abs(mehler_kernel({1.0}, 1.0, x, x).real() - 6.770e-2) < 1e-4);
    for (double t : {1e-2, 1e-3}) {
        const double scaled = (4 * std::numbers::pi * t * mehler_kernel({1.0}, t, x, x)).real();
        CHECK(std::abs(scaled - (1 - t * t / 6)) < t * t * t * t);
    }
    CHECK_THROWS_AS(mehler_kernel({1.0}, 0.0, x, y), DomainError);
}

TEST_CASE("Mehler kernel solves the heat equation") {
    const double B = 1.3, t = 0.2;
    const Point x = pt(0.3, 0.1), y = pt(-0.2, 0.4);
    const double h = 1e-5;
    const Complex dt = (mehler_kernel({B}, t + h, x, y) - mehler_kernel({B}, t - h, x, y)) / (2 * h);
    const Complex Hk = apply_h_fd(B, t, x, y);
    CHECK(std::abs(dt + Hk) < 1e-5 * std::abs(dt) + 1e-5);
}

TEST_CASE("harmonic oscillator kernel") {
    // omega -> 0 recovers the free kernel; the product form factorizes
    CHECK(harmonic_oscillator_kernel_1d(1e-8, 0.3, 0.2, -0.1) ==
          doctest::Approx(std::exp(-0.09 / 1.2) / std::sqrt(4 * std::numbers::pi * 0.3)).epsilon(1e-10));
    const Point x = pt(0.2, 0.5), y = pt(-0.1, 0.3);
    CHECK(harmonic_oscillator_kernel(1.5, 0.2, x, y) ==
          doctest::Approx(harmonic_oscillator_kernel_1d(1.5, 0.2, 0.2, -0.1) *
                          harmonic_oscillator_kernel_1d(1.5, 0.2, 0.5, 0.3)));
    // heat equation in 1d with V = omega^2 x^2
    const double w = 1.5, t = 0.2, a = 0.3, b = -0.4, h = 1e-4;
    auto K = [&](double tt, double xx) { return harmonic_oscillator_kernel_1d(w, tt, xx, b); };
    const double dt = (K(t + h, a) - K(t - h, a)) / (2 * h);
    const double dxx = (K(t, a + h) - 2 * K(t, a) + K(t, a - h)) / (h * h);
    CHECK(dt == doctest::Approx(dxx - w * w * a * a * K(t, a)).epsilon(1e-5));
}

TEST_CASE("Crank-Nicolson free kernel at the center") {
    const GridSpec g{4.0, 128, 1e-3};
    const double T = 0.1;
    const auto r = crank_nicolson_evolve(g, FieldConfig::from_strings(2, "0", {"0", "0"}), pt(0, 0), T);
    const int c = g.nearest(0.0);
    const double exact = free_kernel(2, T, pt(0, 0), pt(0, 0));
    CHECK(std::abs(r.at(c, c) - exact) / exact < 0.01);
}

TEST_CASE("Crank-Nicolson conserves mass without fields") {
    const GridSpec g{4.0, 64, 2e-3, GridSpec::Boundary::Periodic};
    const auto f = crank_nicolson_evolve(g, FieldConfig::from_strings(2, "0", {"0", "0"}), pt(0, 0), 0.04);
    Complex mass = 0;
    for (int i = 0; i < f.values.size(); ++i) mass += f.values[i];
    CHECK(std::abs(mass * g.spacing() * g.spacing() - 1.0) < 1e-9);
}

TEST_CASE("Crank-Nicolson against Mehler and the oscillator") {
    const GridSpec g{4.0, 128, 1e-3};
    const double T = 0.05;
    const Point y = pt(0, 0);
    auto rel_sup = [&](const CrankNicolsonResult& r, auto&& exact) {
        double err = 0, scale = 0;
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j) {
                const Point x = pt(g.node(i), g.node(j));
                if ((x - y).norm() > 1.0) continue;
                const Complex e = exact(x);
                err = std::max(err, std::abs(r.at(i, j) - e));
                scale = std::max(scale, std::abs(e));
            }
        return err / scale;
    };
    const auto m = crank_nicolson_evolve(g, constant_field(1.0), y, T);
    CHECK(rel_sup(m, [&](const Point& x) { return mehler_kernel({1.0}, T, x, y); }) < 0.02);
    const auto o = crank_nicolson_evolve(
        g, FieldConfig::from_strings(2, "(+ (^ x1 2) (^ x2 2))", {"0", "0"}), y, T);
    CHECK(rel_sup(o, [&](const Point& x) { return Complex(harmonic_oscillator_kernel(1.0, T, x, y)); }) < 0.02);
}

TEST_CASE("Crank-Nicolson input errors") {
    const auto cfg = constant_field(1.0);
    CHECK_THROWS_AS(crank_nicolson_evolve({4.0, 8, 1e-3}, cfg, pt(0, 0), 0.05), ConfigError);
    CHECK_THROWS_AS(crank_nicolson_evolve({1.0, 64, 1e-3}, cfg, pt(0, 0), 0.5), ConfigError);
}

TEST_CASE("power law fits") {
    std::vector<std::pair<double, double>> s2, s15;
    for (int j = 0; j < 7; ++j) {
        const double t = 0.1 * std::pow(0.5, j);
        s2.emplace_back(t, t * t);
        s15.emplace_back(t, 3 * std::pow(t, 1.5));
    }
    const PowerLawFit a = fit_power_law(s2);
    CHECK(std::abs(a.slope - 2.0) < 1e-10);
    const PowerLawFit b = fit_power_law(s15);
    CHECK(std::abs(b.slope - 1.5) < 1e-10);
    CHECK(std::abs(b.intercept - std::log(3.0)) < 1e-10);
    s2[3].second = 0.0;
    CHECK_THROWS_AS(fit_power_law(s2), DomainError);
    s15.resize(3);
    CHECK_THROWS_AS(fit_power_law(s15), DomainError);
}
