#include "magheat/errors.hpp"
#include "magheat/field_config.hpp"
#include "magheat/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace magheat;

TEST_CASE("line integral examples") {
    const QuadratureRule r1(1), r2(2), r8(8);
    CHECK(std::abs(line_integral([](double) { return Complex(1.0); }, r1) - 1.0) < 1e-15);
    CHECK(std::abs(line_integral([](double s) { return Complex(s * s); }, r2) - 1.0 / 3.0) < 1e-15);
    CHECK(std::abs(line_integral([](double s) { return Complex(std::exp(s)); }, r8) -
                   (std::exp(1.0) - 1.0)) < 1e-12);
}

TEST_CASE("polynomial exactness up to degree 2n - 1") {
    for (int n = 1; n <= 20; ++n) {
        const QuadratureRule r(n);
        double wsum = 0;
        for (double w : r.weights()) wsum += w;
        CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
        for (int p = 0; p <= 2 * n - 1; ++p) {
            const Complex v = line_integral([p](double s) { return Complex(std::pow(s, p)); }, r);
            CHECK(std::abs(v - 1.0 / (p + 1)) < 1e-14);
        }
    }
    CHECK_THROWS_AS(QuadratureRule(0), ConfigError);
}

TEST_CASE("double integral examples") {
    const QuadratureRule r(8);
    CHECK(std::abs(double_integral([](double, double) { return Complex(1.0); }, r) - 1.0) < 1e-15);
    CHECK(std::abs(double_integral([](double t, double s) { return Complex(t * s); }, r) - 0.25) <
          1e-15);
    const Complex v = double_integral([](double t, double s) { return Complex(std::sin(t) * std::cos(s)); }, r);
    CHECK(std::abs(v - (1 - std::cos(1.0)) * std::sin(1.0)) < 1e-12);
}

TEST_CASE("non-finite integrand names the node") {
    const QuadratureRule r(4);
    try {
        line_integral([](double s) { return Complex(s > 0.5 ? std::numeric_limits<double>::infinity() : 0.0); }, r);
        FAIL("expected an evaluation error");
    } catch (const EvaluationError& e) {
        CHECK(std::string(e.what()).find("s = ") != std::string::npos);
    }
}

TEST_CASE("segment endpoints are exact") {
    Point x(2), y(2);
    x << 0.1, 0.7;
    y << -0.3, 0.2;
    const LineSegment seg(x, y);
    CHECK(seg.point(0.0) == y);
    CHECK(seg.point(1.0) == x);
    CHECK((seg.velocity() - (x - y)).norm() == 0.0);
}
