#include "magheat/errors.hpp"
#include "magheat/field_config.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace magheat;

namespace {

Point pt(double a, double b) {
    Point p(2);
    p << a, b;
    return p;
}

} // namespace

TEST_CASE("field expression parse and print round trip") {
    const char* exprs[] = {"(+ x1 (* 2 x2))", "(sin (* pi x1))", "(^ (- x1 1) 3)", "(- x2)",
                           "(/ (exp x1) (+ 1 (^ x2 2)))", "(cos x3)", "1.5"};
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1, 1);
    for (const char* s : exprs) {
        const FieldExpr f = FieldExpr::parse(s);
        const FieldExpr g = FieldExpr::parse(f.to_string());
        for (int i = 0; i < 4; ++i) {
            const double x[] = {u(rng), u(rng), u(rng)};
            CHECK(f.evaluate(x) == doctest::Approx(g.evaluate(x)).epsilon(1e-15));
        }
    }
}

TEST_CASE("field expression errors carry line and column") {
    auto message = [](const char* s) {
        try {
            FieldExpr::parse(s);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message("(+ x1") != "");
    CHECK(message("(foo x1)").find("column 2") != std::string::npos);
    CHECK(message("(+ x1\n  y2)").find("line 2") != std::string::npos);
    CHECK(message("x0") != "");
    CHECK(message("(^ x1 2.5)") != "");
    CHECK(message("(sin x1 x2)") != "");
    CHECK(message("") != "");
}

TEST_CASE("symbolic derivative matches the jet") {
    const FieldExpr f = FieldExpr::parse("(* (sin x1) (exp (* x1 x2)))");
    const double x[] = {0.3, -0.4};
    const TaylorJet j = f.jet(x, 1);
    CHECK(f.diff(0).evaluate(x) == doctest::Approx(j[MultiIndex::unit(2, 0)].real()).epsilon(1e-14));
    CHECK(f.diff(1).evaluate(x) == doctest::Approx(j[MultiIndex::unit(2, 1)].real()).epsilon(1e-14));
}

TEST_CASE("magnetic field of the symmetric gauge") {
    const FieldConfig cfg = constant_field(1.0);
    for (const Point& x : {pt(0, 0), pt(1.3, -2.0)}) {
        const Eigen::MatrixXd B = magnetic_field(cfg, x);
        CHECK(B(1, 0) == doctest::Approx(1.0));
        CHECK(B(0, 1) == doctest::Approx(-1.0));
    }
}

TEST_CASE("pure gauge has zero field") {
    const FieldConfig cfg = FieldConfig::from_strings(2, "0", {"x2", "x1"});
    CHECK(magnetic_field(cfg, pt(0.7, -0.1)).norm() == 0.0);
    const FieldConfig g = gauge_transformed(FieldConfig::from_strings(2, "0", {"0", "0"}),
                                            FieldExpr::parse("(* x1 x2)"));
    CHECK(magnetic_field(g, pt(0.2, 3.0)).norm() == 0.0);
}

TEST_CASE("B21 for A = (0, x1^2)") {
    const FieldConfig cfg = FieldConfig::from_strings(2, "0", {"0", "(^ x1 2)"});
    const Eigen::MatrixXd B = magnetic_field(cfg, pt(2, 5));
    CHECK(B(1, 0) == doctest::Approx(4.0));
    CHECK(B(0, 1) == doctest::Approx(-4.0));
}

TEST_CASE("field is antisymmetric for random polynomial potentials") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    const FieldConfig cfg = FieldConfig::from_strings(
        3, "0", {"(* x2 (^ x3 2))", "(+ (* x1 x3) (sin x1))", "(* 0.5 (^ x1 2) x2)"});
    for (int i = 0; i < 10; ++i) {
        Point x(3);
        x << u(rng), u(rng), u(rng);
        const Eigen::MatrixXd B = magnetic_field(cfg, x);
        CHECK((B + B.transpose()).norm() == 0.0);
        const auto jets = magnetic_field_jets(cfg, x, 2);
        for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l) {
                CHECK(std::abs(jets[k * 3 + l].value().real() - B(k, l)) < 1e-14);
                CHECK(std::abs(jets[k * 3 + l].value() + jets[l * 3 + k].value()) == 0.0);
            }
    }
}

TEST_CASE("field derivative jets") {
    const FieldConfig cf = constant_field(2.5);
    const TaylorJet b = field_derivative_jet(cf, FieldComponent::field(1, 0), pt(0.3, 0.9), 4);
    CHECK(b.value().real() == doctest::Approx(2.5));
    for (std::size_t i = 1; i < b.size(); ++i) CHECK(std::abs(b.coeff(i)) == 0.0);

    const FieldConfig zero = FieldConfig::from_strings(2, "(^ x1 4)", {"0", "0"});
    const TaylorJet a = field_derivative_jet(zero, FieldComponent::vector(0), pt(1, 0), 3);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a.coeff(i)) == 0.0);
    const TaylorJet v = field_derivative_jet(zero, FieldComponent::potential(), pt(1, 0), 2);
    CHECK(v.value().real() == doctest::Approx(1.0));
    CHECK(v[MultiIndex::unit(2, 0)].real() == doctest::Approx(4.0));
    CHECK(v[MultiIndex::unit(2, 0, 2)].real() == doctest::Approx(12.0));
}

TEST_CASE("jet cap and validation errors") {
    const FieldConfig cfg = FieldConfig::from_strings(2, "x1", {"0", "0"}, 0.0, 3);
    CHECK_THROWS_AS(field_derivative_jet(cfg, FieldComponent::potential(), pt(0, 0), 4), ConfigError);
    CHECK_THROWS_AS(magnetic_field_jets(cfg, pt(0, 0), 4), ConfigError);
    CHECK_THROWS_AS(FieldConfig::from_strings(2, "x3", {"0", "0"}), ConfigError);
    CHECK_THROWS_AS(FieldConfig::from_strings(2, "0", {"0"}), ConfigError);
    CHECK_THROWS_AS(FieldConfig::from_strings(2, "0", {"0", "0"}, 0.0, 1000), ConfigError);
}

TEST_CASE("torus flux builtin") {
    const FieldConfig cfg = torus_flux(1);
    CHECK(magnetic_field(cfg, pt(0.1, 0.2))(1, 0) == doctest::Approx(2 * M_PI));
    const FieldConfig with = torus_flux(2, {FieldExpr::parse("(sin (* 2 pi x2))"), FieldExpr::constant(0)});
    const double expect = 4 * M_PI - 2 * M_PI * std::cos(2 * M_PI * 0.3);
    CHECK(magnetic_field(with, pt(0.1, 0.3))(1, 0) == doctest::Approx(expect));
}
