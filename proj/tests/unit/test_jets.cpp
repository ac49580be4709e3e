#include "magheat/errors.hpp"
#include "magheat/field_config.hpp"
#include "magheat/jets.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

using namespace magheat;

namespace {

MultiIndex mi(std::vector<int> e) { return MultiIndex(std::move(e)); }

// central differences of a scalar function, step h
double fd1(const std::function<double(double, double)>& f, double x, double y, int j, double h) {
    return j == 0 ? (f(x + h, y) - f(x - h, y)) / (2 * h) : (f(x, y + h) - f(x, y - h)) / (2 * h);
}

} // namespace

TEST_CASE("jet of x1^2 at (3, 0)") {
    const auto f = FieldExpr::parse("(^ x1 2)");
    const double x[] = {3.0, 0.0};
    const TaylorJet j = f.jet(x, 2);
    CHECK(j.value().real() == doctest::Approx(9.0));
    CHECK(j[mi({1, 0})].real() == doctest::Approx(6.0));
    CHECK(j[mi({2, 0})].real() == doctest::Approx(2.0));
    CHECK(std::abs(j[mi({0, 1})]) == 0.0);
    CHECK(std::abs(j[mi({1, 1})]) == 0.0);
    CHECK(std::abs(j[mi({0, 2})]) == 0.0);
}

TEST_CASE("jet of sin x2 at the origin") {
    const double x[] = {0.0, 0.0};
    const TaylorJet j = FieldExpr::parse("(sin x2)").jet(x, 1);
    CHECK(std::abs(j.value()) == 0.0);
    CHECK(j[mi({0, 1})].real() == doctest::Approx(1.0));
    CHECK(std::abs(j[mi({1, 0})]) == 0.0);
}

TEST_CASE("jet of exp(x1 x2) against finite differences") {
    const auto f = FieldExpr::parse("(exp (* x1 x2))");
    const double x[] = {1.0, 1.0};
    const TaylorJet j = f.jet(x, 2);
    const double e = std::exp(1.0);
    CHECK(j.value().real() == doctest::Approx(e).epsilon(1e-14));
    CHECK(j[mi({1, 0})].real() == doctest::Approx(e).epsilon(1e-14));
    CHECK(j[mi({1, 1})].real() == doctest::Approx(2 * e).epsilon(1e-14));

    const auto g = [](double a, double b) { return std::exp(a * b); };
    const double h = 1e-5;
    CHECK(std::abs(j[mi({1, 0})].real() - fd1(g, 1.0, 1.0, 0, h)) < 1e-8);
    const double mixed = (g(1 + h, 1 + h) - g(1 + h, 1 - h) - g(1 - h, 1 + h) + g(1 - h, 1 - h)) /
                         (4 * h * h);
    CHECK(std::abs(j[mi({1, 1})].real() - mixed) < 1e-4);
}

TEST_CASE("jet derivatives agree with finite differences for random expressions") {
    const char* exprs[] = {"(* (sin x1) (cos (* 2 x2)))", "(/ 1 (+ 2 (^ x1 2) (^ x2 2)))",
                           "(exp (- (* 0.3 x1) (^ x2 3)))", "(^ (+ 1 (* x1 x2)) -2)"};
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    for (const char* s : exprs) {
        const FieldExpr f = FieldExpr::parse(s);
        for (int trial = 0; trial < 5; ++trial) {
            const double x[] = {u(rng), u(rng)};
            const TaylorJet j = f.jet(x, 3);
            const auto g = [&](double a, double b) {
                const double p[] = {a, b};
                return f.evaluate(p);
            };
            for (int k = 0; k < 2; ++k) {
                const double fd = fd1(g, x[0], x[1], k, 1e-5);
                CHECK(std::abs(j[MultiIndex::unit(2, k)].real() - fd) < 1e-7 * (1 + std::abs(fd)));
            }
            // third derivative in x1 from differences of the second-derivative jet
            const double h = 1e-4;
            const double xp[] = {x[0] + h, x[1]}, xm[] = {x[0] - h, x[1]};
            const double fd3 = (f.jet(xp, 2)[mi({2, 0})].real() - f.jet(xm, 2)[mi({2, 0})].real()) /
                               (2 * h);
            CHECK(std::abs(j[mi({3, 0})].real() - fd3) < 1e-5 * (1 + std::abs(fd3)));
        }
    }
}

TEST_CASE("Leibniz rule and compose") {
    const double x[] = {0.4, -0.3, 0.2};
    const auto f = FieldExpr::parse("(* x1 (sin x3))");
    const auto g = FieldExpr::parse("(+ x2 (^ x1 2))");
    const TaylorJet prod = f.jet(x, 4) * g.jet(x, 4);
    const TaylorJet direct = (f * g).jet(x, 4);
    for (std::size_t i = 0; i < prod.size(); ++i) CHECK(std::abs(prod.coeff(i) - direct.coeff(i)) < 1e-13);

    const TaylorJet ex = exp(g.jet(x, 4));
    const TaylorJet viaexpr = FieldExpr::parse("(exp (+ x2 (^ x1 2)))").jet(x, 4);
    for (std::size_t i = 0; i < ex.size(); ++i) CHECK(std::abs(ex.coeff(i) - viaexpr.coeff(i)) < 1e-12);

    const TaylorJet s = sin(g.jet(x, 4)), c = cos(g.jet(x, 4));
    const TaylorJet one = s * s + c * c;
    CHECK(std::abs(one.value() - 1.0) < 1e-14);
    for (std::size_t i = 1; i < one.size(); ++i) CHECK(std::abs(one.coeff(i)) < 1e-12);

    const TaylorJet r = reciprocal(g.jet(x, 4) + Complex(2.0)) * (g.jet(x, 4) + Complex(2.0));
    CHECK(std::abs(r.value() - 1.0) < 1e-14);
    for (std::size_t i = 1; i < r.size(); ++i) CHECK(std::abs(r.coeff(i)) < 1e-12);
}

TEST_CASE("derivative, laplacian and scaling") {
    const double x[] = {0.5, 1.5};
    const auto f = FieldExpr::parse("(* (^ x1 3) (^ x2 2))");
    const TaylorJet j = f.jet(x, 5);
    const TaylorJet d1 = j.derivative(0);
    CHECK(d1.order() == 4);
    CHECK(d1.value().real() == doctest::Approx(3 * 0.25 * 2.25));
    const TaylorJet lap = j.laplacian();
    CHECK(lap.value().real() == doctest::Approx(6 * 0.5 * 2.25 + 2 * 0.125));
    const TaylorJet sc = j.scaled_by_degree(0.5);
    CHECK(sc[mi({2, 1})] == j[mi({2, 1})] * 0.125);
    CHECK(j.truncated(2).order() == 2);
}

TEST_CASE("division by a zero jet names the node") {
    const double x[] = {0.0, 0.0};
    const auto f = FieldExpr::parse("(/ 1 x1)");
    CHECK_THROWS_AS(f.jet(x, 2), EvaluationError);
    CHECK_THROWS_AS(f.evaluate(x), EvaluationError);
    try {
        f.evaluate(x);
    } catch (const EvaluationError& e) {
        CHECK(std::string(e.what()).find("(/ 1 x1)") != std::string::npos);
    }
}

TEST_CASE("jet layout sizes") {
    const auto& L = JetLayout::for_dimension(2);
    CHECK(L.size(0) == 1);
    CHECK(L.size(1) == 3);
    CHECK(L.size(2) == 6);
    CHECK(JetLayout::max_order_for_dimension(3) >= 8);
}
