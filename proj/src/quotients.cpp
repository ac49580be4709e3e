#include "magheat/quotients.hpp"

#include "magheat/errors.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace magheat {

QuotientSpec QuotientSpec::normalized() const {
    QuotientSpec s = *this;
    if (s.generators.empty()) {
        Point e1(2), e2(2);
        e1 << 1.0, 0.0;
        e2 << 0.0, 1.0;
        if (kind == Kind::Cylinder) s.generators = {e2};
        if (kind == Kind::Torus) s.generators = {e1, e2};
    }
    if (kind == Kind::Cylinder && s.generators.size() != 1) {
        throw ConfigError("cylinder needs exactly one translation generator");
    }
    if (kind == Kind::Torus && s.generators.size() != 2) {
        throw ConfigError("torus needs exactly two translation generators");
    }
    if (kind == Kind::Torus && std::abs(s.generators[0].dot(s.generators[1])) > 1e-12) {
        throw ConfigError("torus generators must be orthogonal");
    }
    for (const auto& e : s.generators) {
        if (e.size() != 2 || !(e.norm() > 0.0)) throw ConfigError("bad translation generator");
    }
    if (kind == Kind::HalfPlane) s.generators.clear();
    if (s.max_image_norm < 0) throw ConfigError("max_image_norm must be non-negative");
    if (!(s.tail_tol > 0.0)) throw ConfigError("tail_tol must be positive");
    return s;
}

std::string to_string(QuotientSpec::Kind kind) {
    switch (kind) {
    case QuotientSpec::Kind::HalfPlane: return "half_plane";
    case QuotientSpec::Kind::Cylinder: return "cylinder";
    case QuotientSpec::Kind::Torus: return "torus";
    }
    return "?";
}

std::string to_string(QuotientSpec::BC bc) {
    return bc == QuotientSpec::BC::Dirichlet ? "dirichlet" : "neumann";
}

double SymmetryReport::max_deviation() const {
    return std::max({potential, vector_potential, boundary_derivatives, field_reflection});
}

Point reflect(const Point& x) {
    Point r = x;
    r[1] = -r[1];
    return r;
}

SymmetryReport check_reflection_symmetry(const FieldConfig& cfg, int samples, std::uint64_t seed) {
    if (cfg.d != 2) throw ConfigError("reflection symmetry check needs d = 2");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    SymmetryReport rep;
    Point x(2);
    for (int i = 0; i < samples; ++i) {
        x << coord(rng), coord(rng);
        const Point rx = reflect(x);
        const auto sx = as_span(x);
        const auto srx = as_span(rx);
        rep.potential = std::max(rep.potential, std::abs(cfg.V.evaluate(srx) - cfg.V.evaluate(sx)));
        rep.vector_potential = std::max(
            {rep.vector_potential, std::abs(cfg.A[0].evaluate(srx) - cfg.A[0].evaluate(sx)),
             std::abs(cfg.A[1].evaluate(srx) + cfg.A[1].evaluate(sx))});
        const double b = magnetic_field(cfg, x)(1, 0);
        const double brx = magnetic_field(cfg, rx)(1, 0);
        rep.field_reflection = std::max(rep.field_reflection, std::abs(brx + b));
    }

    const int order = std::min(3, cfg.jet_cap);
    for (int i = 0; i < samples; ++i) {
        x << coord(rng), 0.0;
        const TaylorJet v = cfg.V.jet(as_span(x), order);
        const TaylorJet a1 = cfg.A[0].jet(as_span(x), order);
        const TaylorJet a2 = cfg.A[1].jet(as_span(x), order);
        for (int p = 0; p <= order; ++p) {
            const MultiIndex m = MultiIndex::unit(2, 1, p);
            if (p % 2 == 1) {
                rep.boundary_derivatives =
                    std::max({rep.boundary_derivatives, std::abs(v[m]), std::abs(a1[m])});
            } else {
                rep.boundary_derivatives = std::max(rep.boundary_derivatives, std::abs(a2[m]));
            }
        }
    }
    return rep;
}

Complex half_plane_kernel(const KernelFunction& f, QuotientSpec::BC bc, double t, const Point& x,
                          const Point& y) {
    if (x.size() != 2 || x[1] < 0.0 || y[1] < 0.0) {
        throw DomainError("half-plane kernel needs points with x2 >= 0");
    }
    const double sign = bc == QuotientSpec::BC::Dirichlet ? -1.0 : 1.0;
    return f(t, x, y) + sign * f(t, x, reflect(y));
}

HalfPlaneParametrix::HalfPlaneParametrix(const ParametrixEvaluator& ev, QuotientSpec::BC bc,
                                         int samples, double tol)
    : ev_(ev), bc_(bc), report_(check_reflection_symmetry(ev.config(), samples)) {
    if (!report_.ok(tol)) {
        std::ostringstream os;
        os << "configuration is not reflection symmetric: V " << report_.potential << ", A "
           << report_.vector_potential << ", boundary derivatives " << report_.boundary_derivatives
           << ", B " << report_.field_reflection << " (tolerance " << tol << ")";
        throw ConfigError(os.str());
    }
}

Complex HalfPlaneParametrix::kernel(double t, const Point& x, const Point& y) const {
    return half_plane_kernel([this](double tt, const Point& a, const Point& b) { return ev_.kernel(tt, a, b); },
                             bc_, t, x, y);
}

TaylorJet HalfPlaneParametrix::kernel_jet(double t, const Point& x, const Point& y, int order) const {
    if (x[1] < 0.0 || y[1] < 0.0) throw DomainError("half-plane kernel needs points with x2 >= 0");
    TaylorJet j = ev_.kernel_jet(t, x, y, order);
    const double sign = bc_ == QuotientSpec::BC::Dirichlet ? -1.0 : 1.0;
    j.add_scaled(ev_.kernel_jet(t, x, reflect(y), order), sign);
    return j;
}

LatticeReport check_lattice_periodicity(const FieldConfig& cfg, const QuotientSpec& spec_in,
                                        int samples, std::uint64_t seed) {
    const QuotientSpec spec = spec_in.normalized();
    if (cfg.d != 2) throw ConfigError("lattice quotients need d = 2");
    LatticeReport rep;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(-1.5, 1.5);
    Point x(2);
    for (const Point& e : spec.generators) {
        // reference offset at the origin
        Point o = Point::Zero(2);
        Point oe = o + e;
        Point c(2);
        for (int i = 0; i < 2; ++i) c[i] = cfg.A[i].evaluate(as_span(oe)) - cfg.A[i].evaluate(as_span(o));
        for (int s = 0; s < samples; ++s) {
            x << coord(rng), coord(rng);
            const Point xe = x + e;
            rep.potential = std::max(rep.potential, std::abs(cfg.V.evaluate(as_span(xe)) -
                                                             cfg.V.evaluate(as_span(x))));
            for (int i = 0; i < 2; ++i) {
                const double ci = cfg.A[i].evaluate(as_span(xe)) - cfg.A[i].evaluate(as_span(x));
                rep.gauge_offset = std::max(rep.gauge_offset, std::abs(ci - c[i]));
            }
        }
        rep.offsets.push_back(c);
    }
    std::ostringstream msg;
    rep.ok = rep.potential <= spec.check_tol && rep.gauge_offset <= spec.check_tol;
    if (rep.potential > spec.check_tol) msg << "V not periodic (deviation " << rep.potential << "); ";
    if (rep.gauge_offset > spec.check_tol) {
        msg << "A(x + e) - A(x) not constant (deviation " << rep.gauge_offset << "); ";
    }
    if (spec.generators.size() == 2) {
        rep.flux = rep.offsets[0].dot(spec.generators[1]) - rep.offsets[1].dot(spec.generators[0]);
        const double q = rep.flux / (2.0 * std::numbers::pi);
        rep.flux_quantized = std::abs(q - std::round(q)) <= spec.check_tol * (1.0 + std::abs(q));
        if (!rep.flux_quantized) {
            rep.ok = false;
            msg << "flux " << rep.flux << " is not in 2 pi Z; ";
        }
    }
    rep.message = msg.str();
    return rep;
}

LatticeQuotient::LatticeQuotient(const FieldConfig& cfg, QuotientSpec spec)
    : spec_(spec.normalized()) {
    if (spec_.kind == QuotientSpec::Kind::HalfPlane) {
        throw UsageError("LatticeQuotient needs a cylinder or torus spec");
    }
    report_ = check_lattice_periodicity(cfg, spec_);
    if (!report_.ok) throw ConfigError("lattice periodicity check failed: " + report_.message);
}

Point LatticeQuotient::translate(const Point& y, const std::vector<int>& n) const {
    Point out = y;
    for (int i = 0; i < rank(); ++i) out += n[i] * spec_.generators[i];
    return out;
}

double LatticeQuotient::phase(const std::vector<int>& n, const Point& y) const {
    // chi_n(y) = c_n.y + kappa_n with c_n = sum n_i c_i and
    // kappa_n = 1/2 sum n_i^2 c_i.e_i + n_1 n_2 c_2.e_1
    const auto& c = report_.offsets;
    const auto& e = spec_.generators;
    double chi = 0.0;
    for (int i = 0; i < rank(); ++i) {
        chi += n[i] * c[i].dot(y) + 0.5 * n[i] * n[i] * c[i].dot(e[i]);
    }
    if (rank() == 2) chi += n[0] * n[1] * c[1].dot(e[0]);
    return chi;
}

std::vector<int> LatticeQuotient::nearest_image(const Point& x, const Point& y) const {
    // coordinates of x - y in the generator basis, rounded
    Eigen::MatrixXd G(2, rank());
    for (int i = 0; i < rank(); ++i) G.col(i) = spec_.generators[i];
    const Eigen::VectorXd coeff = G.colPivHouseholderQr().solve(x - y);
    std::vector<int> n(rank());
    for (int i = 0; i < rank(); ++i) n[i] = static_cast<int>(std::lround(coeff[i]));
    return n;
}

int LatticeQuotient::radius_for(double t, double delta, double& tail) const {
    // envelope of omitted shells |m|_inf = R + 1, R + 2, ...; the Euclidean
    // length of a lattice vector with |m|_inf = j is at least j * emin
    double emin = spec_.generators[0].norm();
    for (const auto& e : spec_.generators) emin = std::min(emin, e.norm());
    auto shell = [&](int j) {
        const double dist = std::max(0.0, j * emin - delta);
        const double count = rank() == 1 ? 2.0 : 8.0 * j;
        return count * std::exp(-dist * dist / (4.0 * t));
    };
    auto tail_from = [&](int R) {
        double s = 0.0;
        for (int j = R + 1; j < R + 10000; ++j) {
            const double v = shell(j);
            s += v;
            if (v < 1e-300 || v < 1e-17 * s) break;
        }
        return s;
    };
    for (int R = 0; R <= spec_.max_image_norm; ++R) {
        tail = tail_from(R);
        if (tail < spec_.tail_tol) return R;
    }
    tail = tail_from(spec_.max_image_norm);
    std::ostringstream os;
    os << "image sum tail " << tail << " above tolerance " << spec_.tail_tol
       << " at max_image_norm " << spec_.max_image_norm << " (t = " << t << ")";
    throw NumericalError(os.str());
}

ImageSum LatticeQuotient::image_sum(const KernelFunction& f, double t, const Point& x,
                                    const Point& y) const {
    if (!(t > 0.0)) throw DomainError("image sum needs t > 0");
    const std::vector<int> n0 = nearest_image(x, y);
    const double delta = (x - translate(y, n0)).norm();
    ImageSum out;
    const int R = radius_for(t, delta, out.tail_bound);
    std::vector<int> n(rank());
    auto add = [&](const std::vector<int>& m) {
        for (int i = 0; i < rank(); ++i) n[i] = n0[i] + m[i];
        out.value += f(t, x, translate(y, n)) * std::exp(Complex(0.0, phase(n, y)));
        ++out.images;
    };
    if (rank() == 1) {
        for (int a = -R; a <= R; ++a) add({a});
    } else {
        for (int a = -R; a <= R; ++a) {
            for (int b = -R; b <= R; ++b) add({a, b});
        }
    }
    return out;
}

DiagonalExpansion LatticeQuotient::diagonal_expansion(const ParametrixEvaluator& ev, double t,
                                                      const Point& x, int k_max) const {
    if (!(t > 0.0)) throw DomainError("diagonal expansion needs t > 0");
    double tail = 0.0;
    const int R = radius_for(t, 0.0, tail);
    DiagonalExpansion out;
    out.plane.assign(k_max + 1, Complex{});
    out.quotient.assign(k_max + 1, Complex{});
    out.image_bound.assign(k_max + 1, 0.0);
    std::vector<double> umax(k_max + 1, 0.0);

    std::vector<std::vector<int>> images;
    if (rank() == 1) {
        for (int a = -R; a <= R; ++a) images.push_back({a});
    } else {
        for (int a = -R; a <= R; ++a) {
            for (int b = -R; b <= R; ++b) images.push_back({a, b});
        }
    }
    for (const auto& n : images) {
        const Point xn = translate(x, n);
        const double weight = std::exp(-(x - xn).squaredNorm() / (4.0 * t));
        const Complex chi = std::exp(Complex(0.0, phase(n, x)));
        const bool identity = std::all_of(n.begin(), n.end(), [](int v) { return v == 0; });
        for (int k = 0; k <= k_max; ++k) {
            DiagonalTerm term;
            term.k = k;
            term.image = n;
            term.weight = weight;
            term.coefficient = identity ? ev.heat_invariant(k, x) : ev.coefficient(k, x, xn).u * chi;
            out.quotient[k] += term.value();
            if (identity) {
                out.plane[k] = term.coefficient;
            } else {
                out.image_bound[k] += term.weight * std::abs(term.coefficient);
                umax[k] = std::max(umax[k], std::abs(term.coefficient));
            }
            out.terms.push_back(std::move(term));
        }
    }
    // omitted images, with the largest coefficient seen as a scale
    for (int k = 0; k <= k_max; ++k) out.image_bound[k] += tail * std::max(umax[k], 1.0);
    return out;
}

DiagonalExpansion half_plane_diagonal_expansion(const ParametrixEvaluator& ev, QuotientSpec::BC bc,
                                                double t, const Point& x, int k_max) {
    if (!(t > 0.0)) throw DomainError("diagonal expansion needs t > 0");
    if (x.size() != 2 || x[1] < 0.0) throw DomainError("half-plane point needs x2 >= 0");
    const double sign = bc == QuotientSpec::BC::Dirichlet ? -1.0 : 1.0;
    const Point rx = reflect(x);
    const double weight = std::exp(-x[1] * x[1] / t);
    DiagonalExpansion out;
    for (int k = 0; k <= k_max; ++k) {
        DiagonalTerm plane{k, {0}, 1.0, ev.heat_invariant(k, x)};
        DiagonalTerm image{k, {1}, weight, sign * ev.coefficient(k, x, rx).u};
        out.plane.push_back(plane.coefficient);
        out.quotient.push_back(plane.value() + image.value());
        out.image_bound.push_back(weight * std::abs(image.coefficient));
        out.terms.push_back(plane);
        out.terms.push_back(image);
    }
    return out;
}

} // namespace magheat
