#include "magheat/parametrix.hpp"

#include "magheat/errors.hpp"

#include <cmath>
#include <numbers>

namespace magheat {

namespace {

constexpr Complex I{0.0, 1.0};
constexpr std::size_t kCacheLimit = 1u << 20;

// coefficient i divided by (shift + |alpha_i|)
void divide_by_degree(TaylorJet& j, int shift) {
    const JetLayout& layout = j.layout();
    for (std::size_t i = 0; i < j.size(); ++i) {
        j.coeff(i) /= static_cast<double>(shift + layout.degree(i));
    }
}

std::vector<double> key_of(const Point& x, const Point& y) {
    std::vector<double> key(x.data(), x.data() + x.size());
    key.insert(key.end(), y.data(), y.data() + y.size());
    return key;
}

// (x_l - y_l) as a jet in x
TaylorJet offset_jet(int d, int order, int l, const Point& x, const Point& y) {
    return TaylorJet::variable(d, order, l, x[l] - y[l]);
}

} // namespace

bool same_point(const Point& a, const Point& b) {
    return a.size() == b.size() && (a.array() == b.array()).all();
}

ParametrixEvaluator::ParametrixEvaluator(FieldConfig cfg, int N, QuadratureOptions quad)
    : cfg_(std::move(cfg)), N_(N), quad_(quad), line_(quad.line_nodes), dbl_(quad.double_nodes) {
    cfg_.validate();
    if (N < 0) throw ConfigError("parametrix order N must be non-negative");
    const int needed = (cfg_.d + 1) / 2 - 1;
    if (N < needed) {
        warning_ = "N = " + std::to_string(N) + " is below ceil(d/2) - 1 = " +
                   std::to_string(needed) + "; R_N is singular as t -> 0";
    }
}

Complex ParametrixEvaluator::u0(const Point& x, const Point& y) const {
    if (same_point(x, y)) return 1.0;
    const Point r = x - y;
    const LineSegment seg(x, y);
    const Complex phase = line_integral(
        [&](double s) {
            const Point p = seg.point(s);
            double v = 0.0;
            for (int j = 0; j < cfg_.d; ++j) v += cfg_.A[j].evaluate(as_span(p)) * r[j];
            return Complex(v);
        },
        line_);
    return std::exp(I * phase);
}

TaylorJet ParametrixEvaluator::u0_jet(const Point& x, const Point& y, int order) const {
    const int d = cfg_.d;
    std::vector<TaylorJet> r;
    for (int l = 0; l < d; ++l) r.push_back(offset_jet(d, order, l, x, y));
    TaylorJet phase(d, order);
    const LineSegment seg(x, y);
    for (int i = 0; i < line_.size(); ++i) {
        const double s = line_.nodes()[i];
        const Point p = seg.point(s);
        for (int j = 0; j < d; ++j) {
            TaylorJet a = field_derivative_jet(cfg_, FieldComponent::vector(j), p, order);
            phase.add_scaled(a.scaled_by_degree(s) * r[j], line_.weights()[i]);
        }
    }
    return exp(phase * I);
}

AuxJets ParametrixEvaluator::diag_aux_jets(const Point& y, int order) const {
    const int d = cfg_.d;
    const auto B = magnetic_field_jets(cfg_, y, order + 1);
    AuxJets aux;
    aux.alpha.assign(d, TaylorJet(d, order));
    std::vector<TaylorJet> b(d * d, TaylorJet(d, order));
    for (int j = 0; j < d; ++j) {
        for (int l = 0; l < d; ++l) {
            if (j == l) continue;
            aux.alpha[l] += B[j * d + l].derivative(j);
            b[j * d + l] = B[j * d + l].truncated(order);
        }
    }
    // int_0^1 t^{2+|a|} dt and int_0^1 t^{1+|a|} dt
    for (auto& a : aux.alpha) divide_by_degree(a, 3);
    for (auto& e : b) divide_by_degree(e, 2);
    aux.beta = b;
    for (auto& e : aux.beta) e *= 2.0;
    aux.gamma.assign(d * d, TaylorJet(d, order));
    for (int j = 0; j < d; ++j) {
        for (int l = j; l < d; ++l) {
            TaylorJet g(d, order);
            for (int m = 0; m < d; ++m) {
                if (m == l || m == j) continue;
                g += b[m * d + l] * b[m * d + j];
            }
            aux.gamma[j * d + l] = g;
            aux.gamma[l * d + j] = std::move(g);
        }
    }
    return aux;
}

AuxJets ParametrixEvaluator::aux_jets(const Point& x, const Point& y, int order) const {
    if (same_point(x, y)) return diag_aux_jets(y, order);
    const int d = cfg_.d;
    const LineSegment seg(x, y);
    AuxJets aux;
    aux.alpha.assign(d, TaylorJet(d, order));
    std::vector<TaylorJet> b(d * d, TaylorJet(d, order));
    for (int i = 0; i < line_.size(); ++i) {
        const double t = line_.nodes()[i];
        const double w = line_.weights()[i];
        const auto B = magnetic_field_jets(cfg_, seg.point(t), order + 1);
        for (int j = 0; j < d; ++j) {
            for (int l = 0; l < d; ++l) {
                if (j == l) continue;
                aux.alpha[l].add_scaled(B[j * d + l].derivative(j).scaled_by_degree(t), w * t * t);
                b[j * d + l].add_scaled(B[j * d + l].truncated(order).scaled_by_degree(t), w * t);
            }
        }
    }
    aux.beta = b;
    for (auto& e : aux.beta) e *= 2.0;

    // gamma's double integral factorizes into products of single integrals,
    // each taken with the double rule's nodes
    if (dbl_.size() != line_.size()) {
        b.assign(d * d, TaylorJet(d, order));
        for (int i = 0; i < dbl_.size(); ++i) {
            const double t = dbl_.nodes()[i];
            const double w = dbl_.weights()[i];
            const auto B = magnetic_field_jets(cfg_, seg.point(t), order);
            for (int j = 0; j < d; ++j) {
                for (int l = 0; l < d; ++l) {
                    if (j != l) b[j * d + l].add_scaled(B[j * d + l].scaled_by_degree(t), w * t);
                }
            }
        }
    }
    aux.gamma.assign(d * d, TaylorJet(d, order));
    for (int j = 0; j < d; ++j) {
        for (int l = j; l < d; ++l) {
            TaylorJet g(d, order);
            for (int m = 0; m < d; ++m) {
                if (m == l || m == j) continue;
                g += b[m * d + l] * b[m * d + j];
            }
            aux.gamma[j * d + l] = g;
            aux.gamma[l * d + j] = std::move(g);
        }
    }
    return aux;
}

AuxFields ParametrixEvaluator::aux_fields(const Point& x, const Point& y) const {
    const int d = cfg_.d;
    const AuxJets jets = aux_jets(x, y, 0);
    AuxFields f;
    f.alpha.resize(d);
    f.beta.resize(d, d);
    f.gamma.resize(d, d);
    for (int l = 0; l < d; ++l) f.alpha[l] = jets.alpha[l].value();
    for (int j = 0; j < d; ++j) {
        for (int l = 0; l < d; ++l) {
            f.beta(j, l) = jets.beta[j * d + l].value();
            f.gamma(j, l) = jets.gamma[j * d + l].value();
        }
    }
    return f;
}

TaylorJet ParametrixEvaluator::g_from_w(const TaylorJet* w, const AuxJets& aux, const Point& x,
                                        const Point& y, int order) const {
    const int d = cfg_.d;
    std::vector<TaylorJet> r;
    for (int l = 0; l < d; ++l) r.push_back(offset_jet(d, order, l, x, y));

    // S = V + i r.alpha + r.gamma.r
    TaylorJet S = field_derivative_jet(cfg_, FieldComponent::potential(), x, order);
    for (int l = 0; l < d; ++l) S.add_scaled(r[l] * aux.alpha[l], I);
    for (int j = 0; j < d; ++j) {
        TaylorJet q(d, order);
        for (int l = 0; l < d; ++l) q += aux.gamma[j * d + l] * r[l];
        S += r[j] * q;
    }
    if (!w) return -S;

    TaylorJet g = w->laplacian();
    g -= S * w->truncated(order);
    for (int j = 0; j < d; ++j) {
        TaylorJet c(d, order);
        for (int l = 0; l < d; ++l) c += r[l] * aux.beta[j * d + l];
        g.add_scaled(c * w->derivative(j), -I);
    }
    return g;
}

TaylorJet ParametrixEvaluator::diag_w_jet(int k, const Point& y, int order) const {
    const int d = cfg_.d;
    if (k == 0) return TaylorJet::constant(d, order, 1.0);
    TaylorJet w = diag_g_jet(k - 1, y, order);
    divide_by_degree(w, k);
    return w;
}

TaylorJet ParametrixEvaluator::diag_g_jet(int k, const Point& y, int order) const {
    const AuxJets aux = diag_aux_jets(y, order);
    if (k == 0) return g_from_w(nullptr, aux, y, y, order);
    const TaylorJet w = diag_w_jet(k, y, order + 2);
    return g_from_w(&w, aux, y, y, order);
}

TaylorJet ParametrixEvaluator::g_jet(int k, const Point& x, const Point& y, int order) const {
    if (k < 0) throw UsageError("g_k needs k >= 0");
    if (same_point(x, y)) return diag_g_jet(k, y, order);
    const AuxJets aux = aux_jets(x, y, order);
    if (k == 0) return g_from_w(nullptr, aux, x, y, order);
    const TaylorJet w = w_jet(k, x, y, order + 2);
    return g_from_w(&w, aux, x, y, order);
}

TaylorJet ParametrixEvaluator::w_jet(int k, const Point& x, const Point& y, int order) const {
    if (k < 0) throw UsageError("w_k needs k >= 0");
    const int d = cfg_.d;
    if (k == 0) return TaylorJet::constant(d, order, 1.0);
    if (same_point(x, y)) return diag_w_jet(k, y, order);
    const LineSegment seg(x, y);
    TaylorJet w(d, order);
    for (int i = 0; i < line_.size(); ++i) {
        const double s = line_.nodes()[i];
        const TaylorJet g = g_jet(k - 1, seg.point(s), y, order);
        w.add_scaled(g.scaled_by_degree(s), line_.weights()[i] * std::pow(s, k - 1));
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
        const Complex c = w.coeff(i);
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
            throw EvaluationError("non-finite w_" + std::to_string(k) + " jet");
        }
    }
    return w;
}

std::shared_ptr<const ParametrixEvaluator::Entry> ParametrixEvaluator::entry(const Point& x,
                                                                            const Point& y) const {
    const auto key = key_of(x, y);
    {
        std::lock_guard lock(cache_mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    auto e = std::make_shared<Entry>();
    const Complex u0v = u0(x, y);
    e->u.push_back(u0v);
    e->w.push_back(1.0);
    for (int k = 1; k <= N_ + 1; ++k) {
        const Complex wk = w(k, x, y);
        e->w.push_back(wk);
        e->u.push_back(u0v * wk);
    }
    std::lock_guard lock(cache_mutex_);
    if (cache_.size() >= kCacheLimit) cache_.clear();
    return cache_.emplace(key, std::move(e)).first->second;
}

void ParametrixEvaluator::clear_cache() const {
    std::lock_guard lock(cache_mutex_);
    cache_.clear();
    residual_cache_.clear();
}

CoefficientValue ParametrixEvaluator::coefficient(int k, const Point& x, const Point& y) const {
    if (k < 0) throw UsageError("u_k needs k >= 0");
    if (k <= N_ + 1) {
        const auto e = entry(x, y);
        return {k, e->u[k], e->w[k]};
    }
    const Complex wk = w(k, x, y);
    return {k, u0(x, y) * wk, wk};
}

Complex ParametrixEvaluator::u1_closed_form(const Point& x, const Point& y) const {
    const int d = cfg_.d;
    const Point r = x - y;
    const LineSegment seg(x, y);
    // alpha and gamma at (x(s), y) by their own quadratures along [y, x(s)]
    const Complex integral = line_integral(
        [&](double s) {
            const Point xs = seg.point(s);
            const LineSegment inner(xs, y);
            Complex v = -cfg_.V.evaluate(as_span(xs));
            Complex ra{};
            for (int l = 0; l < d; ++l) {
                for (int j = 0; j < d; ++j) {
                    if (j == l) continue;
                    const Complex alpha_part = line_integral(
                        [&](double t) {
                            const auto dB = field_derivative_jet(cfg_, FieldComponent::field(j, l),
                                                                 inner.point(t), 1);
                            return t * t * dB[MultiIndex::unit(d, j)];
                        },
                        line_);
                    ra += r[l] * alpha_part;
                }
            }
            Complex rgr{};
            for (int l = 0; l < d; ++l) {
                for (int j = 0; j < d; ++j) {
                    Complex gamma{};
                    for (int m = 0; m < d; ++m) {
                        gamma += double_integral(
                            [&](double t, double u) {
                                const Eigen::MatrixXd Bt = magnetic_field(cfg_, inner.point(t));
                                const Eigen::MatrixXd Bu = magnetic_field(cfg_, inner.point(u));
                                return Complex(t * u * Bt(m, l) * Bu(m, j));
                            },
                            dbl_);
                    }
                    rgr += r[l] * gamma * r[j];
                }
            }
            return v - I * s * ra - s * s * rgr;
        },
        line_);
    return integral * u0(x, y);
}

Complex ParametrixEvaluator::kernel(double t, const Point& x, const Point& y) const {
    if (!(t > 0.0)) throw DomainError("kernel needs t > 0");
    const auto e = entry(x, y);
    const double r2 = (x - y).squaredNorm();
    Complex sum{};
    double tk = 1.0;
    for (int k = 0; k <= N_ + 1; ++k) {
        sum += e->u[k] * tk;
        tk *= t;
    }
    return std::pow(4.0 * std::numbers::pi * t, -0.5 * cfg_.d) * std::exp(-r2 / (4.0 * t)) * sum;
}

double ParametrixEvaluator::residual_prefactor(int d, int N, double t, double r2) {
    if (!(t > 0.0)) throw DomainError("residual needs t > 0");
    return -std::pow(4.0 * std::numbers::pi, -0.5 * d) * std::pow(t, N + 1 - 0.5 * d) *
           std::exp(-r2 / (4.0 * t));
}

Complex ParametrixEvaluator::residual_factor(const Point& x, const Point& y) const {
    const auto key = key_of(x, y);
    {
        std::lock_guard lock(cache_mutex_);
        auto it = residual_cache_.find(key);
        if (it != residual_cache_.end()) return it->second;
    }
    const Complex v = u0(x, y) * g(N_ + 1, x, y);
    std::lock_guard lock(cache_mutex_);
    if (residual_cache_.size() >= kCacheLimit) residual_cache_.clear();
    residual_cache_.emplace(key, v);
    return v;
}

Complex ParametrixEvaluator::residual(double t, const Point& x, const Point& y) const {
    const double pre = residual_prefactor(cfg_.d, N_, t, (x - y).squaredNorm());
    return pre * residual_factor(x, y);
}

std::vector<TaylorJet> ParametrixEvaluator::coefficient_jets(const Point& x, const Point& y,
                                                             int order) const {
    const TaylorJet u0j = u0_jet(x, y, order);
    std::vector<TaylorJet> out{u0j};
    for (int k = 1; k <= N_ + 1; ++k) out.push_back(u0j * w_jet(k, x, y, order));
    return out;
}

TaylorJet ParametrixEvaluator::kernel_jet_from(const std::vector<TaylorJet>& u_jets, double t,
                                               const Point& x, const Point& y) {
    if (!(t > 0.0)) throw DomainError("kernel needs t > 0");
    const int d = u_jets.front().dimension();
    const int order = u_jets.front().order();
    TaylorJet r2(d, order);
    for (int l = 0; l < d; ++l) {
        const TaylorJet r = offset_jet(d, order, l, x, y);
        r2 += r * r;
    }
    TaylorJet gauss = exp(r2 * Complex(-1.0 / (4.0 * t)));
    gauss *= std::pow(4.0 * std::numbers::pi * t, -0.5 * d);
    TaylorJet sum(d, order);
    double tk = 1.0;
    for (const auto& u : u_jets) {
        sum.add_scaled(u, tk);
        tk *= t;
    }
    return gauss * sum;
}

TaylorJet ParametrixEvaluator::kernel_jet(double t, const Point& x, const Point& y,
                                          int order) const {
    if (!(t > 0.0)) throw DomainError("kernel needs t > 0");
    return kernel_jet_from(coefficient_jets(x, y, order), t, x, y);
}

Complex ParametrixEvaluator::apply_hamiltonian(const TaylorJet& f, const Point& x) const {
    const int d = cfg_.d;
    if (f.order() < 2) throw UsageError("apply_hamiltonian needs a jet of order >= 2");
    Complex out = -f.laplacian().value() + cfg_.V.evaluate(as_span(x)) * f.value();
    for (int j = 0; j < d; ++j) {
        const TaylorJet a = cfg_.A[j].jet(as_span(x), 1);
        const double Aj = a.value().real();
        const double dAj = a[MultiIndex::unit(d, j)].real();
        out += I * dAj * f.value() + 2.0 * I * Aj * f[MultiIndex::unit(d, j)] + Aj * Aj * f.value();
    }
    return out;
}

Complex ParametrixEvaluator::heat_invariant(int k, const Point& x) const {
    if (k < 0) throw UsageError("heat invariant index must be >= 0");
    if (k == 0) return 1.0;
    return diag_g_jet(k - 1, x, 0).value() / static_cast<double>(k);
}

double ParametrixEvaluator::check_covariant_derivative_identity(const Point& x,
                                                                const Point& y) const {
    const int d = cfg_.d;
    const TaylorJet u = u0_jet(x, y, 1);
    const Point r = x - y;
    const LineSegment seg(x, y);
    double dev = 0.0;
    for (int j = 0; j < d; ++j) {
        const Complex lhs = u[MultiIndex::unit(d, j)] - I * cfg_.A[j].evaluate(as_span(x)) * u.value();
        Complex sum{};
        for (int l = 0; l < d; ++l) {
            if (l == j) continue;
            sum += r[l] * line_integral(
                              [&](double t) {
                                  return Complex(t * magnetic_field(cfg_, seg.point(t))(j, l));
                              },
                              line_);
        }
        const Complex rhs = -I * sum * u.value();
        dev = std::max(dev, std::abs(lhs - rhs));
    }
    return dev;
}

Complex ParametrixEvaluator::heat_operator_defect(double t, const Point& x, const Point& y) const {
    const auto jets = coefficient_jets(x, y, 2);
    const Complex Hk = apply_hamiltonian(kernel_jet_from(jets, t, x, y), x);

    std::vector<Complex> u;
    for (const auto& j : jets) u.push_back(j.value());
    const double r2 = (x - y).squaredNorm();
    auto k_at = [&](double tau) {
        Complex sum{};
        double tk = 1.0;
        for (const auto& c : u) {
            sum += c * tk;
            tk *= tau;
        }
        return std::pow(4.0 * std::numbers::pi * tau, -0.5 * cfg_.d) * std::exp(-r2 / (4.0 * tau)) *
               sum;
    };
    const double h = 5e-3 * t;
    auto central = [&](double step) { return (k_at(t + step) - k_at(t - step)) / (2.0 * step); };
    const Complex dt = (4.0 * central(0.5 * h) - central(h)) / 3.0;
    return dt + Hk;
}

} // namespace magheat
