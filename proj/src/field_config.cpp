#include "magheat/field_config.hpp"

#include "magheat/errors.hpp"

#include <numbers>

namespace magheat {

void FieldConfig::validate() const {
    if (d < 1 || d > 8) throw ConfigError("dimension d must be in [1, 8], got " + std::to_string(d));
    if (static_cast<int>(A.size()) != d) {
        throw ConfigError("vector potential has " + std::to_string(A.size()) +
                          " components, expected d = " + std::to_string(d));
    }
    if (V.max_variable() >= d) {
        throw ConfigError("V references x" + std::to_string(V.max_variable() + 1) +
                          " but d = " + std::to_string(d));
    }
    for (int i = 0; i < d; ++i) {
        if (A[i].max_variable() >= d) {
            throw ConfigError("A" + std::to_string(i + 1) + " references x" +
                              std::to_string(A[i].max_variable() + 1) +
                              " but d = " + std::to_string(d));
        }
    }
    // B jets of order jet_cap are built from A jets one order higher
    const int engine = JetLayout::max_order_for_dimension(d);
    if (jet_cap < 0 || jet_cap + 1 > engine) {
        throw ConfigError("jet_cap " + std::to_string(jet_cap) + " outside [0, " +
                          std::to_string(engine - 1) + "] for d = " + std::to_string(d));
    }
}

FieldConfig FieldConfig::from_strings(int d, const std::string& V,
                                      const std::vector<std::string>& A, double m, int jet_cap) {
    FieldConfig cfg;
    cfg.d = d;
    cfg.V = FieldExpr::parse(V);
    for (const auto& a : A) cfg.A.push_back(FieldExpr::parse(a));
    cfg.m = m;
    cfg.jet_cap = jet_cap;
    cfg.validate();
    return cfg;
}

FieldConfig constant_field(double B, const FieldExpr& V, int jet_cap) {
    FieldConfig cfg;
    cfg.d = 2;
    cfg.V = V;
    const FieldExpr half = FieldExpr::constant(0.5 * B);
    cfg.A = {-(half * FieldExpr::variable(1)), half * FieldExpr::variable(0)};
    cfg.m = 2.0;
    cfg.jet_cap = jet_cap;
    cfg.validate();
    return cfg;
}

FieldConfig torus_flux(int n, const std::vector<FieldExpr>& A_periodic, const FieldExpr& V,
                       int jet_cap) {
    FieldConfig cfg = constant_field(2.0 * std::numbers::pi * n, V, jet_cap);
    if (!A_periodic.empty()) {
        if (A_periodic.size() != 2) throw ConfigError("torus periodic gauge part needs 2 components");
        cfg.A[0] = cfg.A[0] + A_periodic[0];
        cfg.A[1] = cfg.A[1] + A_periodic[1];
    }
    cfg.validate();
    return cfg;
}

FieldConfig gauge_transformed(const FieldConfig& cfg, const FieldExpr& chi) {
    FieldConfig out = cfg;
    for (int i = 0; i < cfg.d; ++i) out.A[i] = cfg.A[i] + chi.diff(i);
    out.validate();
    return out;
}

Eigen::MatrixXd magnetic_field(const FieldConfig& cfg, const Point& x) {
    const int d = cfg.d;
    std::vector<TaylorJet> a;
    a.reserve(d);
    for (int i = 0; i < d; ++i) a.push_back(cfg.A[i].jet(as_span(x), 1));
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(d, d);
    for (int k = 0; k < d; ++k) {
        for (int l = k + 1; l < d; ++l) {
            const double v = a[k][MultiIndex::unit(d, l)].real() - a[l][MultiIndex::unit(d, k)].real();
            B(k, l) = v;
            B(l, k) = -v;
        }
    }
    return B;
}

std::vector<TaylorJet> magnetic_field_jets(const FieldConfig& cfg, const Point& x, int order) {
    if (order > cfg.jet_cap) {
        throw ConfigError("requested B jet order " + std::to_string(order) + " exceeds jet_cap " +
                          std::to_string(cfg.jet_cap));
    }
    const int d = cfg.d;
    std::vector<TaylorJet> a;
    a.reserve(d);
    for (int i = 0; i < d; ++i) a.push_back(cfg.A[i].jet(as_span(x), order + 1));
    std::vector<TaylorJet> B(d * d, TaylorJet::constant(d, order, 0.0));
    for (int k = 0; k < d; ++k) {
        for (int l = k + 1; l < d; ++l) {
            TaylorJet b = a[k].derivative(l) - a[l].derivative(k);
            B[l * d + k] = -b;
            B[k * d + l] = std::move(b);
        }
    }
    return B;
}

TaylorJet field_derivative_jet(const FieldConfig& cfg, FieldComponent which, const Point& x,
                               int order) {
    if (order > cfg.jet_cap) {
        throw ConfigError("requested jet order " + std::to_string(order) + " exceeds jet_cap " +
                          std::to_string(cfg.jet_cap));
    }
    const int d = cfg.d;
    switch (which.kind) {
    case FieldComponent::Kind::V: return cfg.V.jet(as_span(x), order);
    case FieldComponent::Kind::A:
        if (which.i < 0 || which.i >= d) throw UsageError("A component index out of range");
        return cfg.A[which.i].jet(as_span(x), order);
    case FieldComponent::Kind::B: {
        const int k = which.i;
        const int l = which.j;
        if (k < 0 || k >= d || l < 0 || l >= d) throw UsageError("B component index out of range");
        if (k == l) return TaylorJet::constant(d, order, 0.0);
        const int lo = std::min(k, l);
        const int hi = std::max(k, l);
        TaylorJet b = cfg.A[lo].jet(as_span(x), order + 1).derivative(hi) -
                      cfg.A[hi].jet(as_span(x), order + 1).derivative(lo);
        return k < l ? b : -b;
    }
    }
    return TaylorJet::constant(d, order, 0.0);
}

} // namespace magheat
