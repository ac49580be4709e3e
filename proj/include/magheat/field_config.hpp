#pragma once

#include "magheat/field_expr.hpp"
#include "magheat/jets.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace magheat {

using Point = Eigen::VectorXd;

inline std::span<const double> as_span(const Point& x) {
    return {x.data(), static_cast<std::size_t>(x.size())};
}

/// Potentials V and A of H = (-i grad - A)^2 + V on R^d.
struct FieldConfig {
    int d = 2;
    FieldExpr V;
    std::vector<FieldExpr> A;
    /// Declared polynomial growth exponent. Recorded, never checked.
    double m = 0.0;
    /// Largest derivative order of A, V the recursion may request.
    int jet_cap = 8;

    /// Throws ConfigError on a dimension mismatch, a variable index >= d or a
    /// jet cap above the engine maximum.
    void validate() const;

    static FieldConfig from_strings(int d, const std::string& V, const std::vector<std::string>& A,
                                    double m = 0.0, int jet_cap = 8);
};

/// Default jet cap for coefficients u_0..u_kmax: two orders per recursion level.
inline int default_jet_cap(int k_max) { return 2 * k_max + 2; }

/// Constant field B in d = 2 in the symmetric gauge A = (B/2)(-x2, x1).
FieldConfig constant_field(double B, const FieldExpr& V = FieldExpr::constant(0.0), int jet_cap = 8);

/// Field on the unit torus R^2 / Z^2 with quantized flux B0 = 2 pi n:
/// A = (pi n)(-x2, x1) + A_periodic.
FieldConfig torus_flux(int n, const std::vector<FieldExpr>& A_periodic = {},
                       const FieldExpr& V = FieldExpr::constant(0.0), int jet_cap = 8);

/// Same B and V with A replaced by A + grad chi.
FieldConfig gauge_transformed(const FieldConfig& cfg, const FieldExpr& chi);

struct FieldComponent {
    enum class Kind { V, A, B } kind = Kind::V;
    int i = 0; // A_i, or B_ij
    int j = 0;

    static FieldComponent potential() { return {Kind::V, 0, 0}; }
    static FieldComponent vector(int i) { return {Kind::A, i, 0}; }
    static FieldComponent field(int k, int l) { return {Kind::B, k, l}; }
};

/// B_kl = dA_k/dx_l - dA_l/dx_k. The lower triangle is the negated upper
/// triangle, so B + B^T is exactly zero.
Eigen::MatrixXd magnetic_field(const FieldConfig& cfg, const Point& x);

/// Jet of V, A_i or B_kl at x. B jets come from A jets of one order more.
/// Throws ConfigError when order exceeds cfg.jet_cap.
TaylorJet field_derivative_jet(const FieldConfig& cfg, FieldComponent which, const Point& x,
                               int order);

/// Jets of all B_kl (k < l) at x from a single pass over A.
/// Entry [k * d + l] holds B_kl; the lower triangle is filled by negation.
std::vector<TaylorJet> magnetic_field_jets(const FieldConfig& cfg, const Point& x, int order);

} // namespace magheat
