#pragma once

#include "magheat/field_config.hpp"
#include "magheat/jets.hpp"
#include "magheat/quadrature.hpp"

#include <Eigen/Dense>

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace magheat {

struct QuadratureOptions {
    int line_nodes = 16;
    int double_nodes = 12;
};

struct AuxFields {
    Eigen::VectorXcd alpha;
    Eigen::MatrixXcd beta;
    Eigen::MatrixXcd gamma;
};

/// Jets in x (at fixed y) of the auxiliary fields alpha_l, beta_jl, gamma_jl.
struct AuxJets {
    std::vector<TaylorJet> alpha;  // [l]
    std::vector<TaylorJet> beta;   // [j * d + l]
    std::vector<TaylorJet> gamma;  // [j * d + l]
};

struct CoefficientValue {
    int k = 0;
    Complex u;
    Complex w;
};

/// Small-t parametrix k_N(t,x,y) = (4 pi t)^{-d/2} e^{-|x-y|^2/4t} sum_{k<=N+1} u_k t^k
/// for H = (-i grad - A)^2 + V, with u_k = u_0 w_k built by the transport recursion.
///
/// Immutable apart from a coefficient cache keyed by (x, y); safe to share
/// between threads.
class ParametrixEvaluator {
public:
    ParametrixEvaluator(FieldConfig cfg, int N, QuadratureOptions quad = {});

    const FieldConfig& config() const { return cfg_; }
    int order() const { return N_; }
    int dimension() const { return cfg_.d; }
    const QuadratureOptions& quadrature() const { return quad_; }
    /// Set when N < ceil(d/2) - 1, where k_N is not a parametrix in the strict sense.
    const std::optional<std::string>& warning() const { return warning_; }

    /// exp(i int_0^1 A(x(s)).(x - y) ds).
    Complex u0(const Point& x, const Point& y) const;
    TaylorJet u0_jet(const Point& x, const Point& y, int order) const;

    AuxFields aux_fields(const Point& x, const Point& y) const;
    AuxJets aux_jets(const Point& x, const Point& y, int order) const;

    /// Jets in x of g_k(x, y) and w_k(x, y). On the diagonal no quadrature is used.
    TaylorJet g_jet(int k, const Point& x, const Point& y, int order) const;
    TaylorJet w_jet(int k, const Point& x, const Point& y, int order) const;
    Complex g(int k, const Point& x, const Point& y) const { return g_jet(k, x, y, 0).value(); }
    Complex w(int k, const Point& x, const Point& y) const { return w_jet(k, x, y, 0).value(); }

    CoefficientValue coefficient(int k, const Point& x, const Point& y) const;
    Complex u(int k, const Point& x, const Point& y) const { return coefficient(k, x, y).u; }
    /// Independent single-quadrature form of u_1 used to cross-check the recursion.
    Complex u1_closed_form(const Point& x, const Point& y) const;

    /// k_N(t, x, y). Throws DomainError for t <= 0.
    Complex kernel(double t, const Point& x, const Point& y) const;
    /// R_N = (d/dt + H) k_N in closed form, from g_{N+1}.
    Complex residual(double t, const Point& x, const Point& y) const;
    /// g_{N+1}(x, y) u_0(x, y); R_N is this times a t-dependent scalar.
    Complex residual_factor(const Point& x, const Point& y) const;
    static double residual_prefactor(int d, int N, double t, double r2);

    /// Jets in x of u_0..u_{N+1}.
    std::vector<TaylorJet> coefficient_jets(const Point& x, const Point& y, int order) const;
    TaylorJet kernel_jet(double t, const Point& x, const Point& y, int order) const;
    static TaylorJet kernel_jet_from(const std::vector<TaylorJet>& u_jets, double t, const Point& x,
                                     const Point& y);

    /// H f at x from a jet of f of order >= 2.
    Complex apply_hamiltonian(const TaylorJet& f, const Point& x) const;

    /// a_k(x) = u_k(x, x) = g_{k-1}(x, x) / k for k >= 1, a_0 = 1.
    Complex heat_invariant(int k, const Point& x) const;

    /// Max over j of |(d_j - i A_j) u_0 - (-i sum_l (x_l - y_l) int t B_jl dt) u_0|.
    double check_covariant_derivative_identity(const Point& x, const Point& y) const;

    /// (d/dt + H) k_N at (t, x, y) with Richardson-extrapolated centered time
    /// differences and jet-based H. Compare with residual().
    Complex heat_operator_defect(double t, const Point& x, const Point& y) const;

    void clear_cache() const;

private:
    struct Entry {
        std::vector<Complex> u; // u_0..u_{N+1}
        std::vector<Complex> w;
    };

    TaylorJet diag_g_jet(int k, const Point& y, int order) const;
    TaylorJet diag_w_jet(int k, const Point& y, int order) const;
    /// g_k from the jet of w_k (order + 2; null for w_0 = 1) and the aux jets.
    TaylorJet g_from_w(const TaylorJet* w, const AuxJets& aux, const Point& x, const Point& y,
                       int order) const;
    AuxJets diag_aux_jets(const Point& y, int order) const;
    std::shared_ptr<const Entry> entry(const Point& x, const Point& y) const;

    FieldConfig cfg_;
    int N_;
    QuadratureOptions quad_;
    QuadratureRule line_;
    QuadratureRule dbl_;
    std::optional<std::string> warning_;

    mutable std::mutex cache_mutex_;
    mutable std::map<std::vector<double>, std::shared_ptr<const Entry>> cache_;
    mutable std::map<std::vector<double>, Complex> residual_cache_;
};

bool same_point(const Point& a, const Point& b);

} // namespace magheat
