#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace magheat {

using Complex = std::complex<double>;

/// Exponent vector of a partial derivative, d^alpha = d_1^a_1 ... d_d^a_d.
class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> exponents);

    static MultiIndex zero(int dim);
    /// power * e_j
    static MultiIndex unit(int dim, int j, int power = 1);

    int dimension() const { return static_cast<int>(exponents_.size()); }
    int degree() const;
    int operator[](int i) const { return exponents_[i]; }
    const std::vector<int>& exponents() const { return exponents_; }

    MultiIndex operator+(const MultiIndex& other) const;
    auto operator<=>(const MultiIndex&) const = default;

private:
    std::vector<int> exponents_;
};

// Graded ordering of all multi-indices of total degree <= max_order in a fixed
// dimension. Lower-order jets use a prefix of the same ordering, so a single
// layout per dimension serves every jet order.
class JetLayout {
public:
    struct ProductTerm {
        std::uint32_t lhs;
        std::uint32_t rhs;
        std::uint32_t out;
        double weight; // Leibniz multinomial for raw derivatives
    };

    static const JetLayout& for_dimension(int dim);
    static int max_order_for_dimension(int dim);

    int dimension() const { return dim_; }
    int max_order() const { return max_order_; }
    std::size_t size(int order) const { return prefix_[order + 1]; }
    const MultiIndex& index(std::size_t i) const { return indices_[i]; }
    int degree(std::size_t i) const { return degrees_[i]; }
    std::size_t position(const MultiIndex& alpha) const;
    /// Position of index(i) + e_j, or -1 when that exceeds max_order.
    std::int32_t shifted(std::size_t i, int j) const { return shift_[i * dim_ + j]; }
    std::span<const ProductTerm> product_terms(int order) const;

private:
    JetLayout(int dim, int max_order);

    int dim_;
    int max_order_;
    std::vector<MultiIndex> indices_;
    std::vector<int> degrees_;
    std::vector<std::size_t> prefix_;
    std::map<std::vector<int>, std::size_t> lookup_;
    std::vector<std::int32_t> shift_;
    std::vector<ProductTerm> products_;
    std::vector<std::size_t> product_prefix_;
};

/// Truncated multivariate Taylor jet of a complex function at a point.
///
/// Coefficients hold raw partial derivatives d^alpha f(x), not Taylor
/// coefficients d^alpha f / alpha!. Arithmetic is closed at the jet order:
/// combining jets of different orders yields the smaller order.
class TaylorJet {
public:
    TaylorJet() = default;
    TaylorJet(int dim, int order);

    static TaylorJet constant(int dim, int order, Complex value);
    /// The coordinate function x_j expanded at a point whose j-th entry is value.
    static TaylorJet variable(int dim, int order, int j, double value);

    int dimension() const { return layout_ ? layout_->dimension() : 0; }
    int order() const { return order_; }
    std::size_t size() const { return coeffs_.size(); }
    const JetLayout& layout() const { return *layout_; }

    Complex value() const { return coeffs_[0]; }
    /// Raw derivative d^alpha f at the expansion point.
    Complex operator[](const MultiIndex& alpha) const;
    Complex coeff(std::size_t i) const { return coeffs_[i]; }
    Complex& coeff(std::size_t i) { return coeffs_[i]; }
    std::span<const Complex> coeffs() const { return coeffs_; }

    TaylorJet truncated(int order) const;
    /// d/dx_j, one order lower.
    TaylorJet derivative(int j) const;
    /// Sum of second derivatives, two orders lower.
    TaylorJet laplacian() const;
    /// Jet of x -> f(c + s (x - c)) given the jet of f at c + s (x - c):
    /// multiplies every coefficient by s^|alpha|.
    TaylorJet scaled_by_degree(double s) const;

    TaylorJet& operator+=(const TaylorJet& other);
    TaylorJet& operator-=(const TaylorJet& other);
    TaylorJet& operator*=(Complex scalar);
    TaylorJet& operator+=(Complex scalar);
    /// this += scalar * other, in place.
    void add_scaled(const TaylorJet& other, Complex scalar);

    friend TaylorJet operator+(TaylorJet a, const TaylorJet& b) { return a += b; }
    friend TaylorJet operator-(TaylorJet a, const TaylorJet& b) { return a -= b; }
    friend TaylorJet operator-(TaylorJet a) { return a *= -1.0; }
    friend TaylorJet operator*(const TaylorJet& a, const TaylorJet& b);
    friend TaylorJet operator*(TaylorJet a, Complex s) { return a *= s; }
    friend TaylorJet operator*(Complex s, TaylorJet a) { return a *= s; }
    friend TaylorJet operator+(TaylorJet a, Complex s) { return a += s; }

    /// f(a) where derivs[n] = f^(n)(a.value()), n = 0..order.
    TaylorJet compose(std::span<const Complex> derivs) const;

private:
    const JetLayout* layout_ = nullptr;
    int order_ = 0;
    std::vector<Complex> coeffs_;
};

TaylorJet exp(const TaylorJet& a);
TaylorJet sin(const TaylorJet& a);
TaylorJet cos(const TaylorJet& a);
/// 1/a; throws EvaluationError when the constant term vanishes.
TaylorJet reciprocal(const TaylorJet& a);
/// Integer power; negative exponents go through reciprocal.
TaylorJet pow(const TaylorJet& a, int exponent);

} // namespace magheat
