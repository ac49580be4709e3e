#include "magheat/jets.hpp"

#include "magheat/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <mutex>
#include <numeric>
#include <string>

namespace magheat {

MultiIndex::MultiIndex(std::vector<int> exponents) : exponents_(std::move(exponents)) {
    for (int e : exponents_) {
        if (e < 0) throw UsageError("multi-index exponents must be non-negative");
    }
}

MultiIndex MultiIndex::zero(int dim) { return MultiIndex(std::vector<int>(dim, 0)); }

MultiIndex MultiIndex::unit(int dim, int j, int power) {
    std::vector<int> e(dim, 0);
    e.at(j) = power;
    return MultiIndex(std::move(e));
}

int MultiIndex::degree() const { return std::accumulate(exponents_.begin(), exponents_.end(), 0); }

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
    if (other.dimension() != dimension()) throw UsageError("multi-index dimension mismatch");
    std::vector<int> e(exponents_);
    for (int i = 0; i < dimension(); ++i) e[i] += other[i];
    return MultiIndex(std::move(e));
}

namespace {

void enumerate_degree(int dim, int degree, std::vector<int>& current, int pos,
                      std::vector<MultiIndex>& out) {
    if (pos == dim - 1) {
        current[pos] = degree;
        out.emplace_back(current);
        return;
    }
    for (int e = degree; e >= 0; --e) {
        current[pos] = e;
        enumerate_degree(dim, degree - e, current, pos + 1, out);
    }
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

} // namespace

int JetLayout::max_order_for_dimension(int dim) {
    switch (dim) {
    case 1: return 24;
    case 2: return 16;
    case 3: return 12;
    case 4: return 8;
    default: return 6;
    }
}

JetLayout::JetLayout(int dim, int max_order) : dim_(dim), max_order_(max_order) {
    prefix_.push_back(0);
    for (int k = 0; k <= max_order; ++k) {
        std::vector<int> current(dim, 0);
        enumerate_degree(dim, k, current, 0, indices_);
        prefix_.push_back(indices_.size());
    }
    for (std::size_t i = 0; i < indices_.size(); ++i) {
        degrees_.push_back(indices_[i].degree());
        lookup_.emplace(indices_[i].exponents(), i);
    }

    shift_.assign(indices_.size() * dim, -1);
    for (std::size_t i = 0; i < indices_.size(); ++i) {
        if (degrees_[i] >= max_order) continue;
        for (int j = 0; j < dim; ++j) {
            shift_[i * dim + j] =
                static_cast<std::int32_t>(position(indices_[i] + MultiIndex::unit(dim, j)));
        }
    }

    for (std::size_t a = 0; a < indices_.size(); ++a) {
        for (std::size_t b = 0; b < indices_.size(); ++b) {
            if (degrees_[a] + degrees_[b] > max_order) continue;
            const MultiIndex sum = indices_[a] + indices_[b];
            double w = 1.0;
            for (int i = 0; i < dim; ++i) w *= binomial(sum[i], indices_[a][i]);
            products_.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                                 static_cast<std::uint32_t>(position(sum)), w});
        }
    }
    std::stable_sort(products_.begin(), products_.end(),
                     [this](const ProductTerm& l, const ProductTerm& r) {
                         return degrees_[l.out] < degrees_[r.out];
                     });
    product_prefix_.assign(max_order + 2, 0);
    for (const auto& t : products_) ++product_prefix_[degrees_[t.out] + 1];
    std::partial_sum(product_prefix_.begin(), product_prefix_.end(), product_prefix_.begin());
}

const JetLayout& JetLayout::for_dimension(int dim) {
    constexpr int kMaxDim = 8;
    static std::array<std::unique_ptr<JetLayout>, kMaxDim + 1> layouts;
    static std::mutex mutex;
    if (dim < 1 || dim > kMaxDim) {
        throw UsageError("jet dimension must be in [1, " + std::to_string(kMaxDim) + "]");
    }
    std::lock_guard lock(mutex);
    if (!layouts[dim]) layouts[dim].reset(new JetLayout(dim, max_order_for_dimension(dim)));
    return *layouts[dim];
}

std::size_t JetLayout::position(const MultiIndex& alpha) const {
    auto it = lookup_.find(alpha.exponents());
    if (it == lookup_.end()) {
        throw UsageError("multi-index outside the jet layout (degree " +
                         std::to_string(alpha.degree()) + ", max " +
                         std::to_string(max_order_) + ")");
    }
    return it->second;
}

std::span<const JetLayout::ProductTerm> JetLayout::product_terms(int order) const {
    return {products_.data(), product_prefix_[order + 1]};
}

TaylorJet::TaylorJet(int dim, int order)
    : layout_(&JetLayout::for_dimension(dim)), order_(order) {
    if (order < 0 || order > layout_->max_order()) {
        throw ConfigError("jet order " + std::to_string(order) + " exceeds engine maximum " +
                          std::to_string(layout_->max_order()) + " for dimension " +
                          std::to_string(dim));
    }
    coeffs_.assign(layout_->size(order), Complex{});
}

TaylorJet TaylorJet::constant(int dim, int order, Complex value) {
    TaylorJet j(dim, order);
    j.coeffs_[0] = value;
    return j;
}

TaylorJet TaylorJet::variable(int dim, int order, int j, double value) {
    TaylorJet r(dim, order);
    r.coeffs_[0] = value;
    if (order >= 1) r.coeffs_[r.layout_->position(MultiIndex::unit(dim, j))] = 1.0;
    return r;
}

Complex TaylorJet::operator[](const MultiIndex& alpha) const {
    if (alpha.degree() > order_) throw UsageError("derivative order exceeds jet order");
    return coeffs_[layout_->position(alpha)];
}

TaylorJet TaylorJet::truncated(int order) const {
    if (order >= order_) return *this;
    if (order < 0) throw UsageError("negative truncation order");
    TaylorJet r;
    r.layout_ = layout_;
    r.order_ = order;
    r.coeffs_.assign(coeffs_.begin(), coeffs_.begin() + layout_->size(order));
    return r;
}

TaylorJet TaylorJet::derivative(int j) const {
    if (order_ < 1) throw UsageError("cannot differentiate an order-0 jet");
    TaylorJet r;
    r.layout_ = layout_;
    r.order_ = order_ - 1;
    const std::size_t n = layout_->size(order_ - 1);
    r.coeffs_.resize(n);
    for (std::size_t i = 0; i < n; ++i) r.coeffs_[i] = coeffs_[layout_->shifted(i, j)];
    return r;
}

TaylorJet TaylorJet::laplacian() const {
    if (order_ < 2) throw UsageError("laplacian needs a jet of order >= 2");
    TaylorJet r;
    r.layout_ = layout_;
    r.order_ = order_ - 2;
    const std::size_t n = layout_->size(order_ - 2);
    r.coeffs_.assign(n, Complex{});
    const int d = layout_->dimension();
    for (std::size_t i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) {
            r.coeffs_[i] += coeffs_[layout_->shifted(layout_->shifted(i, j), j)];
        }
    }
    return r;
}

TaylorJet TaylorJet::scaled_by_degree(double s) const {
    TaylorJet r(*this);
    std::array<double, 32> powers{};
    powers[0] = 1.0;
    for (int k = 1; k <= order_; ++k) powers[k] = powers[k - 1] * s;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) r.coeffs_[i] *= powers[layout_->degree(i)];
    return r;
}

TaylorJet& TaylorJet::operator+=(const TaylorJet& other) {
    if (other.order_ < order_) *this = truncated(other.order_);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
    return *this;
}

TaylorJet& TaylorJet::operator-=(const TaylorJet& other) {
    if (other.order_ < order_) *this = truncated(other.order_);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
    return *this;
}

TaylorJet& TaylorJet::operator*=(Complex scalar) {
    for (auto& c : coeffs_) c *= scalar;
    return *this;
}

TaylorJet& TaylorJet::operator+=(Complex scalar) {
    coeffs_[0] += scalar;
    return *this;
}

void TaylorJet::add_scaled(const TaylorJet& other, Complex scalar) {
    if (other.order_ < order_) *this = truncated(other.order_);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += scalar * other.coeffs_[i];
}

TaylorJet operator*(const TaylorJet& a, const TaylorJet& b) {
    const int order = std::min(a.order_, b.order_);
    TaylorJet r;
    r.layout_ = a.layout_;
    r.order_ = order;
    r.coeffs_.assign(a.layout_->size(order), Complex{});
    for (const auto& t : a.layout_->product_terms(order)) {
        r.coeffs_[t.out] += t.weight * (a.coeffs_[t.lhs] * b.coeffs_[t.rhs]);
    }
    return r;
}

TaylorJet TaylorJet::compose(std::span<const Complex> derivs) const {
    if (derivs.size() < static_cast<std::size_t>(order_ + 1)) {
        throw UsageError("compose needs order+1 univariate derivatives");
    }
    TaylorJet delta(*this);
    delta.coeffs_[0] = 0.0;
    double factorial = 1.0;
    for (int n = 2; n <= order_; ++n) factorial *= n;
    TaylorJet r = TaylorJet::constant(dimension(), order_, derivs[order_] / factorial);
    for (int n = order_ - 1; n >= 0; --n) {
        factorial /= std::max(n + 1, 1);
        r = r * delta;
        r.coeffs_[0] += derivs[n] / factorial;
    }
    return r;
}

TaylorJet exp(const TaylorJet& a) {
    std::vector<Complex> d(a.order() + 1, std::exp(a.value()));
    return a.compose(d);
}

TaylorJet sin(const TaylorJet& a) {
    const Complex s = std::sin(a.value());
    const Complex c = std::cos(a.value());
    std::vector<Complex> d(a.order() + 1);
    for (int n = 0; n <= a.order(); ++n) {
        switch (n % 4) {
        case 0: d[n] = s; break;
        case 1: d[n] = c; break;
        case 2: d[n] = -s; break;
        default: d[n] = -c; break;
        }
    }
    return a.compose(d);
}

TaylorJet cos(const TaylorJet& a) {
    const Complex s = std::sin(a.value());
    const Complex c = std::cos(a.value());
    std::vector<Complex> d(a.order() + 1);
    for (int n = 0; n <= a.order(); ++n) {
        switch (n % 4) {
        case 0: d[n] = c; break;
        case 1: d[n] = -s; break;
        case 2: d[n] = -c; break;
        default: d[n] = s; break;
        }
    }
    return a.compose(d);
}

TaylorJet reciprocal(const TaylorJet& a) {
    const Complex a0 = a.value();
    if (a0 == Complex{}) throw EvaluationError("division by a jet with zero constant term");
    std::vector<Complex> d(a.order() + 1);
    // d^n/du^n (1/u) = (-1)^n n! / u^(n+1)
    Complex inv = 1.0 / a0;
    Complex term = inv;
    for (int n = 0; n <= a.order(); ++n) {
        d[n] = term;
        term *= -static_cast<double>(n + 1) * inv;
    }
    return a.compose(d);
}

TaylorJet pow(const TaylorJet& a, int exponent) {
    if (exponent < 0) return reciprocal(pow(a, -exponent));
    TaylorJet result = TaylorJet::constant(a.dimension(), a.order(), 1.0);
    TaylorJet base = a;
    while (exponent > 0) {
        if (exponent & 1) result = result * base;
        exponent >>= 1;
        if (exponent > 0) base = base * base;
    }
    return result;
}

} // namespace magheat
