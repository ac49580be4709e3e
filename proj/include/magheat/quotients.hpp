#pragma once

#include "magheat/field_config.hpp"
#include "magheat/parametrix.hpp"
#include "magheat/volterra.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace magheat {

struct QuotientSpec {
    enum class Kind { HalfPlane, Cylinder, Torus };
    enum class BC { Dirichlet, Neumann };

    Kind kind = Kind::HalfPlane;
    BC bc = BC::Dirichlet;
    /// Translation generators; cylinder uses the first only. Default unit lattice.
    std::vector<Point> generators;
    /// Hard cap on |n|_inf for image sums.
    int max_image_norm = 8;
    /// Target for the Gaussian envelope tail of image sums.
    double tail_tol = 1e-12;
    /// Tolerance of the sampled symmetry and periodicity checks.
    double check_tol = 1e-10;

    /// Fills default generators (e2 for a cylinder, e1 and e2 for a torus).
    QuotientSpec normalized() const;
};

std::string to_string(QuotientSpec::Kind kind);
std::string to_string(QuotientSpec::BC bc);

/// Sampled check of V(Rx) = V(x), A(Rx) = R A(x) with R(x1, x2) = (x1, -x2), and of
/// the boundary conditions at x2 = 0 (odd x2-derivatives of V and A1, even
/// x2-derivatives of A2, orders up to 3).
struct SymmetryReport {
    double potential = 0.0;
    double vector_potential = 0.0;
    double boundary_derivatives = 0.0;
    double field_reflection = 0.0; // |B(Rx) + B(x)|

    double max_deviation() const;
    bool ok(double tol) const { return max_deviation() <= tol; }
};

SymmetryReport check_reflection_symmetry(const FieldConfig& cfg, int samples,
                                         std::uint64_t seed = 1);

Point reflect(const Point& x);

/// K(t,x,y) -/+ K(t,x,Ry) for Dirichlet/Neumann, for any whole-plane kernel.
Complex half_plane_kernel(const KernelFunction& f, QuotientSpec::BC bc, double t, const Point& x,
                          const Point& y);

/// Half-plane kernels built from a parametrix. Construction runs the symmetry
/// check and throws ConfigError with the report when it fails.
class HalfPlaneParametrix {
public:
    HalfPlaneParametrix(const ParametrixEvaluator& ev, QuotientSpec::BC bc, int samples = 64,
                        double tol = 1e-10);

    const SymmetryReport& report() const { return report_; }
    Complex kernel(double t, const Point& x, const Point& y) const;
    /// Jet in x.
    TaylorJet kernel_jet(double t, const Point& x, const Point& y, int order) const;

private:
    const ParametrixEvaluator& ev_;
    QuotientSpec::BC bc_;
    SymmetryReport report_;
};

/// Sampled periodicity of cfg under the lattice: V(x + e) = V(x) and
/// A(x + e) - A(x) = c_e constant. The flux through a cell is c_1.e_2 - c_2.e_1.
struct LatticeReport {
    double potential = 0.0;     // max |V(x + e) - V(x)|
    double gauge_offset = 0.0;  // max deviation of A(x + e) - A(x) from constant
    std::vector<Point> offsets; // c_e per generator
    double flux = 0.0;
    bool flux_quantized = true;
    bool ok = true;
    std::string message;
};

LatticeReport check_lattice_periodicity(const FieldConfig& cfg, const QuotientSpec& spec,
                                        int samples = 64, std::uint64_t seed = 1);

struct ImageSum {
    Complex value;
    /// Sum of exp(-(|n - n0| - delta)_+^2 / 4t) over omitted images; relative
    /// to the (4 pi t)^{-d/2} scale of the kernel.
    double tail_bound = 0.0;
    int images = 0;
};

struct DiagonalTerm {
    int k = 0;
    std::vector<int> image; // lattice index n; half-plane uses {0} and {1} for Rx
    double weight = 1.0;    // exp(-|x - image|^2 / 4t)
    Complex coefficient;    // +-u_k(x, image) times the translation phase
    Complex value() const { return weight * coefficient; }
};

struct DiagonalExpansion {
    std::vector<DiagonalTerm> terms;
    /// a_k(x) = u_k(x, x) from the identity image.
    std::vector<Complex> plane;
    /// Sum over images of weight * coefficient per k.
    std::vector<Complex> quotient;
    /// Bound on |quotient[k] - plane[k]| from the truncated images and tail.
    std::vector<double> image_bound;
};

/// Cylinder or torus R^2 / Gamma. Translations act by magnetic translations
/// with phases chi_n(x) = c_n.x + kappa_n so that non-periodic gauges of a
/// periodic field (e.g. quantized torus flux) are handled.
class LatticeQuotient {
public:
    /// Throws ConfigError if the periodicity check fails or the torus flux is
    /// not in 2 pi Z.
    LatticeQuotient(const FieldConfig& cfg, QuotientSpec spec);

    const QuotientSpec& spec() const { return spec_; }
    const LatticeReport& report() const { return report_; }
    int rank() const { return static_cast<int>(spec_.generators.size()); }

    Point translate(const Point& y, const std::vector<int>& n) const;
    /// chi_n(y).
    double phase(const std::vector<int>& n, const Point& y) const;

    /// sum_n f(t, x, y + n) exp(i chi_n(y)) over a window around the image of y
    /// nearest to x. Throws NumericalError if tail_tol is not met within
    /// max_image_norm.
    ImageSum image_sum(const KernelFunction& f, double t, const Point& x, const Point& y) const;

    DiagonalExpansion diagonal_expansion(const ParametrixEvaluator& ev, double t, const Point& x,
                                         int k_max) const;

private:
    std::vector<int> nearest_image(const Point& x, const Point& y) const;
    int radius_for(double t, double delta, double& tail) const;

    QuotientSpec spec_;
    LatticeReport report_;
};

/// Half-plane diagonal terms (identity and reflected image with sign -/+).
DiagonalExpansion half_plane_diagonal_expansion(const ParametrixEvaluator& ev, QuotientSpec::BC bc,
                                                double t, const Point& x, int k_max);

} // namespace magheat
