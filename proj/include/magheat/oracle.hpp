#pragma once

#include "magheat/field_config.hpp"
#include "magheat/jets.hpp"

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

namespace magheat {

/// Exact heat kernel for a constant field B in d = 2, symmetric gauge
/// A = (B/2)(-x2, x1).
struct MehlerParams {
    double B = 1.0;
};

Complex mehler_kernel(const MehlerParams& p, double t, const Point& x, const Point& y);

/// Heat kernel of -d^2/dx^2 + omega^2 x^2 in one dimension.
double harmonic_oscillator_kernel_1d(double omega, double t, double x, double y);
/// Product kernel for V = omega^2 |x|^2, A = 0 in any dimension.
double harmonic_oscillator_kernel(double omega, double t, const Point& x, const Point& y);

/// Free heat kernel (4 pi t)^{-d/2} e^{-|x-y|^2/4t}.
double free_kernel(int d, double t, const Point& x, const Point& y);

/// Uniform grid on [-L, L]^2 with n points per axis, nodes -L + i h, h = 2L/n.
struct GridSpec {
    enum class Boundary { Periodic, DirichletFar };

    double L = 4.0;
    int n = 128;
    double dt = 1e-3;
    Boundary boundary = Boundary::DirichletFar;

    double spacing() const { return 2.0 * L / n; }
    double node(int i) const { return -L + i * spacing(); }
    /// Index of the node nearest to coordinate v.
    int nearest(double v) const;
    /// Throws ConfigError for n < 16, L <= 0 or dt <= 0.
    void validate() const;
    /// Throws ConfigError unless exp(-L^2 / 4T) < 1e-12.
    void check_decay(double T) const;
};

struct CrankNicolsonResult {
    GridSpec grid;
    double T = 0.0;
    int steps = 0;
    int max_iterations = 0; // largest CG iteration count over all steps
    Eigen::VectorXcd values; // K(T, x_{i,j}, y) at index i * n + j (x1 = node(i), x2 = node(j))

    Complex at(int i, int j) const { return values[i * grid.n + j]; }
};

/// Crank-Nicolson evolution of du/dt = -H u from a discrete delta at y, with
/// Peierls phases on grid links. y must be a grid node; T a multiple of dt.
/// Throws NumericalError when the linear solve does not reach 1e-10.
CrankNicolsonResult crank_nicolson_evolve(const GridSpec& grid, const FieldConfig& cfg,
                                          const Point& y, double T);

/// Writes x1,x2,re,im rows.
void write_grid_csv(const CrankNicolsonResult& r, const std::string& path);

struct PowerLawFit {
    std::vector<std::pair<double, double>> samples;
    double slope = 0.0;
    double slope_stderr = 0.0;
    double intercept = 0.0;
    double rms = 0.0;
};

/// Least squares on (log t, log value). Needs >= 4 samples, distinct t > 0 and
/// values > 0; throws DomainError otherwise.
PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& samples);

} // namespace magheat
