#include "magheat/errors.hpp"
#include "magheat/oracle.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include <cmath>
#include <fstream>
#include <iomanip>

namespace magheat {

int GridSpec::nearest(double v) const {
    const long i = std::lround((v + L) / spacing());
    return static_cast<int>(std::clamp<long>(i, 0, n - 1));
}

void GridSpec::validate() const {
    if (n < 16) throw ConfigError("grid needs n >= 16 points per axis");
    if (!(L > 0.0)) throw ConfigError("grid half-width L must be positive");
    if (!(dt > 0.0)) throw ConfigError("grid time step must be positive");
}

void GridSpec::check_decay(double T) const {
    if (!(std::exp(-L * L / (4.0 * T)) < 1e-12)) {
        throw ConfigError("grid half-width L = " + std::to_string(L) +
                          " too small for T = " + std::to_string(T) +
                          ": exp(-L^2/4T) must be below 1e-12");
    }
}

namespace {

using SpMat = Eigen::SparseMatrix<Complex>;

// Discrete magnetic Hamiltonian with Peierls link phases; link x -> x + h e
// carries exp(-i h A_e(x + h e / 2)).
SpMat peierls_hamiltonian(const GridSpec& g, const FieldConfig& cfg) {
    const int n = g.n;
    const double h = g.spacing();
    const double inv_h2 = 1.0 / (h * h);
    const bool periodic = g.boundary == GridSpec::Boundary::Periodic;
    std::vector<Eigen::Triplet<Complex>> trip;
    trip.reserve(static_cast<std::size_t>(n) * n * 5);
    auto idx = [n](int i, int j) { return i * n + j; };
    Point mid(2);
    Point here(2);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            here << g.node(i), g.node(j);
            const int row = idx(i, j);
            trip.emplace_back(row, row, 4.0 * inv_h2 + cfg.V.evaluate(as_span(here)));
            for (int axis = 0; axis < 2; ++axis) {
                for (int dir = -1; dir <= 1; dir += 2) {
                    int ni = i + (axis == 0 ? dir : 0);
                    int nj = j + (axis == 1 ? dir : 0);
                    if (ni < 0 || ni >= n || nj < 0 || nj >= n) {
                        if (!periodic) continue;
                        ni = (ni + n) % n;
                        nj = (nj + n) % n;
                    }
                    mid = here;
                    mid[axis] += 0.5 * dir * h;
                    const double theta = dir * h * cfg.A[axis].evaluate(as_span(mid));
                    trip.emplace_back(row, idx(ni, nj),
                                      -inv_h2 * std::exp(Complex(0.0, -theta)));
                }
            }
        }
    }
    SpMat H(n * n, n * n);
    H.setFromTriplets(trip.begin(), trip.end());
    return H;
}

} // namespace

CrankNicolsonResult crank_nicolson_evolve(const GridSpec& grid, const FieldConfig& cfg,
                                          const Point& y, double T) {
    grid.validate();
    if (cfg.d != 2) throw ConfigError("Crank-Nicolson oracle is two-dimensional");
    if (!(T > 0.0)) throw DomainError("Crank-Nicolson needs T > 0");
    if (grid.boundary == GridSpec::Boundary::DirichletFar) grid.check_decay(T);
    const int n = grid.n;
    const double h = grid.spacing();
    const int yi = grid.nearest(y[0]);
    const int yj = grid.nearest(y[1]);
    if (std::abs(grid.node(yi) - y[0]) > 1e-9 * h || std::abs(grid.node(yj) - y[1]) > 1e-9 * h) {
        throw ConfigError("Crank-Nicolson source point must be a grid node");
    }

    const SpMat H = peierls_hamiltonian(grid, cfg);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(n * n);
    psi[yi * n + yj] = 1.0 / (h * h);

    // one explicit smoothing substep, well inside the Euler stability bound h^2/4
    const double tau = std::min(h * h / 16.0, 0.5 * T);
    psi -= tau * (H * psi);

    const double rest = T - tau;
    const int steps = std::max(1, static_cast<int>(std::lround(rest / grid.dt)));
    const double dt = rest / steps;

    SpMat I(n * n, n * n);
    I.setIdentity();
    const SpMat plus = I + (0.5 * dt) * H;
    const SpMat minus = I - (0.5 * dt) * H;

    Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(1e-10);
    cg.setMaxIterations(10 * n * n);
    cg.compute(plus);

    CrankNicolsonResult out;
    out.grid = grid;
    out.T = T;
    out.steps = steps;
    for (int s = 0; s < steps; ++s) {
        const Eigen::VectorXcd rhs = minus * psi;
        psi = cg.solveWithGuess(rhs, psi);
        out.max_iterations = std::max(out.max_iterations, static_cast<int>(cg.iterations()));
        if (cg.info() != Eigen::Success) {
            throw NumericalError("Crank-Nicolson solve did not converge at step " +
                                 std::to_string(s) + " after " + std::to_string(cg.iterations()) +
                                 " iterations (residual " + std::to_string(cg.error()) + ")");
        }
    }
    out.values = std::move(psi);
    return out;
}

void write_grid_csv(const CrankNicolsonResult& r, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    os << std::setprecision(17);
    os << "x1,x2,re,im\n";
    for (int i = 0; i < r.grid.n; ++i) {
        for (int j = 0; j < r.grid.n; ++j) {
            const Complex v = r.at(i, j);
            os << r.grid.node(i) << ',' << r.grid.node(j) << ',' << v.real() << ',' << v.imag() << '\n';
        }
    }
}

} // namespace magheat
