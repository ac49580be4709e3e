#pragma once

#include "magheat/jets.hpp"
#include "magheat/oracle.hpp"
#include "magheat/parametrix.hpp"

#include <functional>
#include <string>
#include <vector>

namespace magheat {

/// Behaviour of a kernel as t -> 0, used for the endpoints of the time integral
/// in convolve(). Delta: tends to delta(x - y). Zero: the z-integral against any
/// bounded function vanishes. Unknown: treated as Zero with a recorded error.
enum class TimeZeroLimit { Delta, Zero, Unknown };

/// Kernel f(t, x, y) sampled on a uniform time ladder t_j = j * dt (j = 1..m)
/// and on a subset of rows (x) and columns (y) of the nodes of a d = 2 grid.
/// Nodes are flattened as i * n + j for x = (node(i), node(j)).
struct GridKernel {
    GridSpec grid;
    std::vector<double> times;
    std::vector<int> rows;
    std::vector<int> cols;
    std::vector<Complex> values; // [time][row][col]
    TimeZeroLimit zero_limit = TimeZeroLimit::Unknown;
    /// Accumulated estimate of the error from Unknown endpoint limits.
    double endpoint_error = 0.0;

    int node_count() const { return grid.n * grid.n; }
    Point node_point(int node) const;
    Complex& at(std::size_t t, std::size_t r, std::size_t c) {
        return values[(t * rows.size() + r) * cols.size() + c];
    }
    Complex at(std::size_t t, std::size_t r, std::size_t c) const {
        return values[(t * rows.size() + r) * cols.size() + c];
    }
    /// Position of a node among rows / cols, -1 if absent.
    int row_of(int node) const;
    int col_of(int node) const;
    /// Largest |value| at time index t.
    double sup_norm(std::size_t t) const;
};

/// All node indices of an n x n grid, in order.
std::vector<int> all_nodes(const GridSpec& grid);
/// Nodes within Euclidean distance radius of the node nearest to center.
std::vector<int> nodes_near(const GridSpec& grid, const Point& center, double radius);
/// m times dt, 2 dt, ..., m dt.
std::vector<double> uniform_ladder(double dt, int m);

using KernelFunction = std::function<Complex(double, const Point&, const Point&)>;

GridKernel sample_kernel(const KernelFunction& f, const GridSpec& grid,
                         const std::vector<double>& times, const std::vector<int>& rows,
                         const std::vector<int>& cols, TimeZeroLimit limit,
                         unsigned threads = 1);

/// k_N on the grid; u_k are computed once per (x, y) pair.
GridKernel sample_parametrix(const ParametrixEvaluator& ev, const GridSpec& grid,
                             const std::vector<double>& times, const std::vector<int>& rows,
                             const std::vector<int>& cols, unsigned threads = 1);

/// R_N on the grid; g_{N+1} is computed once per (x, y) pair.
GridKernel sample_residual(const ParametrixEvaluator& ev, const GridSpec& grid,
                           const std::vector<double>& times, const std::vector<int>& rows,
                           const std::vector<int>& cols, unsigned threads = 1);

/// (f * g)(t, x, y) = int_0^t ds int f(t - s, x, z) g(s, z, y) dz with the
/// trapezoid rule on the ladder and grid weights h^2 in z. Requires a shared
/// grid and ladder, f.cols and g.rows covering every node, and a uniform
/// ladder starting at dt. Throws UsageError otherwise.
GridKernel convolve(const GridKernel& f, const GridKernel& g, unsigned threads = 1);

/// kappa = slope of log|f(t, x, y)| against log t plus (d + 2) / 2, fitted
/// over time indices [first, last] (last < 0 means the end of the ladder).
/// Throws DomainError on zero samples.
double degree_estimate(const GridKernel& f, int row_node, int col_node, int first = 0,
                       int last = -1);

struct VolterraResult {
    GridKernel sum;
    /// Sup norm over all samples of each term k_N * R_N^{*n}, n = 0..n_max.
    std::vector<double> term_sup;
};

/// k_N + sum_{n=1}^{n_max} (-1)^n k_N * R_N^{*n} on rows x cols. For
/// n_max >= 2 the full R_N matrix over all nodes is sampled.
VolterraResult volterra_partial_sum(const ParametrixEvaluator& ev, int n_max,
                                    const GridSpec& grid, const std::vector<double>& times,
                                    const std::vector<int>& rows, const std::vector<int>& cols,
                                    unsigned threads = 1);

/// Binary layout, little-endian: "GKRN", u32 version, u32 d, u32 n, f64 L,
/// u32 m, f64 times[m], u32 row count, u32 rows[], u32 col count, u32 cols[],
/// u8 zero limit, f64 endpoint error, then (re, im) f64 pairs in
/// [time][row][col] order.
void write_grid_kernel(const GridKernel& k, const std::string& path);
GridKernel read_grid_kernel(const std::string& path);
/// t,x1,x2,y1,y2,re,im rows.
void write_grid_kernel_csv(const GridKernel& k, const std::string& path);

} // namespace magheat
