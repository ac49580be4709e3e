#include "magheat/volterra.hpp"

#include "magheat/errors.hpp"
#include "magheat/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <numbers>

namespace magheat {

Point GridKernel::node_point(int node) const {
    Point p(2);
    p << grid.node(node / grid.n), grid.node(node % grid.n);
    return p;
}

int GridKernel::row_of(int node) const {
    auto it = std::find(rows.begin(), rows.end(), node);
    return it == rows.end() ? -1 : static_cast<int>(it - rows.begin());
}

int GridKernel::col_of(int node) const {
    auto it = std::find(cols.begin(), cols.end(), node);
    return it == cols.end() ? -1 : static_cast<int>(it - cols.begin());
}

double GridKernel::sup_norm(std::size_t t) const {
    double m = 0.0;
    const std::size_t block = rows.size() * cols.size();
    for (std::size_t i = 0; i < block; ++i) m = std::max(m, std::abs(values[t * block + i]));
    return m;
}

std::vector<int> all_nodes(const GridSpec& grid) {
    std::vector<int> v(grid.n * grid.n);
    for (int i = 0; i < grid.n * grid.n; ++i) v[i] = i;
    return v;
}

std::vector<int> nodes_near(const GridSpec& grid, const Point& center, double radius) {
    const int ci = grid.nearest(center[0]);
    const int cj = grid.nearest(center[1]);
    const double h = grid.spacing();
    std::vector<int> out;
    for (int i = 0; i < grid.n; ++i) {
        for (int j = 0; j < grid.n; ++j) {
            const double di = (i - ci) * h;
            const double dj = (j - cj) * h;
            if (di * di + dj * dj <= radius * radius * (1.0 + 1e-12)) out.push_back(i * grid.n + j);
        }
    }
    return out;
}

std::vector<double> uniform_ladder(double dt, int m) {
    if (!(dt > 0.0) || m < 1) throw ConfigError("time ladder needs dt > 0 and m >= 1");
    std::vector<double> t(m);
    for (int j = 0; j < m; ++j) t[j] = (j + 1) * dt;
    return t;
}

namespace {

void check_sampling(const GridSpec& grid, const std::vector<double>& times,
                    const std::vector<int>& rows, const std::vector<int>& cols) {
    grid.validate();
    if (grid.n > 128) throw ConfigError("grid kernels are limited to n <= 128 per axis");
    if (times.empty() || times.size() > 24) {
        throw ConfigError("time ladder must have between 1 and 24 entries");
    }
    for (std::size_t j = 0; j < times.size(); ++j) {
        if (!(times[j] > 0.0) || (j > 0 && !(times[j] > times[j - 1]))) {
            throw ConfigError("time ladder must be positive and strictly increasing");
        }
    }
    const int nodes = grid.n * grid.n;
    for (int r : rows) {
        if (r < 0 || r >= nodes) throw UsageError("row node out of range");
    }
    for (int c : cols) {
        if (c < 0 || c >= nodes) throw UsageError("column node out of range");
    }
}

GridKernel empty_kernel(const GridSpec& grid, const std::vector<double>& times,
                        const std::vector<int>& rows, const std::vector<int>& cols,
                        TimeZeroLimit limit) {
    check_sampling(grid, times, rows, cols);
    GridKernel k;
    k.grid = grid;
    k.times = times;
    k.rows = rows;
    k.cols = cols;
    k.zero_limit = limit;
    k.values.assign(times.size() * rows.size() * cols.size(), Complex{});
    return k;
}

// Fill every time slice of entry (r, c) from a per-pair computation.
template <class PairFn>
void fill_pairs(GridKernel& k, unsigned threads, PairFn&& fn) {
    const std::size_t pairs = k.rows.size() * k.cols.size();
    parallel_for(pairs, threads, [&](std::size_t p) {
        const std::size_t r = p / k.cols.size();
        const std::size_t c = p % k.cols.size();
        fn(r, c, k.node_point(k.rows[r]), k.node_point(k.cols[c]));
    });
}

bool is_uniform_ladder(const std::vector<double>& times) {
    const double dt = times.front();
    for (std::size_t j = 0; j < times.size(); ++j) {
        if (std::abs(times[j] - (j + 1) * dt) > 1e-12 * (j + 1) * dt) return false;
    }
    return true;
}

} // namespace

GridKernel sample_kernel(const KernelFunction& f, const GridSpec& grid,
                         const std::vector<double>& times, const std::vector<int>& rows,
                         const std::vector<int>& cols, TimeZeroLimit limit, unsigned threads) {
    GridKernel k = empty_kernel(grid, times, rows, cols, limit);
    fill_pairs(k, threads, [&](std::size_t r, std::size_t c, const Point& x, const Point& y) {
        for (std::size_t t = 0; t < times.size(); ++t) k.at(t, r, c) = f(times[t], x, y);
    });
    return k;
}

GridKernel sample_parametrix(const ParametrixEvaluator& ev, const GridSpec& grid,
                             const std::vector<double>& times, const std::vector<int>& rows,
                             const std::vector<int>& cols, unsigned threads) {
    if (ev.dimension() != 2) throw ConfigError("grid kernels are two-dimensional");
    GridKernel k = empty_kernel(grid, times, rows, cols, TimeZeroLimit::Delta);
    fill_pairs(k, threads, [&](std::size_t r, std::size_t c, const Point& x, const Point& y) {
        std::vector<Complex> u;
        for (int j = 0; j <= ev.order() + 1; ++j) u.push_back(ev.coefficient(j, x, y).u);
        const double r2 = (x - y).squaredNorm();
        for (std::size_t t = 0; t < times.size(); ++t) {
            const double tt = times[t];
            Complex sum{};
            double tk = 1.0;
            for (const auto& c2 : u) {
                sum += c2 * tk;
                tk *= tt;
            }
            k.at(t, r, c) = std::exp(-r2 / (4.0 * tt)) / (4.0 * std::numbers::pi * tt) * sum;
        }
    });
    return k;
}

GridKernel sample_residual(const ParametrixEvaluator& ev, const GridSpec& grid,
                           const std::vector<double>& times, const std::vector<int>& rows,
                           const std::vector<int>& cols, unsigned threads) {
    if (ev.dimension() != 2) throw ConfigError("grid kernels are two-dimensional");
    // exponent N + 1 - d/2 >= 0 keeps R_N bounded, and its degree N + 2 >= 2
    // makes the z-integral vanish as t -> 0
    GridKernel k = empty_kernel(grid, times, rows, cols, TimeZeroLimit::Zero);
    const int N = ev.order();
    fill_pairs(k, threads, [&](std::size_t r, std::size_t c, const Point& x, const Point& y) {
        const Complex factor = ev.residual_factor(x, y);
        const double r2 = (x - y).squaredNorm();
        for (std::size_t t = 0; t < times.size(); ++t) {
            k.at(t, r, c) = ParametrixEvaluator::residual_prefactor(2, N, times[t], r2) * factor;
        }
    });
    return k;
}

GridKernel convolve(const GridKernel& f, const GridKernel& g, unsigned threads) {
    if (f.grid.n != g.grid.n || f.grid.L != g.grid.L) throw UsageError("convolve: grids differ");
    if (f.times != g.times) throw UsageError("convolve: time ladders differ");
    if (!is_uniform_ladder(f.times)) throw UsageError("convolve: time ladder must be j * dt");
    const int nodes = f.node_count();
    if (static_cast<int>(f.cols.size()) != nodes || static_cast<int>(g.rows.size()) != nodes) {
        throw UsageError("convolve: f columns and g rows must cover every grid node");
    }
    for (int i = 0; i < nodes; ++i) {
        if (f.cols[i] != i || g.rows[i] != i) throw UsageError("convolve: node order mismatch");
    }

    GridKernel out;
    out.grid = f.grid;
    out.times = f.times;
    out.rows = f.rows;
    out.cols = g.cols;
    const bool unknown =
        f.zero_limit == TimeZeroLimit::Unknown || g.zero_limit == TimeZeroLimit::Unknown;
    out.zero_limit = unknown ? TimeZeroLimit::Unknown : TimeZeroLimit::Zero;
    const std::size_t R = f.rows.size();
    const std::size_t C = g.cols.size();
    const std::size_t m = f.times.size();
    out.values.assign(m * R * C, Complex{});

    using RowMat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    auto fslice = [&](std::size_t t) {
        return Eigen::Map<const RowMat>(f.values.data() + t * R * nodes, R, nodes);
    };
    auto gslice = [&](std::size_t t) {
        return Eigen::Map<const RowMat>(g.values.data() + t * nodes * C, nodes, C);
    };
    const double h = f.grid.spacing();
    const double dt = f.times.front();

    std::vector<double> endpoint_err(m, 0.0);
    parallel_for(m, threads, [&](std::size_t ti) {
        Eigen::Map<RowMat> result(out.values.data() + ti * R * C, R, C);
        RowMat interior = RowMat::Zero(R, C);
        // interior nodes s_j = (j + 1) dt, 0 <= j < ti
        for (std::size_t j = 0; j < ti; ++j) interior.noalias() += fslice(ti - j - 1) * gslice(j);
        interior *= h * h;
        result = dt * interior;

        RowMat ends = RowMat::Zero(R, C);
        // s = 0: g(0, z, y)
        if (g.zero_limit == TimeZeroLimit::Delta) {
            for (std::size_t c = 0; c < C; ++c) ends.col(c) += fslice(ti).col(g.cols[c]);
        }
        // s = t: f(0, x, z)
        if (f.zero_limit == TimeZeroLimit::Delta) {
            for (std::size_t r = 0; r < R; ++r) ends.row(r) += gslice(ti).row(f.rows[r]);
        }
        result += 0.5 * dt * ends;

        if (unknown && ti > 0) {
            // an unknown endpoint value is bounded by the neighbouring interior sample
            const std::size_t near_s0 = 0;
            const std::size_t near_st = ti - 1;
            double est = 0.0;
            if (g.zero_limit == TimeZeroLimit::Unknown) {
                est += (fslice(ti - near_s0 - 1) * gslice(near_s0)).cwiseAbs().maxCoeff();
            }
            if (f.zero_limit == TimeZeroLimit::Unknown) {
                est += (fslice(ti - near_st - 1) * gslice(near_st)).cwiseAbs().maxCoeff();
            }
            endpoint_err[ti] = 0.5 * dt * h * h * est;
        }
    });
    out.endpoint_error = f.endpoint_error + g.endpoint_error +
                         *std::max_element(endpoint_err.begin(), endpoint_err.end());
    return out;
}

double degree_estimate(const GridKernel& f, int row_node, int col_node, int first, int last) {
    const int r = f.row_of(row_node);
    const int c = f.col_of(col_node);
    if (r < 0 || c < 0) throw UsageError("degree_estimate: node not sampled");
    const int m = static_cast<int>(f.times.size());
    if (last < 0) last = m - 1;
    if (first < 0 || last >= m || last - first + 1 < 4) {
        throw UsageError("degree_estimate: window needs at least 4 ladder times");
    }
    std::vector<std::pair<double, double>> samples;
    for (int t = first; t <= last; ++t) {
        const double v = std::abs(f.at(t, r, c));
        if (!(v > 0.0)) {
            throw DomainError("degree_estimate: zero sample at t = " + std::to_string(f.times[t]));
        }
        samples.emplace_back(f.times[t], v);
    }
    return fit_power_law(samples).slope + 2.0; // (d + 2) / 2 with d = 2
}

VolterraResult volterra_partial_sum(const ParametrixEvaluator& ev, int n_max,
                                    const GridSpec& grid, const std::vector<double>& times,
                                    const std::vector<int>& rows, const std::vector<int>& cols,
                                    unsigned threads) {
    if (n_max < 0 || n_max > 2) throw ConfigError("n_max must be in [0, 2]");
    VolterraResult res;
    const std::vector<int> all = all_nodes(grid);
    if (n_max == 0) {
        res.sum = sample_parametrix(ev, grid, times, rows, cols, threads);
        res.term_sup.push_back(0.0);
        for (std::size_t t = 0; t < times.size(); ++t) {
            res.term_sup[0] = std::max(res.term_sup[0], res.sum.sup_norm(t));
        }
        return res;
    }
    GridKernel k = sample_parametrix(ev, grid, times, rows, all, threads);
    GridKernel R = sample_residual(ev, grid, times, all, n_max >= 2 ? all : cols, threads);

    auto sup_all = [&](const GridKernel& g) {
        double s = 0.0;
        for (std::size_t t = 0; t < g.times.size(); ++t) s = std::max(s, g.sup_norm(t));
        return s;
    };
    auto restrict_cols = [&](const GridKernel& g) {
        GridKernel out = g;
        out.cols = cols;
        out.values.assign(g.times.size() * g.rows.size() * cols.size(), Complex{});
        for (std::size_t t = 0; t < g.times.size(); ++t) {
            for (std::size_t r = 0; r < g.rows.size(); ++r) {
                for (std::size_t c = 0; c < cols.size(); ++c) {
                    out.at(t, r, c) = g.at(t, r, cols[c]);
                }
            }
        }
        return out;
    };

    // R is all x all only when a later term needs it as the middle factor
    const GridKernel Rc = n_max >= 2 ? restrict_cols(R) : R;
    GridKernel sum = restrict_cols(k);
    res.term_sup.push_back(sup_all(sum));
    GridKernel term = std::move(k);
    for (int n = 1; n <= n_max; ++n) {
        term = convolve(term, n == n_max ? Rc : R, threads);
        const GridKernel piece = n == n_max ? term : restrict_cols(term);
        res.term_sup.push_back(sup_all(piece));
        const double sign = (n % 2 == 1) ? -1.0 : 1.0;
        for (std::size_t i = 0; i < sum.values.size(); ++i) sum.values[i] += sign * piece.values[i];
        sum.endpoint_error += piece.endpoint_error;
    }
    sum.zero_limit = TimeZeroLimit::Delta;
    res.sum = std::move(sum);
    return res;
}

namespace {

template <class T>
void put(std::ofstream& os, T v) {
    static_assert(std::is_arithmetic_v<T>);
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
    os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <class T>
T get(std::ifstream& is) {
    unsigned char buf[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(buf), sizeof(T))) {
        throw ConfigError("truncated grid kernel file");
    }
    if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
}

} // namespace

void write_grid_kernel(const GridKernel& k, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    os.write("GKRN", 4);
    put<std::uint32_t>(os, 1);
    put<std::uint32_t>(os, 2);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(k.grid.n));
    put<double>(os, k.grid.L);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(k.times.size()));
    for (double t : k.times) put<double>(os, t);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(k.rows.size()));
    for (int r : k.rows) put<std::uint32_t>(os, static_cast<std::uint32_t>(r));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(k.cols.size()));
    for (int c : k.cols) put<std::uint32_t>(os, static_cast<std::uint32_t>(c));
    put<std::uint8_t>(os, static_cast<std::uint8_t>(k.zero_limit));
    put<double>(os, k.endpoint_error);
    for (const Complex& v : k.values) {
        put<double>(os, v.real());
        put<double>(os, v.imag());
    }
}

GridKernel read_grid_kernel(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open " + path);
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, "GKRN", 4) != 0) {
        throw ConfigError(path + " is not a grid kernel file");
    }
    if (get<std::uint32_t>(is) != 1) throw ConfigError("unsupported grid kernel version");
    if (get<std::uint32_t>(is) != 2) throw ConfigError("grid kernel dimension must be 2");
    GridKernel k;
    k.grid.n = static_cast<int>(get<std::uint32_t>(is));
    k.grid.L = get<double>(is);
    const auto m = get<std::uint32_t>(is);
    for (std::uint32_t i = 0; i < m; ++i) k.times.push_back(get<double>(is));
    const auto nr = get<std::uint32_t>(is);
    for (std::uint32_t i = 0; i < nr; ++i) k.rows.push_back(static_cast<int>(get<std::uint32_t>(is)));
    const auto nc = get<std::uint32_t>(is);
    for (std::uint32_t i = 0; i < nc; ++i) k.cols.push_back(static_cast<int>(get<std::uint32_t>(is)));
    const auto limit = get<std::uint8_t>(is);
    if (limit > 2) throw ConfigError("bad zero-limit tag in grid kernel file");
    k.zero_limit = static_cast<TimeZeroLimit>(limit);
    k.endpoint_error = get<double>(is);
    const std::size_t count = static_cast<std::size_t>(m) * nr * nc;
    k.values.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double re = get<double>(is);
        const double im = get<double>(is);
        k.values[i] = {re, im};
    }
    return k;
}

void write_grid_kernel_csv(const GridKernel& k, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    os << std::setprecision(17) << "t,x1,x2,y1,y2,re,im\n";
    for (std::size_t t = 0; t < k.times.size(); ++t) {
        for (std::size_t r = 0; r < k.rows.size(); ++r) {
            const Point x = k.node_point(k.rows[r]);
            for (std::size_t c = 0; c < k.cols.size(); ++c) {
                const Point y = k.node_point(k.cols[c]);
                const Complex v = k.at(t, r, c);
                os << k.times[t] << ',' << x[0] << ',' << x[1] << ',' << y[0] << ',' << y[1] << ','
                   << v.real() << ',' << v.imag() << '\n';
            }
        }
    }
}

} // namespace magheat
