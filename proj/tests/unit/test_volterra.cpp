#include "magheat/errors.hpp"
#include "magheat/volterra.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace magheat;

namespace {

Point pt(double a, double b) {
    Point p(2);
    p << a, b;
    return p;
}

Complex free2(double t, const Point& x, const Point& y) { return free_kernel(2, t, x, y); }

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

int center(const GridSpec& g) { return g.nearest(0.0) * g.n + g.nearest(0.0); }

} // namespace

TEST_CASE("sampled kernels read back exactly") {
    const GridSpec g{2.0, 16, 1e-3};
    const auto times = uniform_ladder(0.05, 3);
    const auto rows = nodes_near(g, pt(0, 0), 0.5);
    const std::vector<int> cols = {center(g), 3};
    const GridKernel k = sample_kernel(free2, g, times, rows, cols, TimeZeroLimit::Delta);
    for (std::size_t t = 0; t < times.size(); ++t)
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (std::size_t c = 0; c < cols.size(); ++c)
                CHECK(k.at(t, r, c) == free2(times[t], k.node_point(rows[r]), k.node_point(cols[c])));

    const ParametrixEvaluator ev(constant_field(1.0), 0, {8, 6});
    const GridKernel p = sample_parametrix(ev, g, times, rows, cols);
    CHECK(std::abs(p.at(2, 1, 1) - ev.kernel(times[2], p.node_point(rows[1]), p.node_point(cols[1]))) < 1e-15);

    const ParametrixEvaluator zero(FieldConfig::from_strings(2, "0", {"0", "0"}), 1);
    const GridKernel R = sample_residual(zero, g, times, rows, cols);
    for (const Complex& v : R.values) CHECK(v == Complex{});
}

TEST_CASE("grid helpers and limits") {
    const GridSpec g{2.0, 16, 1e-3};
    CHECK(all_nodes(g).size() == 256);
    const auto near = nodes_near(g, pt(0, 0), 0.0);
    REQUIRE(near.size() == 1);
    CHECK(near[0] == center(g));
    CHECK(uniform_ladder(0.1, 3) == std::vector<double>{0.1, 0.2, 0.30000000000000004});
    CHECK_THROWS_AS(uniform_ladder(0.0, 3), ConfigError);
    const GridSpec big{2.0, 256, 1e-3};
    CHECK_THROWS_AS(sample_kernel(free2, big, {0.1}, {0}, {0}, TimeZeroLimit::Delta), ConfigError);
    CHECK_THROWS_AS(sample_kernel(free2, g, uniform_ladder(0.01, 25), {0}, {0}, TimeZeroLimit::Delta),
                    ConfigError);
    CHECK_THROWS_AS(sample_kernel(free2, g, {0.1}, {1000}, {0}, TimeZeroLimit::Delta), UsageError);
}

TEST_CASE("convolution with zero and mismatched inputs") {
    const GridSpec g{2.0, 16, 1e-3};
    const auto times = uniform_ladder(0.05, 4);
    const auto all = all_nodes(g);
    const GridKernel f = sample_kernel(free2, g, times, {center(g)}, all, TimeZeroLimit::Delta);
    const GridKernel z = sample_kernel([](double, const Point&, const Point&) { return Complex{}; }, g,
                                       times, all, {center(g)}, TimeZeroLimit::Zero);
    const GridKernel fz = convolve(f, z);
    for (const Complex& v : fz.values) CHECK(v == Complex{});

    const GridSpec other{3.0, 16, 1e-3};
    const GridKernel zo = sample_kernel([](double, const Point&, const Point&) { return Complex{}; },
                                        other, times, all_nodes(other), {0}, TimeZeroLimit::Zero);
    CHECK_THROWS_AS(convolve(f, zo), UsageError);
    const GridKernel partial = sample_kernel(free2, g, times, {0}, {0, 1}, TimeZeroLimit::Delta);
    CHECK_THROWS_AS(convolve(partial, z), UsageError);
    const GridKernel shifted = sample_kernel(free2, g, uniform_ladder(0.04, 4), all, {0}, TimeZeroLimit::Delta);
    CHECK_THROWS_AS(convolve(f, shifted), UsageError);
}

TEST_CASE("free kernel composes to t K0 with additive degree") {
    const GridSpec g{5.0, 64, 1e-3};
    const auto times = uniform_ladder(0.05, 10);
    const auto all = all_nodes(g);
    const int c = center(g);
    const auto rows = nodes_near(g, pt(0, 0), 0.6);
    const GridKernel f = sample_kernel(free2, g, times, rows, all, TimeZeroLimit::Delta);
    const GridKernel h = sample_kernel(free2, g, times, all, {c}, TimeZeroLimit::Delta);
    const GridKernel fh = convolve(f, h);
    double err = 0, scale = 0;
    const std::size_t last = times.size() - 1;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const Complex exact = times[last] * free2(times[last], fh.node_point(rows[r]), fh.node_point(c));
        err = std::max(err, std::abs(fh.at(last, r, 0) - exact));
        scale = std::max(scale, std::abs(exact));
    }
    CHECK(err / scale < 0.02);
    CHECK(degree_estimate(h, c, c) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(degree_estimate(fh, c, c, 2) - 2.0) < 0.1);

    const GridKernel zero = sample_kernel([](double, const Point&, const Point&) { return Complex{}; },
                                          g, times, {c}, {c}, TimeZeroLimit::Zero);
    CHECK_THROWS_AS(degree_estimate(zero, c, c), DomainError);
}

TEST_CASE("Volterra partial sums in trivial cases") {
    const GridSpec g{2.0, 16, 1e-3};
    const auto times = uniform_ladder(0.02, 4);
    const auto rows = nodes_near(g, pt(0, 0), 0.3);
    const std::vector<int> cols = {center(g)};
    const ParametrixEvaluator ev(constant_field(1.0), 0, {8, 6});
    const VolterraResult r0 = volterra_partial_sum(ev, 0, g, times, rows, cols);
    const GridKernel k = sample_parametrix(ev, g, times, rows, cols);
    CHECK(r0.sum.values == k.values);

    const ParametrixEvaluator free(FieldConfig::from_strings(2, "0", {"0", "0"}), 0, {8, 6});
    const VolterraResult r2 = volterra_partial_sum(free, 2, g, times, rows, cols);
    const GridKernel k0 = sample_parametrix(free, g, times, rows, cols);
    for (std::size_t i = 0; i < k0.values.size(); ++i) CHECK(r2.sum.values[i] == k0.values[i]);
    CHECK(r2.term_sup.size() == 3);
    CHECK(r2.term_sup[1] == 0.0);
    CHECK_THROWS_AS(volterra_partial_sum(ev, 3, g, times, rows, cols), ConfigError);
}

TEST_CASE("grid kernel serialization round trip") {
    const GridSpec g{2.0, 16, 1e-3};
    const auto times = uniform_ladder(0.05, 3);
    GridKernel k = sample_kernel(
        [](double t, const Point& x, const Point& y) { return Complex(t + x[0], y[1] - t); }, g, times,
        {0, 5, 17}, {3, 200}, TimeZeroLimit::Unknown);
    k.endpoint_error = 0.125;
    const std::string path = temp_path("magheat_roundtrip.gkrn");
    write_grid_kernel(k, path);
    const GridKernel back = read_grid_kernel(path);
    CHECK(back.grid.n == 16);
    CHECK(back.grid.L == 2.0);
    CHECK(back.times == times);
    CHECK(back.rows == k.rows);
    CHECK(back.cols == k.cols);
    CHECK(back.zero_limit == TimeZeroLimit::Unknown);
    CHECK(back.endpoint_error == 0.125);
    CHECK(back.values == k.values);
    // header magic and size
    std::ifstream in(path, std::ios::binary);
    char magic[4];
    in.read(magic, 4);
    CHECK(std::string(magic, 4) == "GKRN");
    const auto bytes = std::filesystem::file_size(path);
    const std::size_t header = 4 + 4 + 4 + 4 + 8 + 4 + 8 * 3 + 4 + 4 * 3 + 4 + 4 * 2 + 1 + 8;
    CHECK(bytes == header + 16 * k.values.size());
    std::filesystem::remove(path);

    const std::string bad = temp_path("magheat_bad.gkrn");
    std::ofstream(bad, std::ios::binary) << "NOPE";
    CHECK_THROWS(read_grid_kernel(bad));
    std::filesystem::remove(bad);

    const std::string csv = temp_path("magheat_kernel.csv");
    write_grid_kernel_csv(k, csv);
    std::ifstream cin(csv);
    std::string header_line;
    std::getline(cin, header_line);
    CHECK(header_line == "t,x1,x2,y1,y2,re,im");
    int lines = 0;
    for (std::string l; std::getline(cin, l);) ++lines;
    CHECK(lines == static_cast<int>(k.values.size()));
    std::filesystem::remove(csv);
}
