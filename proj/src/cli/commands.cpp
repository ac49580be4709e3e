#include "magheat/cli.hpp"
#include "magheat/errors.hpp"
#include "magheat/parallel.hpp"
#include "magheat/volterra.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>

namespace magheat::cli {

using nlohmann::ordered_json;

namespace {

std::vector<std::string> coordinate_names(const std::string& prefix, int d) {
    std::vector<std::string> out;
    for (int i = 0; i < d; ++i) out.push_back(prefix + std::to_string(i + 1));
    return out;
}

ordered_json point_json(const Point& p) {
    ordered_json a = ordered_json::array();
    for (int i = 0; i < p.size(); ++i) a.push_back(p[i]);
    return a;
}

void warn(const ParametrixEvaluator& ev) {
    if (ev.warning()) std::cerr << "warning: " << *ev.warning() << "\n";
}

// Mehler comparisons need the symmetric gauge with V = 0 as built in.
bool is_plain_constant_field(const RunConfig& rc) {
    return rc.field.builtin == "constant_field" && rc.cfg.V.is_zero() && rc.field.gauge.empty();
}

Point snap_to_grid(const GridSpec& g, const Point& y) {
    Point out(2);
    out << g.node(g.nearest(y[0])), g.node(g.nearest(y[1]));
    return out;
}

ordered_json fit_json(const PowerLawFit& fit) {
    return {{"slope", fit.slope},
            {"slope_stderr", fit.slope_stderr},
            {"intercept", fit.intercept},
            {"rms", fit.rms}};
}

} // namespace

int cmd_invariants(const RunConfig& rc) {
    const int d = rc.cfg.d;
    const std::vector<Point> pts = rc.resolved_points();
    const ParametrixEvaluator ev(rc.cfg, std::max(rc.N, rc.k_max - 1), rc.quad);
    warn(ev);
    std::vector<std::vector<Complex>> a(pts.size());
    parallel_for(pts.size(), rc.threads, [&](std::size_t i) {
        for (int k = 0; k <= rc.k_max; ++k) a[i].push_back(ev.heat_invariant(k, pts[i]));
    });

    auto header = coordinate_names("x", d);
    header.insert(header.end(), {"k", "re", "im"});
    CsvWriter csv(output_path(rc, "invariants.csv"), header);
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (int k = 0; k <= rc.k_max; ++k) {
            for (int j = 0; j < d; ++j) csv << pts[i][j];
            csv << k << a[i][k].real() << a[i][k].imag();
            csv.end_row();
        }
    }
    std::cout << "invariants: " << pts.size() << " points, k <= " << rc.k_max << "\n";
    for (std::size_t i = 0; i < pts.size() && i < 8; ++i) {
        std::cout << "  x = (";
        for (int j = 0; j < d; ++j) std::cout << (j ? ", " : "") << pts[i][j];
        std::cout << ")";
        for (int k = 1; k <= rc.k_max; ++k) std::cout << "  a" << k << " = " << a[i][k].real();
        std::cout << "\n";
    }
    ordered_json result = {{"points", pts.size()}, {"k_max", rc.k_max}};
    if (ev.warning()) result["warning"] = *ev.warning();
    write_summary(output_path(rc, "invariants.json"), "invariants", rc, result);
    return kExitOk;
}

int cmd_residual_scan(const RunConfig& rc) {
    const int d = rc.cfg.d;
    const ParametrixEvaluator ev(rc.cfg, rc.N, rc.quad);
    warn(ev);
    const std::vector<double> times = rc.ladder.resolve();
    const double expected = rc.expected_slope.value_or(rc.N + 1.0 - d / 2.0);

    auto header = std::vector<std::string>{"pair", "t"};
    for (auto& n : coordinate_names("x", d)) header.push_back(n);
    for (auto& n : coordinate_names("y", d)) header.push_back(n);
    header.insert(header.end(), {"re", "im", "abs", "scaled"});
    CsvWriter csv(output_path(rc, "residual_scan.csv"), header);

    ordered_json pairs = ordered_json::array();
    bool all_pass = true;
    for (std::size_t p = 0; p < rc.pairs.size(); ++p) {
        const auto& [x, y] = rc.pairs[p];
        const double r2 = (x - y).squaredNorm();
        std::vector<std::pair<double, double>> samples;
        bool zero = true;
        for (double t : times) {
            const Complex R = ev.residual(t, x, y);
            // the Gaussian envelope is divided out so that off-diagonal pairs
            // fit a pure power of t
            const double scaled = std::abs(R) * std::exp(r2 / (4.0 * t));
            samples.emplace_back(t, scaled);
            zero = zero && std::abs(R) == 0.0;
            csv << static_cast<long long>(p) << t;
            for (int j = 0; j < d; ++j) csv << x[j];
            for (int j = 0; j < d; ++j) csv << y[j];
            csv << R.real() << R.imag() << std::abs(R) << scaled;
            csv.end_row();
        }
        ordered_json entry = {{"x", point_json(x)}, {"y", point_json(y)}};
        if (zero) {
            entry["status"] = "identically zero";
            std::cout << "pair " << p << ": residual identically zero\n";
        } else {
            const PowerLawFit fit = fit_power_law(samples);
            const bool pass = std::abs(fit.slope - expected) <= rc.band;
            all_pass = all_pass && pass;
            entry["status"] = pass ? "pass" : "fail";
            entry["fit"] = fit_json(fit);
            std::cout << "pair " << p << ": slope " << fit.slope << " (expected " << expected
                      << " +- " << rc.band << ") " << (pass ? "PASS" : "FAIL") << "\n";
        }
        pairs.push_back(entry);
    }
    ordered_json result = {{"expected_slope", expected}, {"band", rc.band}, {"pairs", pairs},
                           {"pass", all_pass}};
    write_summary(output_path(rc, "residual_scan.json"), "residual-scan", rc, result);
    return all_pass ? kExitOk : kExitBand;
}

int cmd_mehler_compare(const RunConfig& rc) {
    if (!is_plain_constant_field(rc))
        throw ConfigError("mehler-compare needs field.builtin = constant_field with V = 0 and no gauge");
    const ParametrixEvaluator ev(rc.cfg, rc.N, rc.quad);
    warn(ev);
    const MehlerParams mp{rc.field.B};
    const std::vector<double> times = rc.ladder.resolve();

    CsvWriter csv(output_path(rc, "mehler_compare.csv"),
                  {"pair", "t", "x1", "x2", "y1", "y2", "re_k", "im_k", "re_mehler", "im_mehler",
                   "abs_err", "scaled_err"});
    std::vector<double> sup(times.size(), 0.0);
    ordered_json pairs = ordered_json::array();
    bool all_pass = true;
    for (std::size_t p = 0; p < rc.pairs.size(); ++p) {
        const auto& [x, y] = rc.pairs[p];
        const double r2 = (x - y).squaredNorm();
        std::vector<std::pair<double, double>> samples;
        bool zero = true;
        for (std::size_t i = 0; i < times.size(); ++i) {
            const double t = times[i];
            const Complex k = ev.kernel(t, x, y);
            const Complex K = mehler_kernel(mp, t, x, y);
            const double err = std::abs(k - K);
            const double scaled = err * 4.0 * std::numbers::pi * t * std::exp(r2 / (4.0 * t));
            sup[i] = std::max(sup[i], err);
            zero = zero && err == 0.0;
            samples.emplace_back(t, scaled);
            csv << static_cast<long long>(p) << t << x[0] << x[1] << y[0] << y[1] << k.real()
                << k.imag() << K.real() << K.imag() << err << scaled;
            csv.end_row();
        }
        ordered_json entry = {{"x", point_json(x)}, {"y", point_json(y)}};
        if (zero) {
            entry["status"] = "zero error";
            std::cout << "pair " << p << ": zero error\n";
        } else {
            const PowerLawFit fit = fit_power_law(samples);
            entry["remainder_order"] = fit_json(fit);
            std::cout << "pair " << p << ": remainder order " << fit.slope;
            if (rc.expected_slope) {
                const bool pass = std::abs(fit.slope - *rc.expected_slope) <= rc.band;
                all_pass = all_pass && pass;
                entry["status"] = pass ? "pass" : "fail";
                std::cout << " (expected " << *rc.expected_slope << " +- " << rc.band << ") "
                          << (pass ? "PASS" : "FAIL");
            }
            std::cout << "\n";
        }
        pairs.push_back(entry);
    }
    ordered_json sup_json = ordered_json::array();
    for (std::size_t i = 0; i < times.size(); ++i)
        sup_json.push_back({{"t", times[i]}, {"sup_abs_err", sup[i]}});
    ordered_json result = {{"pairs", pairs}, {"sup", sup_json}, {"pass", all_pass}};
    write_summary(output_path(rc, "mehler_compare.json"), "mehler-compare", rc, result);
    return all_pass ? kExitOk : kExitBand;
}

int cmd_volterra(const RunConfig& rc) {
    if (rc.cfg.d != 2) throw ConfigError("volterra runs on d = 2 grids");
    const auto& vs = rc.volterra;
    GridSpec grid = vs.grid;
    grid.validate();
    const ParametrixEvaluator ev(rc.cfg, rc.N, rc.quad);
    warn(ev);
    const std::vector<double> times = uniform_ladder(vs.dt, vs.m);
    const Point y = snap_to_grid(grid, vs.y);
    const std::vector<int> rows = nodes_near(grid, y, vs.row_radius);
    const std::vector<int> cols = {grid.nearest(y[0]) * grid.n + grid.nearest(y[1])};

    const auto start = std::chrono::steady_clock::now();
    const VolterraResult res = volterra_partial_sum(ev, vs.n_max, grid, times, rows, cols, rc.threads);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    write_grid_kernel_csv(res.sum, output_path(rc, "volterra.csv"));
    if (vs.write_binary) write_grid_kernel(res.sum, output_path(rc, "volterra.gkrn"));

    ordered_json term_sup = res.term_sup;
    ordered_json result = {{"y", point_json(y)},
                           {"rows", rows.size()},
                           {"times", times},
                           {"term_sup", term_sup},
                           {"endpoint_error", res.sum.endpoint_error},
                           {"seconds", seconds}};
    std::cout << "volterra: n_max " << vs.n_max << ", " << rows.size() << " rows, t_max "
              << times.back() << "\n";
    for (std::size_t n = 0; n < res.term_sup.size(); ++n)
        std::cout << "  term " << n << " sup " << res.term_sup[n] << "\n";

    if (is_plain_constant_field(rc)) {
        // error at the last time against the exact kernel, for k_N alone and the sum
        const std::size_t tl = times.size() - 1;
        const MehlerParams mp{rc.field.B};
        double e_sum = 0.0, e_k = 0.0;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const Point x = res.sum.node_point(rows[r]);
            const Complex K = mehler_kernel(mp, times[tl], x, y);
            e_sum = std::max(e_sum, std::abs(res.sum.at(tl, r, 0) - K));
            e_k = std::max(e_k, std::abs(ev.kernel(times[tl], x, y) - K));
        }
        result["mehler"] = {{"t", times[tl]},
                            {"sup_err_parametrix", e_k},
                            {"sup_err_partial_sum", e_sum},
                            {"improvement", e_sum > 0.0 ? e_k / e_sum : 0.0}};
        std::cout << "  Mehler sup error at t = " << times[tl] << ": k_N " << e_k << ", sum "
                  << e_sum << "\n";
    }
    write_summary(output_path(rc, "volterra.json"), "volterra", rc, result);
    return kExitOk;
}

int cmd_quotient(const RunConfig& rc) {
    if (rc.cfg.d != 2) throw ConfigError("quotient kernels need d = 2");
    const auto& q = rc.quotient;
    const ParametrixEvaluator ev(rc.cfg, std::max(rc.N, q.k_max - 1), rc.quad);
    warn(ev);
    ordered_json result = {{"kind", to_string(q.spec.kind)}, {"t", q.t}};

    std::vector<DiagonalExpansion> expansions(q.points.size());
    if (q.spec.kind == QuotientSpec::Kind::HalfPlane) {
        const HalfPlaneParametrix hp(ev, q.spec.bc, 64, q.spec.check_tol);
        const auto& rep = hp.report();
        result["bc"] = to_string(q.spec.bc);
        result["symmetry"] = {{"potential", rep.potential},
                              {"vector_potential", rep.vector_potential},
                              {"boundary_derivatives", rep.boundary_derivatives},
                              {"field_reflection", rep.field_reflection}};
        parallel_for(q.points.size(), rc.threads, [&](std::size_t i) {
            expansions[i] = half_plane_diagonal_expansion(ev, q.spec.bc, q.t, q.points[i], q.k_max);
        });
    } else {
        const LatticeQuotient lq(rc.cfg, q.spec);
        const auto& rep = lq.report();
        ordered_json offsets = ordered_json::array();
        for (const auto& c : rep.offsets) offsets.push_back(point_json(c));
        result["lattice"] = {{"potential", rep.potential},
                             {"gauge_offset", rep.gauge_offset},
                             {"offsets", offsets},
                             {"flux", rep.flux},
                             {"flux_quantized", rep.flux_quantized}};
        parallel_for(q.points.size(), rc.threads, [&](std::size_t i) {
            expansions[i] = lq.diagonal_expansion(ev, q.t, q.points[i], q.k_max);
        });
        // K(x + e, y) = exp(i chi_e(x)) K(x, y) for each generator e
        if (!q.points.empty()) {
            const KernelFunction f = [&](double t, const Point& a, const Point& b) {
                return ev.kernel(t, a, b);
            };
            const Point& x = q.points.front();
            const Point y = Point::Zero(2);
            const ImageSum base = lq.image_sum(f, q.t, x, y);
            double dev = 0.0;
            for (int i = 0; i < lq.rank(); ++i) {
                std::vector<int> e(lq.rank(), 0);
                e[i] = 1;
                const ImageSum shifted = lq.image_sum(f, q.t, lq.translate(x, e), y);
                const Complex expect = std::exp(Complex(0.0, lq.phase(e, x))) * base.value;
                dev = std::max(dev, std::abs(shifted.value - expect));
            }
            result["periodicity_deviation"] = dev;
            result["image_sum_tail_bound"] = base.tail_bound;
        }
    }

    CsvWriter csv(output_path(rc, "quotient.csv"),
                  {"x1", "x2", "k", "re_plane", "im_plane", "re_quotient", "im_quotient",
                   "image_bound", "abs_diff"});
    bool within = true;
    for (std::size_t i = 0; i < q.points.size(); ++i) {
        const auto& ex = expansions[i];
        for (int k = 0; k <= q.k_max; ++k) {
            const double diff = std::abs(ex.quotient[k] - ex.plane[k]);
            within = within && diff <= ex.image_bound[k] * (1.0 + 1e-12) + 1e-15;
            csv << q.points[i][0] << q.points[i][1] << k << ex.plane[k].real()
                << ex.plane[k].imag() << ex.quotient[k].real() << ex.quotient[k].imag()
                << ex.image_bound[k] << diff;
            csv.end_row();
        }
    }
    result["within_image_bound"] = within;
    std::cout << "quotient " << to_string(q.spec.kind) << ": " << q.points.size()
              << " points, invariants within image bound: " << (within ? "yes" : "no") << "\n";
    write_summary(output_path(rc, "quotient.json"), "quotient", rc, result);
    return within ? kExitOk : kExitBand;
}

int cmd_cn_oracle(const RunConfig& rc) {
    if (rc.cfg.d != 2) throw ConfigError("cn-oracle runs on d = 2 grids");
    const auto& cs = rc.cn;
    const Point y = snap_to_grid(cs.grid, cs.y);
    const auto start = std::chrono::steady_clock::now();
    const CrankNicolsonResult cn = crank_nicolson_evolve(cs.grid, rc.cfg, y, cs.T);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (cs.write_grid) write_grid_csv(cn, output_path(rc, "cn_grid.csv"));

    const ParametrixEvaluator ev(rc.cfg, rc.N, rc.quad);
    warn(ev);
    const int n = cs.grid.n;
    std::vector<int> near;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            Point x(2);
            x << cs.grid.node(i), cs.grid.node(j);
            if ((x - y).norm() <= cs.compare_radius) near.push_back(i * n + j);
        }
    }
    std::vector<Complex> kN(near.size()), mehler(near.size());
    const bool with_mehler = is_plain_constant_field(rc);
    parallel_for(near.size(), rc.threads, [&](std::size_t idx) {
        Point x(2);
        x << cs.grid.node(near[idx] / n), cs.grid.node(near[idx] % n);
        kN[idx] = ev.kernel(cs.T, x, y);
        if (with_mehler) mehler[idx] = mehler_kernel({rc.field.B}, cs.T, x, y);
    });

    CsvWriter csv(output_path(rc, "cn_oracle.csv"),
                  {"x1", "x2", "re_cn", "im_cn", "re_k", "im_k", "re_mehler", "im_mehler"});
    double err_k = 0.0, err_m = 0.0, err_km = 0.0, scale = 0.0, mscale = 0.0;
    for (std::size_t idx = 0; idx < near.size(); ++idx) {
        const int i = near[idx] / n, j = near[idx] % n;
        const Complex c = cn.at(i, j);
        scale = std::max(scale, std::abs(c));
        err_k = std::max(err_k, std::abs(kN[idx] - c));
        if (with_mehler) {
            mscale = std::max(mscale, std::abs(mehler[idx]));
            err_m = std::max(err_m, std::abs(mehler[idx] - c));
            err_km = std::max(err_km, std::abs(mehler[idx] - kN[idx]));
        }
        csv << cs.grid.node(i) << cs.grid.node(j) << c.real() << c.imag() << kN[idx].real()
            << kN[idx].imag() << (with_mehler ? mehler[idx].real() : 0.0)
            << (with_mehler ? mehler[idx].imag() : 0.0);
        csv.end_row();
    }
    ordered_json result = {{"y", point_json(y)},
                           {"steps", cn.steps},
                           {"max_cg_iterations", cn.max_iterations},
                           {"compared_nodes", near.size()},
                           {"rel_sup_err_parametrix_vs_cn", scale > 0 ? err_k / scale : 0.0},
                           {"seconds", seconds}};
    std::cout << "cn-oracle: T = " << cs.T << ", " << cn.steps << " steps, relative sup error k_"
              << rc.N << " vs CN " << (scale > 0 ? err_k / scale : 0.0) << "\n";
    if (with_mehler) {
        result["rel_sup_err_mehler_vs_cn"] = scale > 0 ? err_m / scale : 0.0;
        result["rel_sup_err_parametrix_vs_mehler"] = mscale > 0 ? err_km / mscale : 0.0;
        std::cout << "  Mehler vs CN " << err_m / scale << ", k_" << rc.N << " vs Mehler "
                  << err_km / mscale << "\n";
    }
    write_summary(output_path(rc, "cn_oracle.json"), "cn-oracle", rc, result);
    return kExitOk;
}

int cmd_selftest(const RunConfig& rc) {
    struct Check {
        std::string name;
        double value;
        double tol;
    };
    std::vector<Check> checks;
    const QuadratureOptions quad = rc.quad;

    {
        const ParametrixEvaluator ev(constant_field(1.0), 1, quad);
        Point x(2);
        x << 0.3, -0.7;
        checks.push_back({"constant field a1 = 0", std::abs(ev.heat_invariant(1, x)), 1e-8});
        checks.push_back(
            {"constant field a2 = -1/6", std::abs(ev.heat_invariant(2, x) + 1.0 / 6.0), 1e-6});
        Point y(2);
        y << -0.2, 0.4;
        checks.push_back({"u1 closed form", std::abs(ev.u(1, x, y) - ev.u1_closed_form(x, y)), 1e-9});
        const double t = 0.01;
        const double rel = std::abs(ev.kernel(t, x, y) - mehler_kernel({1.0}, t, x, y)) /
                           std::abs(mehler_kernel({1.0}, t, x, y));
        checks.push_back({"Mehler agreement at t = 0.01", rel, 1e-5});
    }
    {
        const FieldConfig cfg = FieldConfig::from_strings(2, "(+ (^ x1 2) (sin x2))",
                                                          {"(* -0.5 (^ x2 3))", "(* x1 x2)"});
        const ParametrixEvaluator ev(cfg, 1, quad);
        Point x(2), y(2);
        x << 0.4, 0.1;
        y << -0.3, 0.5;
        checks.push_back(
            {"covariant derivative identity", ev.check_covariant_derivative_identity(x, y), 1e-8});
        checks.push_back({"u1 closed form, polynomial A",
                          std::abs(ev.u(1, x, y) - ev.u1_closed_form(x, y)), 1e-9});
        const double t = 0.02;
        const Complex R = ev.residual(t, x, x);
        const Complex D = ev.heat_operator_defect(t, x, x);
        checks.push_back({"residual vs heat operator defect", std::abs(R - D) / std::abs(R), 1e-3});
        checks.push_back(
            {"a1 = -V", std::abs(ev.heat_invariant(1, x) + cfg.V.evaluate(as_span(x))), 1e-10});
    }

    bool ok = true;
    ordered_json rows = ordered_json::array();
    CsvWriter csv(output_path(rc, "selftest.csv"), {"check", "value", "tol", "pass"});
    for (const auto& c : checks) {
        const bool pass = std::isfinite(c.value) && c.value <= c.tol;
        ok = ok && pass;
        std::cout << (pass ? "PASS " : "FAIL ") << c.name << ": " << c.value << " (tol " << c.tol
                  << ")\n";
        csv << c.name << c.value << c.tol << static_cast<long long>(pass);
        csv.end_row();
        rows.push_back({{"check", c.name}, {"value", c.value}, {"tol", c.tol}, {"pass", pass}});
    }
    write_summary(output_path(rc, "selftest.json"), "selftest", rc, {{"checks", rows}, {"pass", ok}});
    return ok ? kExitOk : kExitBand;
}

int run_command(const std::string& name, const GlobalOptions& opts) {
    try {
        const RunConfig rc = resolve_config(opts);
        if (name == "invariants") return cmd_invariants(rc);
        if (name == "residual-scan") return cmd_residual_scan(rc);
        if (name == "mehler-compare") return cmd_mehler_compare(rc);
        if (name == "volterra") return cmd_volterra(rc);
        if (name == "quotient") return cmd_quotient(rc);
        if (name == "cn-oracle") return cmd_cn_oracle(rc);
        if (name == "selftest") return cmd_selftest(rc);
        std::cerr << "error: unknown command '" << name << "'\n";
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const UsageError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const EvaluationError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const DomainError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

} // namespace magheat::cli
