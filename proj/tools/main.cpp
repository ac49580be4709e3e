#include "magheat/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace magheat::cli;
    CLI::App app{"Small-time heat kernels for magnetic Schroedinger operators"};
    app.set_version_flag("--version", std::string(version_string()));
    app.require_subcommand(1);

    GlobalOptions opts;
    std::string config, out;
    int line_nodes = 0, double_nodes = 0;
    unsigned threads = 0;
    std::uint64_t seed = 0;
    auto* o_config = app.add_option("--config", config, "JSON run config")->check(CLI::ExistingFile);
    auto* o_out = app.add_option("--out", out, "output directory (default: output.dir or ./out)");
    auto* o_line = app.add_option("--line-nodes", line_nodes, "Gauss-Legendre nodes for line integrals");
    auto* o_double =
        app.add_option("--double-nodes", double_nodes, "nodes per axis for the double integrals");
    auto* o_threads = app.add_option("--threads", threads, "worker threads");
    auto* o_seed = app.add_option("--seed", seed, "seed for random sample points");

    const std::pair<const char*, const char*> commands[] = {
        {"invariants", "heat invariants a_k(x) = u_k(x, x) at listed points"},
        {"residual-scan", "|R_N| over a time ladder with a fitted power law"},
        {"mehler-compare", "k_N against the exact constant-field kernel"},
        {"volterra", "Volterra partial sums on a grid"},
        {"quotient", "half-plane, cylinder and torus diagonal expansions"},
        {"cn-oracle", "Crank-Nicolson reference kernel and comparison with k_N"},
        {"selftest", "built-in consistency checks"},
    };
    for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }
    if (*o_config) opts.config_path = config;
    if (*o_out) opts.out_dir = out;
    if (*o_line) opts.line_nodes = line_nodes;
    if (*o_double) opts.double_nodes = double_nodes;
    if (*o_threads) opts.threads = threads;
    if (*o_seed) opts.seed = seed;
    return run_command(app.get_subcommands().front()->get_name(), opts);
}
