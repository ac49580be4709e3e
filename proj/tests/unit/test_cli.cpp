#include "magheat/cli.hpp"
#include "magheat/errors.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace magheat;
using namespace magheat::cli;

namespace {

std::string config_error(const std::string& text) {
    try {
        parse_run_config(text, "cfg.json");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& name)
        : path(std::filesystem::temp_directory_path() / name) {
        std::filesystem::remove_all(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

RunConfig with_out(RunConfig rc, const TempDir& d) {
    rc.out_dir = d.path.string();
    return rc;
}

} // namespace

TEST_CASE("config diagnostics carry line and column") {
    CHECK(config_error("{\n  \"field\": {\"d\": 2},\n  \"bogus\": 1\n}") ==
          "cfg.json:3:3: unknown key 'bogus' in /");
    CHECK(config_error("{\"field\": {\"d\": 2, \"Vx\": \"1\"}}").find("1:20: unknown key 'Vx' in /field") !=
          std::string::npos);
    const std::string bad_expr = config_error("{\"field\": {\"V\": \"(+ x1 (cos))\"}}");
    CHECK(bad_expr.find("cfg.json:1:17: /field/V: field expression, line 1, column") != std::string::npos);
    CHECK(config_error("{\"N\": 1,\n \"k_max\": }").find("cfg.json:2:") != std::string::npos);
    CHECK(config_error("{\"N\": -1}").find("/N") != std::string::npos);
    CHECK(config_error("{\"field\": {\"builtin\": \"magic\"}}").find("expected one of") != std::string::npos);
    CHECK(config_error("{\"field\": {\"d\": 3, \"A\": [\"0\", \"0\"]}}") != "");
    CHECK(config_error("{\"pairs\": [{\"x\": [0, 0]}]}").find("needs both x and y") != std::string::npos);
    CHECK(config_error("{\"quotient\": {\"kind\": \"torus\", \"generators\": [[1, 0], [1, 1]]}}") != "");
    CHECK(config_error("{\"volterra\": {\"grid\": {\"n\": 256}}}") != "");
    CHECK(config_error("{}") == "");
}

TEST_CASE("resolved config echoes every default") {
    const RunConfig rc = parse_run_config("{}", "<defaults>");
    const auto j = rc.to_json();
    for (const char* key : {"field", "N", "k_max", "quadrature", "points", "pairs", "times", "cn",
                            "volterra", "quotient", "band", "output", "seed", "threads"})
        CHECK(j.contains(key));
    CHECK(j["quadrature"]["line_nodes"] == 16);
    CHECK(j["times"]["values"].size() == 7);
    CHECK(j["cn"]["grid"]["n"] == 128);
    // the echo parses back to the same resolved document
    auto reparsed_src = j;
    reparsed_src.erase("source");
    reparsed_src["field"].erase("resolved");
    reparsed_src["times"].erase("values");
    const RunConfig back = parse_run_config(reparsed_src.dump(), "<echo>");
    auto again = back.to_json();
    again["source"] = "<defaults>";
    CHECK(again == j);
}

TEST_CASE("random points are reproducible from the seed") {
    const RunConfig a = parse_run_config("{\"random_points\": 4, \"seed\": 9}");
    const RunConfig b = parse_run_config("{\"random_points\": 4, \"seed\": 9}");
    const RunConfig c = parse_run_config("{\"random_points\": 4, \"seed\": 10}");
    const auto pa = a.resolved_points(), pb = b.resolved_points(), pc = c.resolved_points();
    REQUIRE(pa.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(pa[i] == pb[i]);
    CHECK(pa[0] != pc[0]);
}

TEST_CASE("invariants command") {
    TempDir dir("magheat_cli_inv");
    const RunConfig rc = with_out(
        parse_run_config(R"J({"field": {"builtin": "constant_field", "B": 1}, "k_max": 2, "points": [[0.5, -0.25]]})J"),
        dir);
    CHECK(cmd_invariants(rc) == kExitOk);
    const std::string csv = slurp((dir.path / "invariants.csv").string());
    CHECK(csv.rfind("x1,x2,k,re,im\n", 0) == 0);
    CHECK(csv.find("0.5,-0.25,1,") != std::string::npos);
    CHECK(csv.find(",2,-0.16666666666666") != std::string::npos);
    const auto summary = nlohmann::json::parse(slurp((dir.path / "invariants.json").string()));
    CHECK(summary["command"] == "invariants");
    CHECK(summary["version"] == version_string());
    CHECK(summary["config"]["field"]["builtin"] == "constant_field");

    const RunConfig empty = with_out(parse_run_config(R"J({"points": []})J"), dir);
    CHECK(cmd_invariants(empty) == kExitOk);
    CHECK(slurp((dir.path / "invariants.csv").string()) == "x1,x2,k,re,im\n");

    const RunConfig av = with_out(parse_run_config(R"J({"field": {"V": "(+ 1 (^ x1 2))"}, "k_max": 1, "points": [[2, 0]]})J"), dir);
    CHECK(cmd_invariants(av) == kExitOk);
    CHECK(slurp((dir.path / "invariants.csv").string()).find("2,0,1,-5,0") != std::string::npos);
}

TEST_CASE("residual scan exit codes") {
    TempDir dir("magheat_cli_res");
    const RunConfig zero = with_out(parse_run_config(R"J({"field": {"V": "0"}})J"), dir);
    CHECK(cmd_residual_scan(zero) == kExitOk);
    CHECK(slurp((dir.path / "residual_scan.json").string()).find("identically zero") != std::string::npos);

    const char* v = R"J({"field": {"V": "(^ x1 2)"}, "N": 1, "pairs": [{"x": [0.3, 0.1], "y": [0.3, 0.1]}]})J";
    CHECK(cmd_residual_scan(with_out(parse_run_config(v), dir)) == kExitOk);
    const char* v0 = R"J({"field": {"V": "(^ x1 2)"}, "N": 0, "pairs": [{"x": [0.3, 0.1], "y": [0.3, 0.1]}]})J";
    CHECK(cmd_residual_scan(with_out(parse_run_config(v0), dir)) == kExitOk);
    const char* wrong = R"J({"field": {"V": "(^ x1 2)"}, "N": 1, "expected_slope": 3.0,
                           "pairs": [{"x": [0.3, 0.1], "y": [0.3, 0.1]}]})J";
    CHECK(cmd_residual_scan(with_out(parse_run_config(wrong), dir)) == kExitBand);
}

TEST_CASE("mehler-compare with a vanishing field") {
    TempDir dir("magheat_cli_mehler");
    const RunConfig rc = with_out(parse_run_config(R"J({"field": {"builtin": "constant_field", "B": 0},
        "N": 0, "pairs": [{"x": [0.5, 0], "y": [0, 0]}]})J"), dir);
    CHECK(cmd_mehler_compare(rc) == kExitOk);
    CHECK(slurp((dir.path / "mehler_compare.json").string()).find("zero error") != std::string::npos);
    const RunConfig bad = with_out(parse_run_config(R"J({"field": {"V": "x1"}})J"), dir);
    CHECK_THROWS_AS(cmd_mehler_compare(bad), ConfigError);
}

TEST_CASE("outputs are byte-identical across runs") {
    TempDir a("magheat_cli_det_a"), b("magheat_cli_det_b");
    const std::string text = R"J({"field": {"builtin": "constant_field", "B": 1, "V": "(sin x1)"},
        "random_points": 3, "seed": 5, "k_max": 2})J";
    CHECK(cmd_invariants(with_out(parse_run_config(text), a)) == kExitOk);
    CHECK(cmd_invariants(with_out(parse_run_config(text), b)) == kExitOk);
    CHECK(slurp((a.path / "invariants.csv").string()) == slurp((b.path / "invariants.csv").string()));
}

TEST_CASE("csv numbers use 17 significant digits") {
    TempDir dir("magheat_cli_csv");
    std::filesystem::create_directories(dir.path);
    const std::string path = (dir.path / "x.csv").string();
    {
        CsvWriter w(path, {"a", "b"});
        w << 0.1 << 1.0 / 3.0;
        w.end_row();
    }
    CHECK(slurp(path) == "a,b\n0.10000000000000001,0.33333333333333331\n");
}

TEST_CASE("run_command maps errors to exit codes") {
    TempDir dir("magheat_cli_run");
    std::filesystem::create_directories(dir.path);
    const std::string cfg = (dir.path / "bad.json").string();
    std::ofstream(cfg) << "{\"nope\": 1}";
    GlobalOptions opts;
    opts.config_path = cfg;
    opts.out_dir = dir.path.string();
    CHECK(run_command("invariants", opts) == kExitConfig);
    opts.config_path = (dir.path / "missing.json").string();
    CHECK(run_command("invariants", opts) == kExitConfig);

    const std::string tail = (dir.path / "tail.json").string();
    std::ofstream(tail) << R"J({"field": {"V": "0"}, "quotient": {"kind": "cylinder", "t": 5.0,
        "max_image_norm": 1, "points": [[0, 0]]}})J";
    opts.config_path = tail;
    CHECK(run_command("quotient", opts) == kExitNumerical);
    opts.config_path.reset();
    opts.line_nodes = 0;
    CHECK(run_command("invariants", opts) == kExitConfig);
}
