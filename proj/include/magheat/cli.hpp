#pragma once

#include "magheat/field_config.hpp"
#include "magheat/oracle.hpp"
#include "magheat/parametrix.hpp"
#include "magheat/quotients.hpp"

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace magheat::cli {

/// Exit codes.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitBand = 3;
constexpr int kExitNumerical = 4;

struct FieldSection {
    std::string builtin = "none"; // none | constant_field | torus_flux
    int d = 2;
    double B = 1.0;
    int flux_quanta = 1;
    std::string V = "0";
    std::vector<std::string> A; // explicit A, or the periodic part for torus_flux
    std::string gauge;          // optional chi, A -> A + grad chi
    double m = 0.0;
    int jet_cap = 8;
};

struct TimeLadder {
    std::string kind = "geometric"; // geometric | uniform | list
    double t0 = 0.1;
    double ratio = 0.5;
    double dt = 0.01;
    int count = 7;
    std::vector<double> values;

    std::vector<double> resolve() const;
};

struct CnSection {
    GridSpec grid{4.0, 128, 1e-3, GridSpec::Boundary::DirichletFar};
    double T = 0.05;
    Point y = Point::Zero(2);
    double compare_radius = 1.0;
    bool write_grid = true;
};

struct VolterraSection {
    GridSpec grid{3.2, 64, 1e-3, GridSpec::Boundary::DirichletFar};
    int n_max = 1;
    double dt = 0.01;
    int m = 20;
    Point y = Point::Zero(2);
    double row_radius = 0.4;
    bool write_binary = false;
};

struct QuotientSection {
    QuotientSpec spec;
    double t = 0.02;
    std::vector<Point> points;
    int k_max = 2;
};

struct RunConfig {
    std::string source; // path or "<defaults>"
    FieldSection field;
    FieldConfig cfg;
    int N = 1;
    int k_max = 3;
    QuadratureOptions quad;
    std::vector<Point> points;
    int random_points = 0;
    double random_box = 1.0;
    std::vector<std::pair<Point, Point>> pairs;
    TimeLadder ladder;
    CnSection cn;
    VolterraSection volterra;
    QuotientSection quotient;
    std::optional<double> expected_slope;
    double band = 0.2;
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    unsigned threads = 1;

    /// Resolved configuration with every default filled in.
    nlohmann::ordered_json to_json() const;
    /// Points from the config, or random_points drawn with seed.
    std::vector<Point> resolved_points() const;
};

/// Parses a JSON run config. Throws ConfigError with line and column on
/// syntax errors, unknown keys, wrong types and bad field expressions.
RunConfig parse_run_config(const std::string& text, const std::string& source = "<string>");
RunConfig load_run_config(const std::string& path);
/// Builds FieldConfig from the field section (also run by parse_run_config).
FieldConfig build_field(const FieldSection& f);

struct GlobalOptions {
    std::optional<std::string> config_path;
    std::optional<std::string> out_dir;
    std::optional<int> line_nodes;
    std::optional<int> double_nodes;
    std::optional<unsigned> threads;
    std::optional<std::uint64_t> seed;
};

/// Loads the config (or defaults) and applies command-line overrides.
RunConfig resolve_config(const GlobalOptions& opts);

const char* version_string();

/// Each command writes <out>/<name>.csv and <out>/<name>.json and returns an exit code.
int cmd_invariants(const RunConfig& rc);
int cmd_residual_scan(const RunConfig& rc);
int cmd_mehler_compare(const RunConfig& rc);
int cmd_volterra(const RunConfig& rc);
int cmd_quotient(const RunConfig& rc);
int cmd_cn_oracle(const RunConfig& rc);
int cmd_selftest(const RunConfig& rc);

/// Dispatches by subcommand name, mapping exceptions to exit codes.
int run_command(const std::string& name, const GlobalOptions& opts);

// Output helpers.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    CsvWriter& operator<<(double v);
    CsvWriter& operator<<(long long v);
    CsvWriter& operator<<(int v) { return *this << static_cast<long long>(v); }
    CsvWriter& operator<<(const std::string& s);
    void end_row();

private:
    std::ofstream* os_;
    std::unique_ptr<std::ofstream> file_;
    bool first_ = true;
};

/// Writes {"command", "version", "config", "result"} to path.
void write_summary(const std::string& path, const std::string& command, const RunConfig& rc,
                   const nlohmann::ordered_json& result);
std::string output_path(const RunConfig& rc, const std::string& name);

} // namespace magheat::cli
