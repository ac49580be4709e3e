#include "magheat/cli.hpp"
#include "magheat/errors.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace magheat::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct Position {
    int line = 1;
    int column = 1;
};

// Records the position of every value in an already validated JSON text,
// keyed by JSON pointer.
class PositionIndex {
public:
    explicit PositionIndex(const std::string& text) : s_(text) {
        skip_ws();
        if (i_ < s_.size()) value("");
    }

    std::optional<Position> find(const std::string& pointer) const {
        auto it = pos_.find(pointer);
        if (it == pos_.end()) return std::nullopt;
        return it->second;
    }

    std::optional<Position> key(const std::string& pointer) const {
        auto it = keys_.find(pointer);
        if (it == keys_.end()) return std::nullopt;
        return it->second;
    }

private:
    void advance() {
        if (s_[i_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++i_;
    }
    void skip_ws() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) advance();
    }
    std::string string_token() {
        std::string out;
        advance(); // opening quote
        while (i_ < s_.size() && s_[i_] != '"') {
            if (s_[i_] == '\\') {
                advance();
                if (i_ < s_.size() && s_[i_] == 'u') {
                    for (int k = 0; k < 4 && i_ < s_.size(); ++k) advance();
                }
            }
            if (i_ < s_.size()) {
                out.push_back(s_[i_]);
                advance();
            }
        }
        if (i_ < s_.size()) advance();
        return out;
    }
    static std::string escape(const std::string& k) {
        std::string out;
        for (char c : k) {
            if (c == '~') out += "~0";
            else if (c == '/') out += "~1";
            else out.push_back(c);
        }
        return out;
    }
    void value(const std::string& ptr) {
        pos_[ptr] = {line_, col_};
        char c = s_[i_];
        if (c == '{') {
            advance();
            skip_ws();
            while (i_ < s_.size() && s_[i_] != '}') {
                Position kp{line_, col_};
                std::string k = string_token();
                std::string child = ptr + "/" + escape(k);
                keys_[child] = kp;
                skip_ws();
                advance(); // ':'
                skip_ws();
                value(child);
                skip_ws();
                if (i_ < s_.size() && s_[i_] == ',') {
                    advance();
                    skip_ws();
                }
            }
            if (i_ < s_.size()) advance();
        } else if (c == '[') {
            advance();
            skip_ws();
            int idx = 0;
            while (i_ < s_.size() && s_[i_] != ']') {
                value(ptr + "/" + std::to_string(idx++));
                skip_ws();
                if (i_ < s_.size() && s_[i_] == ',') {
                    advance();
                    skip_ws();
                }
            }
            if (i_ < s_.size()) advance();
        } else if (c == '"') {
            string_token();
        } else {
            while (i_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[i_])) &&
                   s_[i_] != ',' && s_[i_] != ']' && s_[i_] != '}')
                advance();
        }
    }

    const std::string& s_;
    std::size_t i_ = 0;
    int line_ = 1;
    int col_ = 1;
    std::map<std::string, Position> pos_;
    std::map<std::string, Position> keys_;
};

Position position_of_byte(const std::string& text, std::size_t byte) {
    Position p;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++p.line;
            p.column = 1;
        } else {
            ++p.column;
        }
    }
    return p;
}

class Reader {
public:
    Reader(const json& root, const std::string& text, std::string source)
        : root_(root), index_(text), source_(std::move(source)) {}

    [[noreturn]] void fail(const std::string& pointer, const std::string& msg) const {
        std::ostringstream os;
        os << source_;
        auto p = index_.find(pointer);
        if (!p) p = index_.key(pointer);
        if (p) os << ":" << p->line << ":" << p->column;
        os << ": " << (pointer.empty() ? std::string("/") : pointer) << ": " << msg;
        throw ConfigError(os.str());
    }

    void check_keys(const json& obj, const std::string& pointer,
                    const std::set<std::string>& allowed) const {
        if (!obj.is_object()) fail(pointer, "expected an object");
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            if (!allowed.count(it.key())) {
                std::string child = pointer + "/" + it.key();
                std::ostringstream os;
                os << source_;
                if (auto p = index_.key(child)) os << ":" << p->line << ":" << p->column;
                os << ": unknown key '" << it.key() << "' in "
                   << (pointer.empty() ? std::string("/") : pointer);
                throw ConfigError(os.str());
            }
        }
    }

    double number(const json& v, const std::string& ptr) const {
        if (!v.is_number()) fail(ptr, "expected a number");
        double x = v.get<double>();
        if (!std::isfinite(x)) fail(ptr, "expected a finite number");
        return x;
    }
    double positive(const json& v, const std::string& ptr) const {
        double x = number(v, ptr);
        if (!(x > 0.0)) fail(ptr, "expected a positive number");
        return x;
    }
    int integer(const json& v, const std::string& ptr, int lo, int hi) const {
        if (!v.is_number_integer()) fail(ptr, "expected an integer");
        long long x = v.get<long long>();
        if (x < lo || x > hi)
            fail(ptr, "expected an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) +
                          "]");
        return static_cast<int>(x);
    }
    std::string string(const json& v, const std::string& ptr) const {
        if (!v.is_string()) fail(ptr, "expected a string");
        return v.get<std::string>();
    }
    bool boolean(const json& v, const std::string& ptr) const {
        if (!v.is_boolean()) fail(ptr, "expected true or false");
        return v.get<bool>();
    }
    std::string choice(const json& v, const std::string& ptr,
                       const std::set<std::string>& options) const {
        std::string s = string(v, ptr);
        if (!options.count(s)) {
            std::string list;
            for (const auto& o : options) list += (list.empty() ? "" : ", ") + o;
            fail(ptr, "expected one of " + list + ", got '" + s + "'");
        }
        return s;
    }
    Point point(const json& v, const std::string& ptr, int d) const {
        if (!v.is_array()) fail(ptr, "expected an array of " + std::to_string(d) + " numbers");
        if (static_cast<int>(v.size()) != d)
            fail(ptr, "expected " + std::to_string(d) + " coordinates, got " +
                          std::to_string(v.size()));
        Point p(d);
        for (int i = 0; i < d; ++i) p[i] = number(v[i], ptr + "/" + std::to_string(i));
        return p;
    }
    std::vector<Point> points(const json& v, const std::string& ptr, int d) const {
        if (!v.is_array()) fail(ptr, "expected an array of points");
        std::vector<Point> out;
        for (std::size_t i = 0; i < v.size(); ++i)
            out.push_back(point(v[i], ptr + "/" + std::to_string(i), d));
        return out;
    }
    // Parses the expression to surface grammar errors at the config position.
    std::string expression(const json& v, const std::string& ptr) const {
        std::string s = v.is_number() ? json(v).dump() : string(v, ptr);
        try {
            FieldExpr::parse(s);
        } catch (const ConfigError& e) {
            fail(ptr, e.what());
        }
        return s;
    }

private:
    const json& root_;
    PositionIndex index_;
    std::string source_;
};

GridSpec read_grid(const Reader& r, const json& g, const std::string& ptr, GridSpec grid) {
    r.check_keys(g, ptr, {"L", "n", "dt", "boundary"});
    if (g.contains("L")) grid.L = r.positive(g["L"], ptr + "/L");
    if (g.contains("n")) grid.n = r.integer(g["n"], ptr + "/n", 16, 1024);
    if (g.contains("dt")) grid.dt = r.positive(g["dt"], ptr + "/dt");
    if (g.contains("boundary"))
        grid.boundary = r.choice(g["boundary"], ptr + "/boundary", {"periodic", "dirichlet_far"}) ==
                                "periodic"
                            ? GridSpec::Boundary::Periodic
                            : GridSpec::Boundary::DirichletFar;
    return grid;
}

ordered_json point_json(const Point& p) {
    ordered_json a = ordered_json::array();
    for (int i = 0; i < p.size(); ++i) a.push_back(p[i]);
    return a;
}

ordered_json grid_json(const GridSpec& g) {
    return {{"L", g.L},
            {"n", g.n},
            {"dt", g.dt},
            {"boundary", g.boundary == GridSpec::Boundary::Periodic ? "periodic" : "dirichlet_far"}};
}

} // namespace

std::vector<double> TimeLadder::resolve() const {
    std::vector<double> out;
    if (kind == "list") return values;
    for (int j = 0; j < count; ++j)
        out.push_back(kind == "geometric" ? t0 * std::pow(ratio, j) : dt * (j + 1));
    return out;
}

FieldConfig build_field(const FieldSection& f) {
    FieldExpr V = FieldExpr::parse(f.V);
    FieldConfig cfg;
    if (f.builtin == "constant_field") {
        if (f.d != 2) throw ConfigError("builtin constant_field requires d = 2");
        if (!f.A.empty()) throw ConfigError("builtin constant_field takes no explicit A");
        cfg = constant_field(f.B, V, f.jet_cap);
    } else if (f.builtin == "torus_flux") {
        if (f.d != 2) throw ConfigError("builtin torus_flux requires d = 2");
        std::vector<FieldExpr> periodic;
        for (const auto& a : f.A) periodic.push_back(FieldExpr::parse(a));
        if (!periodic.empty() && periodic.size() != 2)
            throw ConfigError("torus_flux periodic part needs 2 components");
        cfg = torus_flux(f.flux_quanta, periodic, V, f.jet_cap);
    } else {
        std::vector<std::string> A = f.A;
        if (A.empty()) A.assign(f.d, "0");
        cfg = FieldConfig::from_strings(f.d, f.V, A, f.m, f.jet_cap);
    }
    cfg.m = f.m;
    if (!f.gauge.empty()) cfg = gauge_transformed(cfg, FieldExpr::parse(f.gauge));
    cfg.validate();
    return cfg;
}

RunConfig parse_run_config(const std::string& text, const std::string& source) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        Position p = position_of_byte(text, e.byte > 0 ? e.byte - 1 : 0);
        std::ostringstream os;
        os << source << ":" << p.line << ":" << p.column << ": invalid JSON: " << e.what();
        throw ConfigError(os.str());
    }
    Reader r(root, text, source);
    RunConfig rc;
    rc.source = source;
    r.check_keys(root, "",
                 {"field", "N", "k_max", "quadrature", "points", "random_points", "random_box",
                  "pairs", "times", "cn", "volterra", "quotient", "expected_slope", "band",
                  "output", "seed", "threads"});

    if (root.contains("field")) {
        const json& f = root["field"];
        r.check_keys(f, "/field",
                     {"builtin", "d", "B", "flux_quanta", "V", "A", "gauge", "m", "jet_cap"});
        if (f.contains("builtin"))
            rc.field.builtin =
                r.choice(f["builtin"], "/field/builtin", {"none", "constant_field", "torus_flux"});
        if (f.contains("d")) rc.field.d = r.integer(f["d"], "/field/d", 1, 8);
        if (f.contains("B")) rc.field.B = r.number(f["B"], "/field/B");
        if (f.contains("flux_quanta"))
            rc.field.flux_quanta = r.integer(f["flux_quanta"], "/field/flux_quanta", -1000, 1000);
        if (f.contains("V")) rc.field.V = r.expression(f["V"], "/field/V");
        if (f.contains("A")) {
            if (!f["A"].is_array()) r.fail("/field/A", "expected an array of expressions");
            for (std::size_t i = 0; i < f["A"].size(); ++i)
                rc.field.A.push_back(r.expression(f["A"][i], "/field/A/" + std::to_string(i)));
        }
        if (f.contains("gauge") && !(f["gauge"].is_string() && f["gauge"].get<std::string>().empty()))
            rc.field.gauge = r.expression(f["gauge"], "/field/gauge");
        if (f.contains("m")) rc.field.m = r.number(f["m"], "/field/m");
        if (f.contains("jet_cap")) rc.field.jet_cap = r.integer(f["jet_cap"], "/field/jet_cap", 0, 64);
    }
    if (root.contains("N")) rc.N = r.integer(root["N"], "/N", 0, 8);
    if (root.contains("k_max")) rc.k_max = r.integer(root["k_max"], "/k_max", 0, 8);
    if (!root.contains("field") || !root["field"].contains("jet_cap")) {
        const int needed = default_jet_cap(std::max(rc.N + 1, rc.k_max));
        rc.field.jet_cap = std::min(std::max(rc.field.jet_cap, needed),
                                    JetLayout::max_order_for_dimension(rc.field.d) - 1);
    }
    try {
        rc.cfg = build_field(rc.field);
    } catch (const ConfigError& e) {
        r.fail("/field", e.what());
    }
    const int d = rc.field.d;

    if (root.contains("quadrature")) {
        const json& q = root["quadrature"];
        r.check_keys(q, "/quadrature", {"line_nodes", "double_nodes"});
        if (q.contains("line_nodes"))
            rc.quad.line_nodes = r.integer(q["line_nodes"], "/quadrature/line_nodes", 1, 512);
        if (q.contains("double_nodes"))
            rc.quad.double_nodes = r.integer(q["double_nodes"], "/quadrature/double_nodes", 1, 512);
    }
    if (root.contains("points")) rc.points = r.points(root["points"], "/points", d);
    if (root.contains("random_points"))
        rc.random_points = r.integer(root["random_points"], "/random_points", 0, 100000);
    if (root.contains("random_box")) rc.random_box = r.positive(root["random_box"], "/random_box");
    if (root.contains("pairs")) {
        const json& p = root["pairs"];
        if (!p.is_array()) r.fail("/pairs", "expected an array of {x, y} objects");
        for (std::size_t i = 0; i < p.size(); ++i) {
            std::string ptr = "/pairs/" + std::to_string(i);
            r.check_keys(p[i], ptr, {"x", "y"});
            if (!p[i].contains("x") || !p[i].contains("y")) r.fail(ptr, "needs both x and y");
            rc.pairs.emplace_back(r.point(p[i]["x"], ptr + "/x", d), r.point(p[i]["y"], ptr + "/y", d));
        }
    } else {
        rc.pairs.emplace_back(Point::Zero(d), Point::Zero(d));
    }
    if (root.contains("times")) {
        const json& t = root["times"];
        r.check_keys(t, "/times", {"kind", "t0", "ratio", "dt", "count", "values"});
        if (t.contains("kind"))
            rc.ladder.kind = r.choice(t["kind"], "/times/kind", {"geometric", "uniform", "list"});
        if (t.contains("t0")) rc.ladder.t0 = r.positive(t["t0"], "/times/t0");
        if (t.contains("ratio")) rc.ladder.ratio = r.positive(t["ratio"], "/times/ratio");
        if (t.contains("dt")) rc.ladder.dt = r.positive(t["dt"], "/times/dt");
        if (t.contains("count")) rc.ladder.count = r.integer(t["count"], "/times/count", 1, 10000);
        if (t.contains("values")) {
            if (!t["values"].is_array()) r.fail("/times/values", "expected an array of times");
            for (std::size_t i = 0; i < t["values"].size(); ++i)
                rc.ladder.values.push_back(
                    r.positive(t["values"][i], "/times/values/" + std::to_string(i)));
            if (!t.contains("kind")) rc.ladder.kind = "list";
        }
        if (rc.ladder.kind == "list" && rc.ladder.values.empty())
            r.fail("/times", "kind 'list' needs a non-empty values array");
    }
    if (root.contains("cn")) {
        const json& c = root["cn"];
        r.check_keys(c, "/cn", {"grid", "T", "y", "compare_radius", "write_grid"});
        if (c.contains("grid")) rc.cn.grid = read_grid(r, c["grid"], "/cn/grid", rc.cn.grid);
        if (c.contains("T")) rc.cn.T = r.positive(c["T"], "/cn/T");
        if (c.contains("y")) rc.cn.y = r.point(c["y"], "/cn/y", 2);
        if (c.contains("compare_radius"))
            rc.cn.compare_radius = r.positive(c["compare_radius"], "/cn/compare_radius");
        if (c.contains("write_grid")) rc.cn.write_grid = r.boolean(c["write_grid"], "/cn/write_grid");
    }
    if (root.contains("volterra")) {
        const json& v = root["volterra"];
        r.check_keys(v, "/volterra", {"grid", "n_max", "dt", "m", "y", "row_radius", "write_binary"});
        if (v.contains("grid"))
            rc.volterra.grid = read_grid(r, v["grid"], "/volterra/grid", rc.volterra.grid);
        if (v.contains("n_max")) rc.volterra.n_max = r.integer(v["n_max"], "/volterra/n_max", 0, 2);
        if (v.contains("dt")) rc.volterra.dt = r.positive(v["dt"], "/volterra/dt");
        if (v.contains("m")) rc.volterra.m = r.integer(v["m"], "/volterra/m", 2, 24);
        if (v.contains("y")) rc.volterra.y = r.point(v["y"], "/volterra/y", 2);
        if (v.contains("row_radius"))
            rc.volterra.row_radius = r.number(v["row_radius"], "/volterra/row_radius");
        if (v.contains("write_binary"))
            rc.volterra.write_binary = r.boolean(v["write_binary"], "/volterra/write_binary");
        if (rc.volterra.grid.n > 128) r.fail("/volterra/grid/n", "Volterra grids are capped at n = 128");
    }
    if (root.contains("quotient")) {
        const json& q = root["quotient"];
        r.check_keys(q, "/quotient",
                     {"kind", "bc", "generators", "max_image_norm", "tail_tol", "check_tol", "t",
                      "points", "k_max"});
        auto& s = rc.quotient.spec;
        if (q.contains("kind")) {
            std::string k = r.choice(q["kind"], "/quotient/kind", {"half_plane", "cylinder", "torus"});
            s.kind = k == "half_plane" ? QuotientSpec::Kind::HalfPlane
                     : k == "cylinder" ? QuotientSpec::Kind::Cylinder
                                       : QuotientSpec::Kind::Torus;
        }
        if (q.contains("bc"))
            s.bc = r.choice(q["bc"], "/quotient/bc", {"dirichlet", "neumann"}) == "dirichlet"
                       ? QuotientSpec::BC::Dirichlet
                       : QuotientSpec::BC::Neumann;
        if (q.contains("generators")) s.generators = r.points(q["generators"], "/quotient/generators", 2);
        if (q.contains("max_image_norm"))
            s.max_image_norm = r.integer(q["max_image_norm"], "/quotient/max_image_norm", 0, 64);
        if (q.contains("tail_tol")) s.tail_tol = r.positive(q["tail_tol"], "/quotient/tail_tol");
        if (q.contains("check_tol")) s.check_tol = r.positive(q["check_tol"], "/quotient/check_tol");
        if (q.contains("t")) rc.quotient.t = r.positive(q["t"], "/quotient/t");
        if (q.contains("points")) rc.quotient.points = r.points(q["points"], "/quotient/points", 2);
        if (q.contains("k_max")) rc.quotient.k_max = r.integer(q["k_max"], "/quotient/k_max", 0, 8);
        if (s.kind != QuotientSpec::Kind::HalfPlane) {
            try {
                s = s.normalized();
            } catch (const ConfigError& e) {
                r.fail("/quotient", e.what());
            }
        }
    }
    if (root.contains("expected_slope") && !root["expected_slope"].is_null())
        rc.expected_slope = r.number(root["expected_slope"], "/expected_slope");
    if (root.contains("band")) rc.band = r.positive(root["band"], "/band");
    if (root.contains("output")) {
        const json& o = root["output"];
        r.check_keys(o, "/output", {"dir"});
        if (o.contains("dir")) rc.out_dir = r.string(o["dir"], "/output/dir");
    }
    if (root.contains("seed")) {
        if (!root["seed"].is_number_unsigned()) r.fail("/seed", "expected a non-negative integer");
        rc.seed = root["seed"].get<std::uint64_t>();
    }
    if (root.contains("threads")) rc.threads = r.integer(root["threads"], "/threads", 1, 256);
    return rc;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str(), path);
}

std::vector<Point> RunConfig::resolved_points() const {
    std::vector<Point> out = points;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-random_box, random_box);
    for (int i = 0; i < random_points; ++i) {
        Point p(field.d);
        for (int j = 0; j < field.d; ++j) p[j] = u(rng);
        out.push_back(p);
    }
    return out;
}

ordered_json RunConfig::to_json() const {
    ordered_json f = {{"builtin", field.builtin}, {"d", field.d}};
    if (field.builtin == "constant_field") f["B"] = field.B;
    if (field.builtin == "torus_flux") f["flux_quanta"] = field.flux_quanta;
    f["V"] = field.V;
    f["A"] = field.A;
    f["gauge"] = field.gauge;
    f["m"] = field.m;
    f["jet_cap"] = field.jet_cap;
    ordered_json resolved_A = ordered_json::array();
    for (const auto& a : cfg.A) resolved_A.push_back(a.to_string());
    f["resolved"] = {{"V", cfg.V.to_string()}, {"A", resolved_A}};

    ordered_json pts = ordered_json::array();
    for (const auto& p : points) pts.push_back(point_json(p));
    ordered_json prs = ordered_json::array();
    for (const auto& [x, y] : pairs) prs.push_back({{"x", point_json(x)}, {"y", point_json(y)}});
    ordered_json times = {{"kind", ladder.kind}};
    if (ladder.kind == "geometric") {
        times["t0"] = ladder.t0;
        times["ratio"] = ladder.ratio;
        times["count"] = ladder.count;
    } else if (ladder.kind == "uniform") {
        times["dt"] = ladder.dt;
        times["count"] = ladder.count;
    }
    times["values"] = ladder.resolve();

    const auto& s = quotient.spec;
    ordered_json gens = ordered_json::array();
    for (const auto& g : s.generators) gens.push_back(point_json(g));
    ordered_json qpts = ordered_json::array();
    for (const auto& p : quotient.points) qpts.push_back(point_json(p));

    ordered_json out = {
        {"source", source},
        {"field", f},
        {"N", N},
        {"k_max", k_max},
        {"quadrature", {{"line_nodes", quad.line_nodes}, {"double_nodes", quad.double_nodes}}},
        {"points", pts},
        {"random_points", random_points},
        {"random_box", random_box},
        {"pairs", prs},
        {"times", times},
        {"cn",
         {{"grid", grid_json(cn.grid)},
          {"T", cn.T},
          {"y", point_json(cn.y)},
          {"compare_radius", cn.compare_radius},
          {"write_grid", cn.write_grid}}},
        {"volterra",
         {{"grid", grid_json(volterra.grid)},
          {"n_max", volterra.n_max},
          {"dt", volterra.dt},
          {"m", volterra.m},
          {"y", point_json(volterra.y)},
          {"row_radius", volterra.row_radius},
          {"write_binary", volterra.write_binary}}},
        {"quotient",
         {{"kind", to_string(s.kind)},
          {"bc", to_string(s.bc)},
          {"generators", gens},
          {"max_image_norm", s.max_image_norm},
          {"tail_tol", s.tail_tol},
          {"check_tol", s.check_tol},
          {"t", quotient.t},
          {"points", qpts},
          {"k_max", quotient.k_max}}},
        {"expected_slope", expected_slope ? ordered_json(*expected_slope) : ordered_json(nullptr)},
        {"band", band},
        {"output", {{"dir", out_dir}}},
        {"seed", seed},
        {"threads", threads}};
    return out;
}

RunConfig resolve_config(const GlobalOptions& opts) {
    RunConfig rc;
    if (opts.config_path) {
        rc = load_run_config(*opts.config_path);
    } else {
        rc = parse_run_config("{}", "<defaults>");
    }
    if (opts.out_dir) rc.out_dir = *opts.out_dir;
    if (opts.line_nodes) {
        if (*opts.line_nodes < 1 || *opts.line_nodes > 512)
            throw ConfigError("--line-nodes must be in [1, 512]");
        rc.quad.line_nodes = *opts.line_nodes;
    }
    if (opts.double_nodes) {
        if (*opts.double_nodes < 1 || *opts.double_nodes > 512)
            throw ConfigError("--double-nodes must be in [1, 512]");
        rc.quad.double_nodes = *opts.double_nodes;
    }
    if (opts.threads) {
        if (*opts.threads < 1) throw ConfigError("--threads must be at least 1");
        rc.threads = *opts.threads;
    }
    if (opts.seed) rc.seed = *opts.seed;
    return rc;
}

} // namespace magheat::cli
