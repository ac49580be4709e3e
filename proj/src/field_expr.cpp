#include "magheat/field_expr.hpp"

#include "magheat/errors.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

namespace magheat {

struct FieldExpr::Node {
    Op op;
    double value = 0.0; // Constant
    int index = 0;      // Variable index, or Pow exponent
    std::vector<FieldExpr> args;
};

FieldExpr::FieldExpr() : FieldExpr(constant(0.0)) {}

FieldExpr FieldExpr::make(Op op, std::vector<FieldExpr> args, double value, int index) {
    return FieldExpr(std::make_shared<const Node>(Node{op, value, index, std::move(args)}));
}

FieldExpr FieldExpr::constant(double value) { return make(Op::Constant, {}, value); }

FieldExpr FieldExpr::variable(int index) {
    if (index < 0) throw ConfigError("variable index must be non-negative");
    return make(Op::Variable, {}, 0.0, index);
}

FieldExpr::Op FieldExpr::op() const { return node_->op; }

bool FieldExpr::is_zero() const { return node_->op == Op::Constant && node_->value == 0.0; }

int FieldExpr::max_variable() const {
    if (node_->op == Op::Variable) return node_->index;
    int m = -1;
    for (const auto& a : node_->args) m = std::max(m, a.max_variable());
    return m;
}

namespace {

std::string format_number(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string describe(const std::string& s) {
    return s.size() > 80 ? s.substr(0, 77) + "..." : s;
}

} // namespace

std::string FieldExpr::to_string() const {
    const Node& n = *node_;
    auto wrap = [&](const char* name) {
        std::string s = std::string("(") + name;
        for (const auto& a : n.args) s += " " + a.to_string();
        return s + ")";
    };
    switch (n.op) {
    case Op::Constant: return format_number(n.value);
    case Op::Variable: return "x" + std::to_string(n.index + 1);
    case Op::Add: return wrap("+");
    case Op::Sub:
    case Op::Neg: return wrap("-");
    case Op::Mul: return wrap("*");
    case Op::Div: return wrap("/");
    case Op::Pow: return "(^ " + n.args[0].to_string() + " " + std::to_string(n.index) + ")";
    case Op::Sin: return wrap("sin");
    case Op::Cos: return wrap("cos");
    case Op::Exp: return wrap("exp");
    }
    return "?";
}

double FieldExpr::evaluate(std::span<const double> x) const {
    const Node& n = *node_;
    switch (n.op) {
    case Op::Constant: return n.value;
    case Op::Variable:
        if (static_cast<std::size_t>(n.index) >= x.size()) {
            throw EvaluationError("variable x" + std::to_string(n.index + 1) +
                                  " outside dimension " + std::to_string(x.size()));
        }
        return x[n.index];
    case Op::Add: {
        double s = 0.0;
        for (const auto& a : n.args) s += a.evaluate(x);
        return s;
    }
    case Op::Sub: return n.args[0].evaluate(x) - n.args[1].evaluate(x);
    case Op::Neg: return -n.args[0].evaluate(x);
    case Op::Mul: {
        double p = 1.0;
        for (const auto& a : n.args) p *= a.evaluate(x);
        return p;
    }
    case Op::Div: {
        const double den = n.args[1].evaluate(x);
        if (den == 0.0) throw EvaluationError("division by zero at node " + describe(to_string()));
        return n.args[0].evaluate(x) / den;
    }
    case Op::Pow: {
        const double b = n.args[0].evaluate(x);
        if (b == 0.0 && n.index < 0) {
            throw EvaluationError("division by zero at node " + describe(to_string()));
        }
        return std::pow(b, n.index);
    }
    case Op::Sin: return std::sin(n.args[0].evaluate(x));
    case Op::Cos: return std::cos(n.args[0].evaluate(x));
    case Op::Exp: return std::exp(n.args[0].evaluate(x));
    }
    return 0.0;
}

TaylorJet FieldExpr::jet(std::span<const double> x, int order) const {
    const Node& n = *node_;
    const int d = static_cast<int>(x.size());
    switch (n.op) {
    case Op::Constant: return TaylorJet::constant(d, order, n.value);
    case Op::Variable:
        if (n.index >= d) {
            throw EvaluationError("variable x" + std::to_string(n.index + 1) +
                                  " outside dimension " + std::to_string(d));
        }
        return TaylorJet::variable(d, order, n.index, x[n.index]);
    case Op::Add: {
        TaylorJet s = n.args[0].jet(x, order);
        for (std::size_t i = 1; i < n.args.size(); ++i) s += n.args[i].jet(x, order);
        return s;
    }
    case Op::Sub: return n.args[0].jet(x, order) - n.args[1].jet(x, order);
    case Op::Neg: return -n.args[0].jet(x, order);
    case Op::Mul: {
        TaylorJet p = n.args[0].jet(x, order);
        for (std::size_t i = 1; i < n.args.size(); ++i) {
            // constant factors are common in configs; skip the full product
            if (n.args[i].op() == Op::Constant) {
                p *= n.args[i].node_->value;
            } else {
                p = p * n.args[i].jet(x, order);
            }
        }
        return p;
    }
    case Op::Div: {
        TaylorJet den = n.args[1].jet(x, order);
        if (den.value() == Complex{}) {
            throw EvaluationError("division by zero jet at node " + describe(to_string()));
        }
        return n.args[0].jet(x, order) * reciprocal(den);
    }
    case Op::Pow: {
        TaylorJet b = n.args[0].jet(x, order);
        if (n.index < 0 && b.value() == Complex{}) {
            throw EvaluationError("division by zero jet at node " + describe(to_string()));
        }
        return pow(b, n.index);
    }
    case Op::Sin: return sin(n.args[0].jet(x, order));
    case Op::Cos: return cos(n.args[0].jet(x, order));
    case Op::Exp: return exp(n.args[0].jet(x, order));
    }
    return TaylorJet::constant(d, order, 0.0);
}

FieldExpr FieldExpr::diff(int var) const {
    const Node& n = *node_;
    switch (n.op) {
    case Op::Constant: return constant(0.0);
    case Op::Variable: return constant(n.index == var ? 1.0 : 0.0);
    case Op::Add: {
        FieldExpr s = constant(0.0);
        for (const auto& a : n.args) s = s + a.diff(var);
        return s;
    }
    case Op::Sub: return n.args[0].diff(var) - n.args[1].diff(var);
    case Op::Neg: return -n.args[0].diff(var);
    case Op::Mul: {
        FieldExpr s = constant(0.0);
        for (std::size_t i = 0; i < n.args.size(); ++i) {
            FieldExpr term = n.args[i].diff(var);
            if (term.is_zero()) continue;
            for (std::size_t j = 0; j < n.args.size(); ++j) {
                if (j != i) term = term * n.args[j];
            }
            s = s + term;
        }
        return s;
    }
    case Op::Div: {
        const FieldExpr& u = n.args[0];
        const FieldExpr& v = n.args[1];
        return (u.diff(var) * v - u * v.diff(var)) / pow(v, 2);
    }
    case Op::Pow: {
        if (n.index == 0) return constant(0.0);
        return constant(n.index) * pow(n.args[0], n.index - 1) * n.args[0].diff(var);
    }
    case Op::Sin: return cos(n.args[0]) * n.args[0].diff(var);
    case Op::Cos: return -(sin(n.args[0]) * n.args[0].diff(var));
    case Op::Exp: return *this * n.args[0].diff(var);
    }
    return constant(0.0);
}

FieldExpr operator+(const FieldExpr& a, const FieldExpr& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    return FieldExpr::make(FieldExpr::Op::Add, {a, b});
}

FieldExpr operator-(const FieldExpr& a, const FieldExpr& b) {
    if (b.is_zero()) return a;
    if (a.is_zero()) return -b;
    return FieldExpr::make(FieldExpr::Op::Sub, {a, b});
}

FieldExpr operator*(const FieldExpr& a, const FieldExpr& b) {
    if (a.is_zero() || b.is_zero()) return FieldExpr::constant(0.0);
    return FieldExpr::make(FieldExpr::Op::Mul, {a, b});
}

FieldExpr operator/(const FieldExpr& a, const FieldExpr& b) {
    return FieldExpr::make(FieldExpr::Op::Div, {a, b});
}

FieldExpr operator-(const FieldExpr& a) {
    if (a.is_zero()) return a;
    return FieldExpr::make(FieldExpr::Op::Neg, {a});
}

FieldExpr pow(const FieldExpr& a, int exponent) {
    return FieldExpr::make(FieldExpr::Op::Pow, {a}, 0.0, exponent);
}

FieldExpr sin(const FieldExpr& a) { return FieldExpr::make(FieldExpr::Op::Sin, {a}); }
FieldExpr cos(const FieldExpr& a) { return FieldExpr::make(FieldExpr::Op::Cos, {a}); }
FieldExpr exp(const FieldExpr& a) { return FieldExpr::make(FieldExpr::Op::Exp, {a}); }

// Prefix-notation parser.
namespace {

struct Token {
    enum Kind { Open, Close, Atom, End } kind;
    std::string text;
    int line;
    int column;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) {
            advance();
        }
        const int line = line_;
        const int col = col_;
        if (pos_ >= src_.size()) return {Token::End, "", line, col};
        const char c = src_[pos_];
        if (c == '(') {
            advance();
            return {Token::Open, "(", line, col};
        }
        if (c == ')') {
            advance();
            return {Token::Close, ")", line, col};
        }
        std::string text;
        while (pos_ < src_.size() && src_[pos_] != '(' && src_[pos_] != ')' &&
               !std::isspace(static_cast<unsigned char>(src_[pos_]))) {
            text += src_[pos_];
            advance();
        }
        return {Token::Atom, text, line, col};
    }

private:
    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

[[noreturn]] void fail(const Token& t, const std::string& msg) {
    throw ConfigError("field expression, line " + std::to_string(t.line) + ", column " +
                      std::to_string(t.column) + ": " + msg);
}

bool parse_number(const std::string& s, double& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && std::isfinite(out);
}

class Parser {
public:
    explicit Parser(std::string_view src) : lex_(src) { tok_ = lex_.next(); }

    FieldExpr parse_all() {
        FieldExpr e = parse_expr();
        if (tok_.kind != Token::End) fail(tok_, "unexpected trailing input '" + tok_.text + "'");
        return e;
    }

private:
    Token take() {
        Token t = tok_;
        tok_ = lex_.next();
        return t;
    }

    FieldExpr parse_atom(const Token& t) {
        double v = 0.0;
        if (parse_number(t.text, v)) return FieldExpr::constant(v);
        if (t.text == "pi") return FieldExpr::constant(std::numbers::pi);
        if (t.text.size() >= 2 && t.text[0] == 'x') {
            int idx = 0;
            auto [ptr, ec] = std::from_chars(t.text.data() + 1, t.text.data() + t.text.size(), idx);
            if (ec == std::errc() && ptr == t.text.data() + t.text.size() && idx >= 1) {
                return FieldExpr::variable(idx - 1);
            }
        }
        fail(t, "unknown symbol '" + t.text + "'");
    }

    FieldExpr parse_expr() {
        if (tok_.kind == Token::End) fail(tok_, "unexpected end of expression");
        if (tok_.kind == Token::Close) fail(tok_, "unexpected ')'");
        if (tok_.kind == Token::Atom) return parse_atom(take());

        const Token open = take();
        if (tok_.kind != Token::Atom) fail(tok_, "expected operator after '('");
        const Token op = take();
        std::vector<FieldExpr> args;
        std::vector<Token> arg_tokens;
        while (tok_.kind != Token::Close) {
            if (tok_.kind == Token::End) fail(open, "unbalanced '('");
            arg_tokens.push_back(tok_);
            args.push_back(parse_expr());
        }
        take();

        auto require = [&](std::size_t lo, std::size_t hi) {
            if (args.size() < lo || args.size() > hi) {
                fail(op, "operator '" + op.text + "' takes " +
                             (lo == hi ? std::to_string(lo)
                                       : std::to_string(lo) + ".." +
                                             (hi > 64 ? std::string("n") : std::to_string(hi))) +
                             " arguments, got " + std::to_string(args.size()));
            }
        };

        if (op.text == "+") {
            require(1, 1000);
            FieldExpr s = args[0];
            for (std::size_t i = 1; i < args.size(); ++i) s = s + args[i];
            return s;
        }
        if (op.text == "*") {
            require(1, 1000);
            FieldExpr p = args[0];
            for (std::size_t i = 1; i < args.size(); ++i) p = p * args[i];
            return p;
        }
        if (op.text == "-") {
            require(1, 2);
            return args.size() == 1 ? -args[0] : args[0] - args[1];
        }
        if (op.text == "/") {
            require(2, 2);
            return args[0] / args[1];
        }
        if (op.text == "^") {
            require(2, 2);
            double e = 0.0;
            if (args[1].op() != FieldExpr::Op::Constant || !parse_number(arg_tokens[1].text, e) ||
                e != std::floor(e) || std::abs(e) > 64) {
                fail(arg_tokens[1], "exponent of '^' must be an integer literal in [-64, 64]");
            }
            return pow(args[0], static_cast<int>(e));
        }
        if (op.text == "sin" || op.text == "cos" || op.text == "exp") {
            require(1, 1);
            if (op.text == "sin") return sin(args[0]);
            if (op.text == "cos") return cos(args[0]);
            return exp(args[0]);
        }
        fail(op, "unknown operator '" + op.text + "'");
    }

    Lexer lex_;
    Token tok_;
};

} // namespace

FieldExpr FieldExpr::parse(std::string_view text) { return Parser(text).parse_all(); }

} // namespace magheat
