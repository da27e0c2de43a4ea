#include "contactkit/expr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>

namespace contactkit {

ParseError::ParseError(const std::string& what, std::size_t offset)
    : std::runtime_error(what + " at byte " + std::to_string(offset)), offset_(offset) {}

Expr make_node(NodeKind kind, std::vector<Expr> children, double value, std::string name,
               Function f) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->children = std::move(children);
    n->value = value;
    n->name = std::move(name);
    n->function = f;
    return Expr(std::shared_ptr<const Node>(std::move(n)));
}

namespace {

Expr binary(NodeKind k, const Expr& a, const Expr& b) {
    return make_node(k, {a, b}, 0.0, {}, Function::Sin);
}

double apply(Function f, double x) {
    switch (f) {
        case Function::Sin: return std::sin(x);
        case Function::Cos: return std::cos(x);
        case Function::Tan: return std::tan(x);
        case Function::Exp: return std::exp(x);
        case Function::Log: return std::log(x);
        case Function::Sqrt: return std::sqrt(x);
    }
    return 0.0;
}

Expr fold_if_finite(double v, const std::function<Expr()>& otherwise) {
    if (std::isfinite(v)) return Expr::constant(v);
    return otherwise();
}

}  // namespace

Expr::Expr() : Expr(constant(0.0)) {}
Expr::Expr(double value) : Expr(constant(value)) {}

Expr Expr::constant(double value) {
    return make_node(NodeKind::Constant, {}, value, {}, Function::Sin);
}

Expr Expr::variable(std::string name) {
    return make_node(NodeKind::Variable, {}, 0.0, std::move(name), Function::Sin);
}

Expr Expr::call(Function f, Expr arg) {
    if (arg.is_constant()) {
        const double v = apply(f, arg.value());
        if (std::isfinite(v)) return constant(v);
    }
    return make_node(NodeKind::Call, {std::move(arg)}, 0.0, {}, f);
}

NodeKind Expr::kind() const { return node_->kind; }
double Expr::value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
Function Expr::function() const { return node_->function; }
const std::vector<Expr>& Expr::children() const { return node_->children; }

std::vector<std::string> Expr::variables() const {
    std::set<std::string> out;
    std::function<void(const Expr&)> walk = [&](const Expr& e) {
        if (e.kind() == NodeKind::Variable) out.insert(e.name());
        for (const auto& c : e.children()) walk(c);
    };
    walk(*this);
    return {out.begin(), out.end()};
}

bool Expr::depends_on(std::string_view var) const {
    if (kind() == NodeKind::Variable) return name() == var;
    return std::any_of(children().begin(), children().end(),
                       [&](const Expr& c) { return c.depends_on(var); });
}

const char* function_name(Function f) {
    switch (f) {
        case Function::Sin: return "sin";
        case Function::Cos: return "cos";
        case Function::Tan: return "tan";
        case Function::Exp: return "exp";
        case Function::Log: return "log";
        case Function::Sqrt: return "sqrt";
    }
    return "?";
}

std::string Expr::to_string() const {
    switch (kind()) {
        case NodeKind::Constant: {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", value());
            return value() < 0 ? "(" + std::string(buf) + ")" : std::string(buf);
        }
        case NodeKind::Variable: return name();
        case NodeKind::Neg: return "(-" + children()[0].to_string() + ")";
        case NodeKind::Call:
            return std::string(function_name(function())) + "(" + children()[0].to_string() + ")";
        default: break;
    }
    const char* op = "+";
    switch (kind()) {
        case NodeKind::Sub: op = " - "; break;
        case NodeKind::Mul: op = "*"; break;
        case NodeKind::Div: op = "/"; break;
        case NodeKind::Pow: op = "^"; break;
        default: op = " + "; break;
    }
    return "(" + children()[0].to_string() + op + children()[1].to_string() + ")";
}

Expr operator+(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant()) return Expr::constant(a.value() + b.value());
    if (a.is_constant(0.0)) return b;
    if (b.is_constant(0.0)) return a;
    return binary(NodeKind::Add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant()) return Expr::constant(a.value() - b.value());
    if (b.is_constant(0.0)) return a;
    if (a.is_constant(0.0)) return -b;
    return binary(NodeKind::Sub, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant()) return Expr::constant(a.value() * b.value());
    if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr::constant(0.0);
    if (a.is_constant(1.0)) return b;
    if (b.is_constant(1.0)) return a;
    if (a.is_constant(-1.0)) return -b;
    if (b.is_constant(-1.0)) return -a;
    return binary(NodeKind::Mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
    if (b.is_constant(0.0)) throw std::domain_error("division by the constant 0");
    if (a.is_constant() && b.is_constant()) return Expr::constant(a.value() / b.value());
    if (a.is_constant(0.0)) return Expr::constant(0.0);
    if (b.is_constant(1.0)) return a;
    return binary(NodeKind::Div, a, b);
}

Expr operator-(const Expr& a) {
    if (a.is_constant()) return Expr::constant(-a.value());
    if (a.kind() == NodeKind::Neg) return a.children()[0];
    return make_node(NodeKind::Neg, {a}, 0.0, {}, Function::Sin);
}

Expr pow(const Expr& base, const Expr& exponent) {
    if (base.is_constant() && exponent.is_constant()) {
        return fold_if_finite(std::pow(base.value(), exponent.value()),
                              [&] { return binary(NodeKind::Pow, base, exponent); });
    }
    if (exponent.is_constant(0.0)) return Expr::constant(1.0);
    if (exponent.is_constant(1.0)) return base;
    return binary(NodeKind::Pow, base, exponent);
}

Expr sin(const Expr& a) { return Expr::call(Function::Sin, a); }
Expr cos(const Expr& a) { return Expr::call(Function::Cos, a); }
Expr tan(const Expr& a) { return Expr::call(Function::Tan, a); }
Expr exp(const Expr& a) { return Expr::call(Function::Exp, a); }
Expr log(const Expr& a) { return Expr::call(Function::Log, a); }
Expr sqrt(const Expr& a) { return Expr::call(Function::Sqrt, a); }

Expr diff(const Expr& e, std::string_view var) {
    if (!e.depends_on(var)) return Expr::constant(0.0);
    const auto& c = e.children();
    switch (e.kind()) {
        case NodeKind::Constant: return Expr::constant(0.0);
        case NodeKind::Variable: return Expr::constant(e.name() == var ? 1.0 : 0.0);
        case NodeKind::Add: return diff(c[0], var) + diff(c[1], var);
        case NodeKind::Sub: return diff(c[0], var) - diff(c[1], var);
        case NodeKind::Neg: return -diff(c[0], var);
        case NodeKind::Mul: return diff(c[0], var) * c[1] + c[0] * diff(c[1], var);
        case NodeKind::Div:
            return (diff(c[0], var) * c[1] - c[0] * diff(c[1], var)) / pow(c[1], Expr(2.0));
        case NodeKind::Pow: {
            const Expr& f = c[0];
            const Expr& g = c[1];
            if (!g.depends_on(var)) return g * pow(f, g - Expr(1.0)) * diff(f, var);
            if (!f.depends_on(var)) return e * log(f) * diff(g, var);
            return e * (diff(g, var) * log(f) + g * diff(f, var) / f);
        }
        case NodeKind::Call: {
            const Expr& u = c[0];
            const Expr du = diff(u, var);
            switch (e.function()) {
                case Function::Sin: return cos(u) * du;
                case Function::Cos: return -(sin(u) * du);
                case Function::Tan: return du / pow(cos(u), Expr(2.0));
                case Function::Exp: return e * du;
                case Function::Log: return du / u;
                case Function::Sqrt: return du / (Expr(2.0) * e);
            }
        }
    }
    return Expr::constant(0.0);
}

Expr substitute(const Expr& e, const std::map<std::string, Expr>& replacements) {
    const auto& c = e.children();
    switch (e.kind()) {
        case NodeKind::Constant: return e;
        case NodeKind::Variable: {
            auto it = replacements.find(e.name());
            return it == replacements.end() ? e : it->second;
        }
        case NodeKind::Add: return substitute(c[0], replacements) + substitute(c[1], replacements);
        case NodeKind::Sub: return substitute(c[0], replacements) - substitute(c[1], replacements);
        case NodeKind::Mul: return substitute(c[0], replacements) * substitute(c[1], replacements);
        case NodeKind::Div: return substitute(c[0], replacements) / substitute(c[1], replacements);
        case NodeKind::Pow: return pow(substitute(c[0], replacements), substitute(c[1], replacements));
        case NodeKind::Neg: return -substitute(c[0], replacements);
        case NodeKind::Call: return Expr::call(e.function(), substitute(c[0], replacements));
    }
    return e;
}

Binding::Binding(std::span<const std::string> names, std::span<const double> values)
    : names_(names), values_(values) {
    if (names.size() != values.size()) throw std::invalid_argument("binding size mismatch");
}

const double* Binding::find(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return &values_[i];
    return nullptr;
}

namespace {

[[noreturn]] void domain_error(const Expr& at, const char* why) {
    throw EvalError(std::string(why) + " in " + at.to_string());
}

double eval_node(const Expr& e, const Binding& b) {
    const auto& c = e.children();
    switch (e.kind()) {
        case NodeKind::Constant: return e.value();
        case NodeKind::Variable: {
            const double* v = b.find(e.name());
            if (!v) throw EvalError("unbound variable " + e.name());
            return *v;
        }
        case NodeKind::Add: return eval_node(c[0], b) + eval_node(c[1], b);
        case NodeKind::Sub: return eval_node(c[0], b) - eval_node(c[1], b);
        case NodeKind::Mul: return eval_node(c[0], b) * eval_node(c[1], b);
        case NodeKind::Neg: return -eval_node(c[0], b);
        case NodeKind::Div: {
            const double den = eval_node(c[1], b);
            if (den == 0.0) domain_error(e, "division by zero");
            return eval_node(c[0], b) / den;
        }
        case NodeKind::Pow: {
            const double x = eval_node(c[0], b);
            const double y = eval_node(c[1], b);
            if (y == 2.0) return x * x;
            const double r = std::pow(x, y);
            if (std::isnan(r)) domain_error(e, "pow domain error");
            if (x == 0.0 && y < 0.0) domain_error(e, "division by zero");
            return r;
        }
        case NodeKind::Call: {
            const double x = eval_node(c[0], b);
            if (e.function() == Function::Log && x <= 0.0) domain_error(e, "log of non-positive value");
            if (e.function() == Function::Sqrt && x < 0.0) domain_error(e, "sqrt of negative value");
            return apply(e.function(), x);
        }
    }
    return 0.0;
}

}  // namespace

double eval(const Expr& e, const Binding& binding) { return eval_node(e, binding); }

double eval(const Expr& e, const std::map<std::string, double>& binding) {
    std::vector<std::string> names;
    std::vector<double> values;
    for (const auto& [k, v] : binding) {
        names.push_back(k);
        values.push_back(v);
    }
    return eval_node(e, Binding(names, values));
}

}  // namespace contactkit
