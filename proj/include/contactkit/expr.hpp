#pragma once

// Immutable symbolic expressions over named chart coordinates.
//
// Expressions are built by the parser or by the arithmetic helpers below and
// never change afterwards, so they can be shared freely between threads.
// Differentiation is exact; simplification only folds constants and applies
// the 0/1 identities and double negation.

#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace contactkit {

enum class NodeKind { Constant, Variable, Add, Sub, Mul, Div, Pow, Neg, Call };

enum class Function { Sin, Cos, Tan, Exp, Log, Sqrt };

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t offset);
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Node;

class Expr {
public:
    /// The constant 0.
    Expr();
    Expr(double value);  // NOLINT: implicit on purpose, constants read naturally

    static Expr constant(double value);
    static Expr variable(std::string name);
    static Expr call(Function f, Expr arg);

    NodeKind kind() const;
    double value() const;               // Constant only
    const std::string& name() const;    // Variable only
    Function function() const;          // Call only
    const std::vector<Expr>& children() const;

    bool is_constant() const { return kind() == NodeKind::Constant; }
    bool is_constant(double v) const { return is_constant() && value() == v; }

    /// Names of all variables occurring in the tree, sorted and unique.
    std::vector<std::string> variables() const;
    bool depends_on(std::string_view var) const;

    /// Parseable text; parse(to_string()) evaluates identically.
    std::string to_string() const;

    const Node* node() const { return node_.get(); }

private:
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    friend Expr make_node(NodeKind, std::vector<Expr>, double, std::string, Function);
    std::shared_ptr<const Node> node_;
};

struct Node {
    NodeKind kind;
    std::vector<Expr> children;
    double value = 0.0;
    std::string name;
    Function function = Function::Sin;
};

// Simplifying constructors.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, const Expr& exponent);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr tan(const Expr& a);
Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr sqrt(const Expr& a);

const char* function_name(Function f);

/// Parses `text` using the grammar
///   expr := term (('+'|'-') term)*
///   term := factor (('*'|'/') factor)*
///   factor := base ('^' factor)?
///   base := number | ident | ident '(' expr ')' | '(' expr ')' | '-' base
/// Identifiers must be one of `variables`, a known function or pi/e.
Expr parse(std::string_view text, std::span<const std::string> variables);
Expr parse(std::string_view text, std::initializer_list<std::string> variables);

Expr diff(const Expr& e, std::string_view var);

/// Simultaneous substitution of variables by expressions.
Expr substitute(const Expr& e, const std::map<std::string, Expr>& replacements);

/// Values bound to variable names. Lookup is linear; charts are small.
class Binding {
public:
    Binding(std::span<const std::string> names, std::span<const double> values);
    const double* find(std::string_view name) const;

private:
    std::span<const std::string> names_;
    std::span<const double> values_;
};

double eval(const Expr& e, const Binding& binding);
double eval(const Expr& e, const std::map<std::string, double>& binding);

}  // namespace contactkit
