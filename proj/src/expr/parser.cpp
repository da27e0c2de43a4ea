#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "contactkit/expr.hpp"

namespace contactkit {

namespace {

class Parser {
public:
    Parser(std::string_view text, std::span<const std::string> vars) : text_(text), vars_(vars) {}

    Expr run() {
        Expr e = expression();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
        return e;
    }

private:
    std::string_view text_;
    std::span<const std::string> vars_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Expr expression() {
        Expr lhs = term();
        for (;;) {
            if (accept('+')) lhs = lhs + term();
            else if (accept('-')) lhs = lhs - term();
            else return lhs;
        }
    }

    Expr term() {
        Expr lhs = factor();
        for (;;) {
            if (accept('*')) {
                lhs = lhs * factor();
            } else if (accept('/')) {
                const std::size_t at = pos_;
                Expr rhs = factor();
                if (rhs.is_constant(0.0)) throw ParseError("division by the constant 0", at);
                lhs = lhs / rhs;
            } else {
                return lhs;
            }
        }
    }

    Expr factor() {
        Expr b = base();
        if (accept('^')) return pow(b, factor());
        return b;
    }

    Expr base() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const char c = text_[pos_];
        if (c == '-') {
            ++pos_;
            return -base();
        }
        if (c == '(') {
            ++pos_;
            Expr e = expression();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        fail("unexpected character '" + std::string(1, c) + "'");
    }

    Expr number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                ++pos_;
                ++n;
            }
            return n;
        };
        std::size_t n = digits();
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            n += digits();
        }
        if (n == 0) fail("malformed number");
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            const std::size_t save = pos_;
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (digits() == 0) pos_ = save;
        }
        const std::string lexeme(text_.substr(start, pos_ - start));
        const double v = std::strtod(lexeme.c_str(), nullptr);
        if (!std::isfinite(v)) throw ParseError("number out of range", start);
        return Expr::constant(v);
    }

    Expr identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string id(text_.substr(start, pos_ - start));

        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == '(') {
            static const std::pair<const char*, Function> table[] = {
                {"sin", Function::Sin}, {"cos", Function::Cos}, {"tan", Function::Tan},
                {"exp", Function::Exp}, {"log", Function::Log}, {"sqrt", Function::Sqrt}};
            for (const auto& [fname, f] : table) {
                if (id == fname) {
                    ++pos_;
                    Expr arg = expression();
                    if (!accept(')')) fail("expected ')'");
                    return Expr::call(f, std::move(arg));
                }
            }
            throw ParseError("unknown function " + id, start);
        }
        for (const auto& v : vars_)
            if (v == id) return Expr::variable(id);
        if (id == "pi") return Expr::constant(std::numbers::pi);
        if (id == "e") return Expr::constant(std::numbers::e);
        throw ParseError("unknown identifier " + id, start);
    }
};

}  // namespace

Expr parse(std::string_view text, std::span<const std::string> variables) {
    return Parser(text, variables).run();
}

Expr parse(std::string_view text, std::initializer_list<std::string> variables) {
    std::vector<std::string> v(variables);
    return parse(text, std::span<const std::string>(v));
}

}  // namespace contactkit
