#pragma once

// Hand-built charts and forms shared by the unit tests. Kept separate from the
// catalog so that catalog load-time verification is tested against these.

#include <numbers>
#include <string>
#include <vector>

#include "contactkit/calculus.hpp"

namespace fixtures {

using namespace contactkit;

inline constexpr double kPi = std::numbers::pi;

inline Expr var(const std::string& s) { return Expr::variable(s); }

/// (z, p1..pn, q1..qn) with eta = dz - sum p_i dq_i.
inline DifferentialForm darboux(int n) {
    std::vector<std::string> coords{"z"};
    for (int i = 1; i <= n; ++i) coords.push_back("p" + std::to_string(i));
    for (int i = 1; i <= n; ++i) coords.push_back("q" + std::to_string(i));
    auto chart = make_chart("darboux" + std::to_string(n), coords);
    std::vector<Expr> c(coords.size(), Expr(0.0));
    c[0] = Expr(1.0);
    for (int i = 1; i <= n; ++i) c[n + i] = -var("p" + std::to_string(i));
    return DifferentialForm::one_form(chart, c);
}

/// (xi1, xi2, phi) with eta = cos^2 phi dxi1 + sin^2 phi dxi2.
inline DifferentialForm hopf() {
    auto chart = make_chart("hopf", {"xi1", "xi2", "phi"}, {{0, 2 * kPi}, {0, 2 * kPi}, {0, kPi / 2}},
                            {true, true, false});
    return DifferentialForm::one_form(chart, {pow(cos(var("phi")), 2), pow(sin(var("phi")), 2), Expr(0.0)});
}

/// (q1..qn, p1..pn, t) with eta = 1/2 sum (q dp - p dq) + dt.
inline DifferentialForm exact(int n) {
    std::vector<std::string> coords;
    for (int i = 1; i <= n; ++i) coords.push_back("q" + std::to_string(i));
    for (int i = 1; i <= n; ++i) coords.push_back("p" + std::to_string(i));
    coords.push_back("t");
    auto chart = make_chart("exact" + std::to_string(n), coords);
    std::vector<Expr> c(coords.size(), Expr(0.0));
    for (int i = 1; i <= n; ++i) {
        c[i - 1] = Expr(-0.5) * var("p" + std::to_string(i));
        c[n + i - 1] = Expr(0.5) * var("q" + std::to_string(i));
    }
    c.back() = Expr(1.0);
    return DifferentialForm::one_form(chart, c);
}

}  // namespace fixtures

namespace fixtures {

/// Connection data theta = -p dq on the (q, p) plane; omega = dq ^ dp.
inline DifferentialForm darboux_theta() {
    auto chart = make_chart("plane", {"q", "p"});
    return DifferentialForm::one_form(chart, {-var("p"), Expr(0.0)});
}

/// Hopf connection theta = sin^2 phi dpsi on (phi, psi); omega = sin 2phi dphi ^ dpsi.
inline DifferentialForm hopf_theta() {
    auto chart = make_chart("s2", {"phi", "psi"}, {{0, kPi / 2}, {0, 2 * kPi}}, {false, true});
    return DifferentialForm::one_form(chart, {Expr(0.0), pow(sin(var("phi")), 2)});
}

}  // namespace fixtures
