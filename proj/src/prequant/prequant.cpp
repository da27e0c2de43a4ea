#include "contactkit/prequant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "contactkit/quadrature.hpp"

namespace contactkit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// exp(-2 pi i s / rho), 1 for rho = inf
Complex phase(double s, double rho) {
    if (!std::isfinite(rho)) return 1.0;
    return std::polar(1.0, -kTwoPi * s / rho);
}

// Shift window for phase tests.
double shift_range(double rho) { return std::isfinite(rho) ? rho : 4.0; }

double uniform(std::uint64_t seed, std::uint64_t i, double lo, double hi) {
    auto rng = stream_rng(seed ^ 0x5eedf00dull, i);
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

DifferentialForm liouville_of(const DifferentialForm& omega) {
    const std::size_t dim = omega.chart()->dim();
    DifferentialForm v = DifferentialForm::function(omega.chart(), Expr(1.0));
    double factorial = 1.0;
    for (std::size_t k = 0; k < dim / 2; ++k) {
        v = wedge(v, omega);
        factorial *= static_cast<double>(k + 1);
    }
    std::map<MultiIndex, Expr> c;
    for (const auto& [idx, e] : v.coefficients()) c.emplace(idx, e / Expr(factorial));
    return DifferentialForm(v.chart(), v.degree(), std::move(c));
}

Point add_scaled(std::span<const double> y, double s, const Point& v) {
    Point out(y.begin(), y.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += s * v[i];
    return out;
}

}  // namespace

PrincipalContactData::PrincipalContactData(DifferentialForm theta, double rho, std::optional<double> hbar,
                                           std::size_t samples, std::uint64_t seed)
    : theta_(std::move(theta)),
      omega_(exterior_derivative(theta_)),
      liouville_(liouville_of(omega_)),
      rho_(rho),
      hbar_(hbar),
      t_(fresh_name(*theta_.chart(), "t")),
      contact_([&] {
          if (theta_.degree() != 1) throw GeometryError("connection data must be a 1-form");
          if (theta_.chart()->dim() % 2 != 0) throw GeometryError("the base of a contactification is even-dimensional");
          if (!(rho > 0.0)) throw GeometryError("period must be positive");
          const bool periodic = std::isfinite(rho);
          auto total = std::make_shared<const Chart>(theta_.chart()->extended(
              "bundle(" + theta_.chart()->name() + ")", {t_}, {periodic ? Interval{0.0, rho} : Interval{}},
              {periodic}));
          const auto it = static_cast<int>(total->dim() - 1);
          return ContactChart(DifferentialForm::basis(total, {it}) + extend_to(theta_, total), samples, seed);
      }()) {
    if (std::isfinite(rho_)) {
        const double natural = rho_ / kTwoPi;
        if (hbar_ && std::abs(*hbar_ - natural) > 1e-12 * natural)
            throw GeometryError("hbar must equal rho / 2 pi for a finite period");
        hbar_ = natural;
    } else if (hbar_ && !(*hbar_ > 0.0)) {
        throw GeometryError("hbar must be positive");
    }
    const auto points = total()->samples(seed, samples);
    const std::size_t it = t_index();
    reeb_residual_ = max_over(points.size(), [&](std::size_t i) {
        const Point r = contact_.reeb().at(points[i]);
        double m = 0.0;
        for (std::size_t j = 0; j < r.size(); ++j) m = std::max(m, std::abs(r[j] - (j == it ? 1.0 : 0.0)));
        return m;
    }).value;
    if (!(reeb_residual_ < 1e-10))
        throw GeometryError("Reeb field of dt + theta is not d/dt (residual " + std::to_string(reeb_residual_) + ")");
}

Point PrincipalContactData::project(std::span<const double> y) const {
    return Point(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(base()->dim()));
}

Point PrincipalContactData::at_fiber(std::span<const double> x, double t) const {
    Point y(x.begin(), x.end());
    y.push_back(t);
    return y;
}

EquivariantFunction base_section(std::function<Complex(std::span<const double>)> g, const PrincipalContactData& d) {
    const std::size_t it = d.t_index();
    const double rho = d.rho();
    return {[g = std::move(g), it, rho](std::span<const double> y) {
                return phase(y[it], rho) * g(y.first(it));
            },
            rho};
}

double phase_residual(const EquivariantFunction& F, const PrincipalContactData& d, std::size_t samples,
                      std::uint64_t seed, Execution ex) {
    const auto points = d.total()->samples(seed, samples);
    const std::size_t it = d.t_index();
    const double range = shift_range(F.rho);
    return max_over(points.size(), [&](std::size_t i) {
        const double s = uniform(seed, i, -range, range);
        Point shifted = points[i];
        shifted[it] += s;
        return std::abs(F(shifted) - phase(s, F.rho) * F(points[i]));
    }, ex).value;
}

VectorField hamiltonian_field(const Expr& H, const DifferentialForm& omega) {
    if (omega.degree() != 2) throw GeometryError("hamiltonian_field: omega must be a 2-form");
    const ChartPtr& chart = omega.chart();
    const std::size_t n = chart->dim();
    std::vector<Expr> dH;
    for (const auto& c : chart->coords()) dH.push_back(diff(H, c));

    bool constant = true;
    for (const auto& [idx, c] : omega.coefficients()) constant = constant && c.is_constant();
    if (constant) {
        // M^T X = dH with M_ij = omega(e_i, e_j)
        const Point origin(n, 0.0);
        const Eigen::MatrixXd m = omega.at(origin).as_matrix();
        const Eigen::FullPivLU<Eigen::MatrixXd> lu(m.transpose());
        if (!lu.isInvertible()) throw GeometryError("hamiltonian_field: omega is degenerate");
        const Eigen::MatrixXd inv = lu.inverse();
        std::vector<Expr> comps(n, Expr(0.0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const double a = inv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                if (a != 0.0 && !dH[j].is_constant(0.0)) comps[i] = comps[i] + Expr(a) * dH[j];
            }
        return VectorField::symbolic(chart, std::move(comps));
    }
    if (n == 2) {
        // omega = w dx ^ dy: X = (H_y / w, -H_x / w)
        const Expr w = omega.coefficient({0, 1});
        return VectorField::symbolic(chart, {dH[1] / w, -(dH[0] / w)});
    }
    return VectorField::pointwise(chart, [omega, dH, chart, n](std::span<const double> x) {
        const Eigen::MatrixXd m = omega.at(x).as_matrix();
        Binding b(chart->coords(), x);
        Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
        for (std::size_t j = 0; j < n; ++j) rhs(static_cast<Eigen::Index>(j)) = eval(dH[j], b);
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(m.transpose());
        if (!(lu.rcond() > kReebConditionFloor)) throw GeometryError("hamiltonian_field: omega is singular at a point");
        const Eigen::VectorXd v = lu.solve(rhs);
        return Point(v.data(), v.data() + v.size());
    });
}

double hamiltonian_residual(const VectorField& x, const Expr& H, const DifferentialForm& omega,
                            std::span<const Point> points, Execution ex) {
    const DifferentialForm dH = exterior_derivative(DifferentialForm::function(omega.chart(), H));
    const PointwiseForm ix = interior_product_pointwise(x, omega);
    return max_residual(ix, dH, points, ex);
}

Expr poisson_bracket(const Expr& f, const Expr& g, const DifferentialForm& omega) {
    // omega(X_f, X_g) = -dg(X_f) = df(X_g)
    const VectorField xg = hamiltonian_field(g, omega);
    if (!xg.is_symbolic()) throw GeometryError("poisson_bracket needs a symbolic Hamiltonian field");
    return xg.apply(f);
}

VectorField horizontal_lift(const VectorField& x, const PrincipalContactData& d) {
    if (!x.chart()->same_as(*d.base())) throw GeometryError("horizontal_lift: field is not on the base chart");
    const std::size_t n = d.base()->dim();
    const auto& h = d.theta();
    if (x.is_symbolic()) {
        std::vector<Expr> comps = x.components();
        Expr vertical(0.0);
        for (const auto& [idx, c] : h.coefficients()) vertical = vertical - c * comps[static_cast<std::size_t>(idx[0])];
        comps.push_back(vertical);
        return VectorField::symbolic(d.total(), std::move(comps));
    }
    return VectorField::pointwise(d.total(), [x, h, n](std::span<const double> y) {
        const auto xb = y.first(n);
        Point v = x.at(xb);
        const Eigen::VectorXd a = h.at(xb).as_vector();
        double vertical = 0.0;
        for (std::size_t i = 0; i < n; ++i) vertical -= a(static_cast<Eigen::Index>(i)) * v[i];
        v.push_back(vertical);
        return v;
    });
}

std::vector<Check> lift_checks(const VectorField& x, const PrincipalContactData& d, std::size_t samples,
                               std::uint64_t seed, Execution ex) {
    const VectorField xh = horizontal_lift(x, d);
    const auto points = d.total()->samples(seed, samples);
    const std::size_t n = d.base()->dim();
    const double horizontal = max_over(points.size(), [&](std::size_t i) {
        const Point v = xh.at(points[i]);
        const Eigen::VectorXd a = d.contact().eta().at(points[i]).as_vector();
        double s = 0.0;
        for (std::size_t j = 0; j < v.size(); ++j) s += a(static_cast<Eigen::Index>(j)) * v[j];
        return std::abs(s);
    }, ex).value;
    const double projects = max_over(points.size(), [&](std::size_t i) {
        const Point v = xh.at(points[i]);
        const Point w = x.at(std::span<const double>(points[i]).first(n));
        double m = 0.0;
        for (std::size_t j = 0; j < n; ++j) m = std::max(m, std::abs(v[j] - w[j]));
        return m;
    }, ex).value;
    return {below("lift_horizontal", horizontal, 1e-12, samples, "|eta(X^h)|"),
            below("lift_projects", projects, 1e-12, samples, "|Tp(X^h) - X|")};
}

EquivariantFunction covariant_derivative(const VectorField& x, const EquivariantFunction& F,
                                         const PrincipalContactData& d, double h) {
    const double r = phase_residual(F, d, 16, kDefaultSeed, Execution::Serial);
    if (!(r < 1e-6))
        throw GeometryError("covariant_derivative: input is not equivariant (phase residual " + std::to_string(r) + ")");
    const VectorField xh = horizontal_lift(x, d);
    return {[xh, F, h](std::span<const double> y) {
                const Point v = xh.at(y);
                return (F(add_scaled(y, h, v)) - F(add_scaled(y, -h, v))) / (2.0 * h);
            },
            F.rho};
}

EquivariantFunction curvature_operator(const VectorField& x, const VectorField& y, const EquivariantFunction& F,
                                       const PrincipalContactData& d) {
    const EquivariantFunction xy = covariant_derivative(x, covariant_derivative(y, F, d), d);
    const EquivariantFunction yx = covariant_derivative(y, covariant_derivative(x, F, d), d);
    const EquivariantFunction br = covariant_derivative(bracket(x, y), F, d);
    return {[xy, yx, br](std::span<const double> p) { return xy(p) - yx(p) - br(p); }, F.rho};
}

namespace {

// (2 pi i / rho) omega(X, Y) F at y
Complex curvature_prediction(const VectorField& x, const VectorField& y, const EquivariantFunction& F,
                             const PrincipalContactData& d, std::span<const double> p) {
    const Point xb = d.project(p);
    const Point vx = x.at(xb), vy = y.at(xb);
    const std::array<Point, 2> vs{vx, vy};
    const double w = d.omega().at(xb)(vs);
    return Complex(0.0, kTwoPi / d.rho()) * w * F(p);
}

Calibration calibrate(const std::vector<Complex>& measured, const std::vector<Complex>& predicted) {
    Calibration c;
    double lo = INFINITY, hi = -INFINITY, sum = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < measured.size(); ++i) {
        if (std::abs(predicted[i]) < 1e-8) continue;
        const double r = (measured[i] / predicted[i]).real();
        lo = std::min(lo, r);
        hi = std::max(hi, r);
        sum += r;
        ++used;
    }
    if (used == 0) throw GeometryError("calibration: prediction vanishes at every point");
    c.ratio = sum / static_cast<double>(used);
    c.spread = hi - lo;
    c.sign = c.ratio >= 0.0 ? 1 : -1;
    return c;
}

}  // namespace

double curvature_residual(const VectorField& x, const VectorField& y, const EquivariantFunction& F,
                          const PrincipalContactData& d, std::span<const Point> points, int sign) {
    const EquivariantFunction k = curvature_operator(x, y, F, d);
    return max_over(points.size(), [&](std::size_t i) {
        return std::abs(k(points[i]) - static_cast<double>(sign) * curvature_prediction(x, y, F, d, points[i]));
    }, Execution::Serial).value;
}

Calibration calibrate_curvature(const EquivariantFunction& F, const PrincipalContactData& d,
                                std::span<const Point> points) {
    const VectorField x = VectorField::coordinate(d.base(), d.base()->coords()[0]);
    const VectorField y = VectorField::coordinate(d.base(), d.base()->coords()[1]);
    const EquivariantFunction k = curvature_operator(x, y, F, d);
    std::vector<Complex> m, p;
    for (const Point& pt : points) {
        m.push_back(k(pt));
        p.push_back(curvature_prediction(x, y, F, d, pt));
    }
    return calibrate(m, p);
}

PrequantumOperatorResult prequantum_op(const Expr& H, const EquivariantFunction& psi, const PrincipalContactData& d) {
    if (!d.hbar()) throw GeometryError("prequantum_op: hbar is undefined for an infinite period; supply it");
    const double hbar = *d.hbar();
    const VectorField xh = hamiltonian_field(H, d.omega());
    const EquivariantFunction dpsi = covariant_derivative(xh, psi, d);
    const auto& coords = d.base()->coords();
    const std::size_t n = d.base()->dim();
    PrequantumOperatorResult r;
    r.out = {[dpsi, psi, H, hbar, coords, n](std::span<const double> y) {
                 const double h = eval(H, Binding(coords, y.first(n)));
                 return Complex(0.0, -hbar) * dpsi(y) + h * psi(y);
             },
             psi.rho};
    r.phase_residual = phase_residual(r.out, d, 16, kDefaultSeed, Execution::Serial);
    return r;
}

namespace {

std::pair<std::vector<Complex>, std::vector<Complex>> dirac_sides(const Expr& f, const Expr& g,
                                                                   const EquivariantFunction& psi,
                                                                   const PrincipalContactData& d,
                                                                   std::span<const Point> points) {
    const EquivariantFunction fg = prequantum_op(f, prequantum_op(g, psi, d).out, d).out;
    const EquivariantFunction gf = prequantum_op(g, prequantum_op(f, psi, d).out, d).out;
    const EquivariantFunction pb = prequantum_op(poisson_bracket(f, g, d.omega()), psi, d).out;
    const Complex ih(0.0, *d.hbar());
    std::vector<Complex> lhs, rhs;
    for (const Point& p : points) {
        lhs.push_back(fg(p) - gf(p));
        rhs.push_back(ih * pb(p));
    }
    return {lhs, rhs};
}

}  // namespace

double dirac_residual(const Expr& f, const Expr& g, const EquivariantFunction& psi, const PrincipalContactData& d,
                      std::span<const Point> points, int sign) {
    const auto [lhs, rhs] = dirac_sides(f, g, psi, d, points);
    double m = 0.0;
    for (std::size_t i = 0; i < lhs.size(); ++i) m = std::max(m, std::abs(lhs[i] - static_cast<double>(sign) * rhs[i]));
    return m;
}

Calibration calibrate_dirac(const Expr& f, const Expr& g, const EquivariantFunction& psi,
                            const PrincipalContactData& d, std::span<const Point> points) {
    const auto [lhs, rhs] = dirac_sides(f, g, psi, d, points);
    return calibrate(lhs, rhs);
}

Complex hermitian_pairing(const EquivariantFunction& F, const EquivariantFunction& G, const PrincipalContactData& d,
                          std::span<const Interval> box, std::span<const int> points, Execution ex) {
    if (box.size() != d.base()->dim() || points.size() != box.size())
        throw GeometryError("hermitian_pairing: box dimension does not match the base");
    const EquivariantFunction product{[F, G](std::span<const double> y) { return F(y) * std::conj(G(y)); },
                                      std::numeric_limits<double>::infinity()};
    const double r = phase_residual(product, d, 16, kDefaultSeed, Execution::Serial);
    if (!(r < 1e-8))
        throw GeometryError("hermitian_pairing: F conj(G) is not fiber invariant (residual " + std::to_string(r) + ")");
    return integrate_box<Complex>(box, points, [&](std::span<const double> x) {
        const Point y = d.at_fiber(x, 0.0);
        return F(y) * std::conj(G(y)) * std::abs(d.liouville().value_at(x));
    }, ex);
}

TensorSection tensor_section(const EquivariantFunction& F1, const PrincipalContactData& d1,
                             const EquivariantFunction& F2, const PrincipalContactData& d2) {
    const bool both_inf = !std::isfinite(F1.rho) && !std::isfinite(F2.rho);
    if (!both_inf && !(std::abs(F1.rho - F2.rho) <= 1e-12 * std::max(std::abs(F1.rho), std::abs(F2.rho))))
        throw GeometryError("tensor_section: period mismatch (" + std::to_string(F1.rho) + " vs " +
                            std::to_string(F2.rho) + ")");
    const Chart& a = *d1.total();
    const Chart& b = *d2.total();
    const std::set<std::string> in_a(a.coords().begin(), a.coords().end());
    const std::set<std::string> in_b(b.coords().begin(), b.coords().end());
    std::vector<std::string> coords;
    std::vector<Interval> domain;
    std::vector<bool> periodic;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        coords.push_back(in_b.count(a.coords()[i]) ? a.coords()[i] + "_1" : a.coords()[i]);
        domain.push_back(a.interval(i));
        periodic.push_back(a.periodic(i));
    }
    for (std::size_t i = 0; i < b.dim(); ++i) {
        coords.push_back(in_a.count(b.coords()[i]) ? b.coords()[i] + "_2" : b.coords()[i]);
        domain.push_back(b.interval(i));
        periodic.push_back(b.periodic(i));
    }
    TensorSection s;
    s.chart = make_chart(a.name() + "(x)" + b.name(), coords, domain, periodic, std::max(a.margin(), b.margin()));
    s.dim1 = a.dim();
    s.t1 = d1.t_index();
    s.t2 = a.dim() + d2.t_index();
    const std::size_t n1 = a.dim();
    s.F = {[F1, F2, n1](std::span<const double> y) { return F1(y.first(n1)) * F2(y.subspan(n1)); }, F1.rho};
    return s;
}

std::vector<Check> tensor_checks(const TensorSection& s, std::size_t samples, std::uint64_t seed) {
    const auto points = s.chart->samples(seed, samples);
    const double range = shift_range(s.F.rho);
    double invariance = 0.0, equivariance = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double t = uniform(seed, i, -range, range);
        const Complex f0 = s.F(points[i]);
        Point anti = points[i], diag = points[i];
        anti[s.t1] += t;
        anti[s.t2] -= t;
        diag[s.t1] += 0.5 * t;
        diag[s.t2] += 0.5 * t;
        invariance = std::max(invariance, std::abs(s.F(anti) - f0));
        equivariance = std::max(equivariance, std::abs(s.F(diag) - phase(t, s.F.rho) * f0));
    }
    return {below("tensor_invariance", invariance, 1e-6, points.size(), "along (R1, -R2)"),
            below("tensor_equivariance", equivariance, 1e-6, points.size(), "along (R1/2, R2/2)")};
}

Complex tensor_pairing(const TensorSection& a, const TensorSection& b, const PrincipalContactData& d1,
                       const PrincipalContactData& d2, std::span<const Interval> box1,
                       std::span<const Interval> box2, std::span<const int> points, Execution ex) {
    const std::size_t n1 = d1.base()->dim(), n2 = d2.base()->dim();
    if (box1.size() != n1 || box2.size() != n2 || points.size() != n1 + n2)
        throw GeometryError("tensor_pairing: box dimension does not match the bases");
    std::vector<Interval> box(box1.begin(), box1.end());
    box.insert(box.end(), box2.begin(), box2.end());
    return integrate_box<Complex>(std::span<const Interval>(box), points, [&](std::span<const double> x) {
        Point y = d1.at_fiber(x.first(n1), 0.0);
        const Point y2 = d2.at_fiber(x.subspan(n1), 0.0);
        y.insert(y.end(), y2.begin(), y2.end());
        const double vol = std::abs(d1.liouville().value_at(x.first(n1))) * std::abs(d2.liouville().value_at(x.subspan(n1)));
        return a.F(y) * std::conj(b.F(y)) * vol;
    }, ex);
}

}  // namespace contactkit
