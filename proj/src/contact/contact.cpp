#include "contactkit/contact.hpp"

#include <cmath>
#include <sstream>

namespace contactkit {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

std::string fresh_name(const Chart& chart, std::string base) {
    while (chart.index_of(base)) base += "_";
    return base;
}

DifferentialForm extend_to(const DifferentialForm& form, const ChartPtr& bigger) {
    const auto& small = form.chart()->coords();
    const auto& big = bigger->coords();
    if (big.size() < small.size() || !std::equal(small.begin(), small.end(), big.begin()))
        throw GeometryError("extend_to: " + bigger->name() + " does not start with the coordinates of " +
                            form.chart()->name());
    return DifferentialForm(bigger, form.degree(), form.coefficients());
}

DifferentialForm contact_volume(const DifferentialForm& eta) {
    const std::size_t d = eta.chart()->dim();
    if (eta.degree() != 1) throw GeometryError("contact form must be a 1-form");
    if (d % 2 == 0) throw GeometryError("contact condition needs an odd-dimensional chart, got dimension " +
                                        std::to_string(d));
    const DifferentialForm d_eta = exterior_derivative(eta);
    DifferentialForm v = eta;
    double factorial = 1.0;
    for (std::size_t k = 0; k < (d - 1) / 2; ++k) {
        v = wedge(v, d_eta);
        factorial *= static_cast<double>(k + 1);
    }
    std::map<MultiIndex, Expr> c;
    for (const auto& [idx, e] : v.coefficients()) c.emplace(idx, e / Expr(factorial));
    return DifferentialForm(v.chart(), v.degree(), std::move(c));
}

ContactReport is_contact(const DifferentialForm& eta, std::size_t samples, std::uint64_t seed, Execution ex) {
    const DifferentialForm v = contact_volume(eta);
    const auto points = eta.chart()->samples(seed, samples);
    const MaxResult m = min_over(points.size(), [&](std::size_t i) { return std::abs(v.value_at(points[i])); }, ex);
    ContactReport r;
    r.samples = samples;
    r.min_volume = m.value;
    r.pass = samples > 0 && m.value > kContactThreshold;
    if (!points.empty()) r.worst = points[m.index];
    return r;
}

std::pair<double, double> reeb_residuals(const DifferentialForm& eta, const DifferentialForm& d_eta,
                                         std::span<const double> x, std::span<const double> r) {
    const Eigen::VectorXd a = eta.at(x).as_vector();
    const Eigen::MatrixXd m = d_eta.at(x).as_matrix();
    const Eigen::Map<const Eigen::VectorXd> rv(r.data(), static_cast<long>(r.size()));
    return {std::abs(a.dot(rv) - 1.0), (m.transpose() * rv).cwiseAbs().maxCoeff()};
}

Point reeb_at(const DifferentialForm& eta, const DifferentialForm& d_eta, std::span<const double> x) {
    const Eigen::VectorXd a = eta.at(x).as_vector();
    const Eigen::MatrixXd m = d_eta.at(x).as_matrix();
    // (M + a a^T) R = a. For v in the kernel, v^T M v = 0 forces a.v = 0 and
    // then M v = 0, so the matrix is invertible iff ker a and ker M meet
    // trivially, which is the contact condition.
    const Eigen::MatrixXd b = m + a * a.transpose();
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(b);
    const Eigen::VectorXd r = lu.solve(a);
    Point out(r.data(), r.data() + r.size());
    const auto [e1, e2] = reeb_residuals(eta, d_eta, x, out);
    if (!(lu.rcond() > kReebConditionFloor) || !r.allFinite() || !(e1 < 1e-8) || !(e2 < 1e-8)) {
        std::ostringstream os;
        os << "Reeb system is singular at (";
        for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
        os << "); the contact condition fails there";
        throw GeometryError(os.str());
    }
    return out;
}

VectorField reeb(const DifferentialForm& eta) {
    const DifferentialForm d_eta = exterior_derivative(eta);
    return VectorField::pointwise(eta.chart(),
                                  [eta, d_eta](std::span<const double> x) { return reeb_at(eta, d_eta, x); });
}

ContactChart::ContactChart(DifferentialForm eta, std::size_t samples, std::uint64_t seed)
    : eta_(std::move(eta)), d_eta_(exterior_derivative(eta_)), reeb_(contactkit::reeb(eta_)) {
    report_ = is_contact(eta_, samples, seed);
    if (!report_.pass)
        throw GeometryError("not a contact form on " + chart()->name() + ": min |eta ^ (d eta)^n| = " +
                            fmt(report_.min_volume));
}

std::vector<Check> reeb_checks(const ContactChart& c, std::size_t samples, std::uint64_t seed, Execution ex) {
    const auto points = c.chart()->samples(seed, samples);
    const double res = max_over(points.size(), [&](std::size_t i) {
        const Point r = c.reeb().at(points[i]);
        const auto [e1, e2] = reeb_residuals(c.eta(), c.d_eta(), points[i], r);
        return std::max(e1, e2);
    }, ex).value;
    const std::size_t lie_n = std::min<std::size_t>(samples, 100);
    const auto lie = lie_derivative_fd(c.reeb(), c.eta());
    const double lie_res = max_abs(lie, std::span<const Point>(points.data(), lie_n), ex);
    return {below("reeb_residual", res, 1e-10, samples), below("reeb_invariance", lie_res, 1e-6, lie_n)};
}

RescaleResult conformal_rescale(const ContactChart& c, const Expr& f, std::size_t samples, std::uint64_t seed,
                                double tol, Execution ex) {
    const auto& chart = c.chart();
    const DifferentialForm eta2 = c.eta().scaled(f);
    const DifferentialForm d_eta2 = exterior_derivative(eta2);
    std::vector<Expr> grad;
    for (const auto& name : chart->coords()) grad.push_back(diff(f, name));
    const auto points = chart->samples(seed, samples);

    for (const auto& p : points) {
        const double fv = eval(f, Binding(chart->coords(), p));
        if (!(std::abs(fv) > 1e-12)) throw GeometryError("conformal factor vanishes at a sample point");
    }
    const double res = max_over(points.size(), [&](std::size_t i) {
        const Point& p = points[i];
        const Binding b(chart->coords(), p);
        const double fv = eval(f, b);
        const Point r = c.reeb().at(p);
        const Point r2 = reeb_at(eta2, d_eta2, p);
        Point x(r.size());
        for (std::size_t k = 0; k < x.size(); ++k) x[k] = r2[k] - r[k] / fv;
        Point df(grad.size());
        for (std::size_t k = 0; k < df.size(); ++k) df[k] = eval(grad[k], b);
        const double rf = dot(r, df);
        const Eigen::VectorXd a = c.eta().at(p).as_vector();
        const Eigen::MatrixXd m = c.d_eta().at(p).as_matrix();
        const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<long>(x.size()));
        const Eigen::Map<const Eigen::VectorXd> dfv(df.data(), static_cast<long>(df.size()));
        // i_X d eta = (df - R(f) eta) / f^2
        const Eigen::VectorXd lhs = m.transpose() * xv;
        const Eigen::VectorXd rhs = (dfv - rf * a) / (fv * fv);
        return std::max((lhs - rhs).cwiseAbs().maxCoeff(), std::abs(a.dot(xv)));
    }, ex).value;
    return {eta2, res, res < tol};
}

SmoothMap scale_fiber(const ChartPtr& chart, const std::string& s, double nu) {
    std::vector<Expr> c;
    for (const auto& name : chart->coords())
        c.push_back(name == s ? Expr(nu) * Expr::variable(name) : Expr::variable(name));
    return SmoothMap(chart, chart, std::move(c));
}

SmoothMap fiber_section(const ChartPtr& base, const Symplectization& sy, double value) {
    std::vector<Expr> c;
    for (const auto& name : base->coords()) c.push_back(Expr::variable(name));
    c.push_back(Expr(value));
    return SmoothMap(base, sy.chart, std::move(c));
}

Symplectization symplectize(const ContactChart& c, std::size_t samples, std::uint64_t seed, Execution ex) {
    Symplectization sy{nullptr, fresh_name(*c.chart(), "s"), c.eta(), c.eta(), c.eta(), c.reeb(), {}};
    sy.chart = std::make_shared<const Chart>(
        c.chart()->extended("symp(" + c.chart()->name() + ")", {sy.s}, {Interval{0.0, INFINITY}}, {false}));
    const std::size_t is = sy.chart->dim() - 1;
    const Expr s = Expr::variable(sy.s);
    sy.eta = extend_to(c.eta(), sy.chart);
    sy.theta = sy.eta.scaled(s);
    sy.omega = exterior_derivative(sy.theta);
    std::vector<Expr> nabla(sy.chart->dim(), Expr(0.0));
    nabla[is] = s;
    sy.liouville = VectorField::symbolic(sy.chart, nabla);

    const auto points = sy.chart->samples(seed, samples);
    const DifferentialForm explicit_omega =
        wedge(DifferentialForm::basis(sy.chart, {static_cast<int>(is)}), sy.eta) +
        extend_to(c.d_eta(), sy.chart).scaled(s);
    sy.checks.push_back(below("symplectic_form", max_residual(sy.omega, explicit_omega, points, ex), 1e-12, samples));
    sy.checks.push_back(below("liouville_contraction",
                              max_residual(interior_product(sy.liouville, sy.omega), sy.theta, points, ex), 1e-12,
                              samples));
    const DifferentialForm scaled = pullback(scale_fiber(sy.chart, sy.s, 2.0), sy.omega);
    sy.checks.push_back(
        below("homogeneity", max_residual(scaled, sy.omega.scaled(Expr(2.0)), points, ex), 1e-12, samples));
    const std::size_t lie_n = std::min<std::size_t>(samples, 100);
    const std::span<const Point> lie_pts(points.data(), lie_n);
    const VectorField numeric = VectorField::pointwise(sy.chart, [f = sy.liouville](std::span<const double> x) {
        return f.at(x);
    });
    sy.checks.push_back(
        below("liouville_invariance", max_residual(lie_derivative_fd(numeric, sy.omega), sy.omega, lie_pts, ex), 1e-6,
              lie_n));
    const int dim = static_cast<int>(sy.chart->dim());
    const double worst_rank = min_over(points.size(), [&](std::size_t i) {
        return static_cast<double>(numeric_rank(sy.omega.at(points[i]).as_matrix()));
    }, ex).value;
    sy.checks.push_back(above("nondegenerate", worst_rank, dim - 0.5, samples, "min rank of omega"));
    return sy;
}

SymplecticToContact symplectic_to_contact(const DifferentialForm& omega, const VectorField& nu, const SmoothMap& embed,
                                          std::size_t samples, std::uint64_t seed, Execution ex) {
    if (omega.degree() != 2) throw GeometryError("symplectic_to_contact: omega must be a 2-form");
    if (!nu.is_symbolic()) throw GeometryError("symplectic_to_contact: the Liouville field must be symbolic");
    if (!embed.target()->same_as(*omega.chart())) throw GeometryError("symplectic_to_contact: chart mismatch");
    const auto& src = embed.source();
    const auto ys = src->samples(seed, samples);
    std::vector<Point> xs(ys.size());
    for (std::size_t i = 0; i < ys.size(); ++i) xs[i] = embed.at(ys[i]);

    const DifferentialForm lie = lie_derivative_symbolic(nu, omega);
    const double hom = max_residual(lie, omega, xs, ex);
    if (!(hom < 1e-6)) throw GeometryError("symplectic_to_contact: L_nu omega != omega (residual " + fmt(hom) + ")");

    const int k = static_cast<int>(src->dim());
    const double worst_rank = min_over(ys.size(), [&](std::size_t i) {
        Eigen::MatrixXd m(embed.target()->dim(), k + 1);
        m.leftCols(k) = embed.jacobian_at(ys[i]);
        const Point v = nu.at(xs[i]);
        m.col(k) = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<long>(v.size()));
        return static_cast<double>(numeric_rank(m));
    }, ex).value;
    if (worst_rank < k + 1) throw GeometryError("symplectic_to_contact: nu is not transversal to the hypersurface");

    SymplecticToContact out{pullback(embed, interior_product(nu, omega)), {}};
    out.checks.push_back(below("homogeneity", hom, 1e-6, samples));
    out.checks.push_back(above("transversality", worst_rank, k + 0.5, samples, "min rank of [d embed | nu]"));
    const ContactReport cr = is_contact(out.eta, samples, seed, ex);
    out.checks.push_back(above("contact_condition", cr.min_volume, kContactThreshold, samples));
    const DifferentialForm restricted = pullback(embed, omega);
    out.checks.push_back(below("restriction", max_residual(exterior_derivative(out.eta), restricted, ys, ex), 1e-8,
                               samples, "d eta vs embedded omega"));
    return out;
}

ContactToSymplectic contact_to_symplectic(const ContactChart& c, const SmoothMap& p, const SmoothMap& sigma,
                                          std::size_t samples, std::uint64_t seed, Execution ex) {
    const auto& base = p.target();
    if (!p.source()->same_as(*c.chart()) || !sigma.target()->same_as(*c.chart()) || !sigma.source()->same_as(*base))
        throw GeometryError("contact_to_symplectic: chart mismatch between projection, section and contact chart");
    const auto bs = base->samples(seed, samples);
    const auto xs = c.chart()->samples(seed, samples);

    const double sec = max_over(bs.size(), [&](std::size_t i) {
        return base->distance(p.at(sigma.at(bs[i])), bs[i]);
    }, ex).value;
    if (!(sec < 1e-10)) throw GeometryError("contact_to_symplectic: sigma is not a section of p (residual " + fmt(sec) + ")");
    const double vert = max_over(xs.size(), [&](std::size_t i) {
        const Point v = p.push(xs[i], c.reeb().at(xs[i]));
        double m = 0.0;
        for (double vi : v) m = std::max(m, std::abs(vi));
        return m;
    }, ex).value;
    if (!(vert < 1e-10))
        throw GeometryError("contact_to_symplectic: p does not collapse the Reeb direction (residual " + fmt(vert) + ")");

    ContactToSymplectic out{pullback(sigma, c.d_eta()), {}};
    out.checks.push_back(below("section", sec, 1e-10, samples));
    out.checks.push_back(below("reeb_vertical", vert, 1e-10, samples));
    out.checks.push_back(
        below("projection_pullback", max_residual(pullback(p, out.omega), c.d_eta(), xs, ex), 1e-8, samples));
    const double worst_rank = min_over(bs.size(), [&](std::size_t i) {
        return static_cast<double>(numeric_rank(out.omega.at(bs[i]).as_matrix()));
    }, ex).value;
    out.checks.push_back(above("nondegenerate", worst_rank, static_cast<double>(base->dim()) - 0.5, samples,
                               "min rank of omega"));
    return out;
}

IntegralityReport integrality_check(const DifferentialForm& omega, const ParametrizedSurface& surface, double rho,
                                    double tol, std::array<int, 2> grid, bool relative_cycle, Execution ex) {
    if (!(rho > 0.0)) throw GeometryError("integrality_check: rho must be positive");
    if (!surface.closed() && !relative_cycle)
        throw GeometryError("integrality_check: surface is not closed; flag it as a relative cycle to integrate anyway");
    IntegralityReport r;
    r.rho = rho;
    r.integral = surface_integral(omega, surface, grid, ex);
    if (!surface.closed()) return r;
    r.classified = true;
    r.quotient = r.integral / rho;
    r.nearest = std::llround(r.quotient);
    r.deviation = std::abs(r.quotient - static_cast<double>(r.nearest));
    r.pass = r.deviation < tol;
    return r;
}

}  // namespace contactkit
