#include "contactkit/products.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace contactkit {

namespace {

struct Assembly {
    ChartPtr chart;
    ChartPtr base;  // the chart without the extra coordinate
    std::vector<std::string> names1, names2;
    std::string extra;
};

// Concatenates the coordinates of a and b (suffixing shared names) and appends
// one fresh coordinate.
Assembly assemble(const std::string& name, const Chart& a, const Chart& b, const std::string& extra_base,
                  Interval extra_domain, bool extra_periodic) {
    if (!a.excluded().empty() || !b.excluded().empty())
        throw GeometryError("product of charts with excluded regions is not supported (" + a.name() + ", " +
                            b.name() + ")");
    const std::set<std::string> in_a(a.coords().begin(), a.coords().end());
    const std::set<std::string> in_b(b.coords().begin(), b.coords().end());
    Assembly out;
    std::vector<std::string> coords;
    std::vector<Interval> domain;
    std::vector<bool> periodic;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        const auto& c = a.coords()[i];
        out.names1.push_back(in_b.count(c) ? c + "_1" : c);
        domain.push_back(a.interval(i));
        periodic.push_back(a.periodic(i));
    }
    for (std::size_t i = 0; i < b.dim(); ++i) {
        const auto& c = b.coords()[i];
        out.names2.push_back(in_a.count(c) ? c + "_2" : c);
        domain.push_back(b.interval(i));
        periodic.push_back(b.periodic(i));
    }
    coords = out.names1;
    coords.insert(coords.end(), out.names2.begin(), out.names2.end());
    if (std::set<std::string>(coords.begin(), coords.end()).size() != coords.size())
        throw GeometryError("product coordinate names collide after renaming");
    const double margin = std::max(a.margin(), b.margin());
    auto base = std::make_shared<const Chart>(a.name() + "x" + b.name(), coords, domain, periodic, margin);
    out.extra = fresh_name(*base, extra_base);
    out.base = base;
    out.chart = std::make_shared<const Chart>(base->extended(name, {out.extra}, {extra_domain}, {extra_periodic}));
    return out;
}

SmoothMap projection(const ChartPtr& from, const std::vector<std::string>& names, const ChartPtr& to) {
    std::vector<Expr> comps;
    for (const auto& n : names) comps.push_back(Expr::variable(n));
    return SmoothMap(from, to, std::move(comps));
}

Point slice(std::span<const double> x, std::size_t offset, std::size_t n) {
    return Point(x.begin() + static_cast<std::ptrdiff_t>(offset), x.begin() + static_cast<std::ptrdiff_t>(offset + n));
}

VectorField lift(const ChartPtr& product, const VectorField& f, std::size_t offset) {
    const std::size_t n = f.chart()->dim();
    return VectorField::pointwise(product, [f, offset, n, dim = product->dim()](std::span<const double> x) {
        const Point v = f.at(slice(x, offset, n));
        Point out(dim, 0.0);
        std::copy(v.begin(), v.end(), out.begin() + static_cast<std::ptrdiff_t>(offset));
        return out;
    });
}

double sup_diff(const Point& a, const Point& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double dot(const Eigen::VectorXd& a, const Point& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += a(static_cast<Eigen::Index>(i)) * v[i];
    return s;
}

// Largest |eta'(v)| over a basis v of ker eta at x.
double kernel_mismatch(const FormValue& eta, const FormValue& eta_prime) {
    const Eigen::VectorXd a = eta.as_vector();
    const Eigen::VectorXd b = eta_prime.as_vector();
    double m = 0.0;
    for (const Point& v : covector_kernel(a)) m = std::max(m, std::abs(dot(b, v)));
    return m;
}

}  // namespace

const char* to_string(Component c) { return c == Component::Positive ? "pos" : "neg"; }

ProductContactChart::ProductContactChart(const ContactChart& m1, const ContactChart& m2, Component component,
                                         std::size_t samples, std::uint64_t seed)
    : m1_(m1),
      m2_(m2),
      component_(component),
      chart_([&] {
          const Interval t = component == Component::Positive ? Interval{0.0, INFINITY} : Interval{-INFINITY, 0.0};
          return assemble(m1.chart()->name() + "*" + m2.chart()->name() + "[" + to_string(component) + "]",
                          *m1.chart(), *m2.chart(), "t", t, false)
              .chart;
      }()),
      t_(chart_->coords().back()),
      pr1_(projection(chart_, std::vector<std::string>(chart_->coords().begin(),
                                                       chart_->coords().begin() + static_cast<std::ptrdiff_t>(dim1())),
                      m1.chart())),
      pr2_(projection(chart_, std::vector<std::string>(chart_->coords().begin() + static_cast<std::ptrdiff_t>(dim1()),
                                                       chart_->coords().end() - 1),
                      m2.chart())),
      eta_(pullback(pr1_, m1.eta()).scaled(Expr::variable(t_)) + pullback(pr2_, m2.eta()), samples, seed),
      eta_prime_(pullback(pr1_, m1.eta()) + pullback(pr2_, m2.eta()).scaled(Expr(1.0) / Expr::variable(t_)), samples,
                 seed),
      r1_(lift(chart_, m1.reeb(), 0)),
      r2_(lift(chart_, m2.reeb(), dim1())) {}

ProductContactChart contact_product(const ContactChart& m1, const ContactChart& m2, Component component,
                                    std::size_t samples, std::uint64_t seed) {
    ProductContactChart p(m1, m2, component, samples, seed);
    const auto checks = product_checks(p, samples, seed);
    for (const auto& c : checks)
        if (!c.pass)
            throw GeometryError("contact product check " + c.name + " failed: " + std::to_string(c.value) +
                                " (bound " + std::to_string(c.bound) + ")");
    return p;
}

std::vector<Check> product_checks(const ProductContactChart& p, std::size_t samples, std::uint64_t seed,
                                  Execution ex) {
    std::vector<Check> out;
    const ContactReport c = is_contact(p.eta().eta(), samples, seed, ex);
    const ContactReport cp = is_contact(p.eta_prime().eta(), samples, seed, ex);
    out.push_back(above("product_contact", c.min_volume, kContactThreshold, samples, "min |eta ^ (d eta)^n / n!|"));
    out.push_back(
        above("product_contact_prime", cp.min_volume, kContactThreshold, samples, "min |eta' ^ (d eta')^n / n!|"));

    const auto points = p.chart()->samples(seed, samples);
    const VectorField& r = p.eta().reeb();
    const VectorField& rp = p.eta_prime().reeb();
    out.push_back(below("reeb_is_r2",
                        max_over(points.size(), [&](std::size_t i) {
                            return sup_diff(r.at(points[i]), p.r2().at(points[i]));
                        }, ex).value,
                        1e-8, samples));
    out.push_back(below("reeb_prime_is_r1",
                        max_over(points.size(), [&](std::size_t i) {
                            return sup_diff(rp.at(points[i]), p.r1().at(points[i]));
                        }, ex).value,
                        1e-8, samples));
    const std::size_t nk = std::min<std::size_t>(samples, 100);
    out.push_back(below("kernel_agreement",
                        max_over(nk, [&](std::size_t i) {
                            return kernel_mismatch(p.eta().eta().at(points[i]), p.eta_prime().eta().at(points[i]));
                        }, ex).value,
                        1e-10, nk, "max |eta'(v)| over a basis of ker eta"));
    return out;
}

DistributionWitness distribution_witness(const ProductContactChart& p, std::span<const double> x) {
    const std::size_t dim = p.chart()->dim();
    if (x.size() != dim || !p.chart()->contains(x))
        throw GeometryError("distribution_witness: point outside " + p.chart()->name());
    DistributionWitness w;
    auto embed = [&](const Point& v, std::size_t offset) {
        Point out(dim, 0.0);
        std::copy(v.begin(), v.end(), out.begin() + static_cast<std::ptrdiff_t>(offset));
        return out;
    };
    const Point x1 = slice(x, 0, p.dim1());
    const Point x2 = slice(x, p.dim1(), p.dim2());
    for (const Point& v : covector_kernel(p.factor1().eta().at(x1).as_vector())) w.vectors.push_back(embed(v, 0));
    for (const Point& v : covector_kernel(p.factor2().eta().at(x2).as_vector()))
        w.vectors.push_back(embed(v, p.dim1()));
    const double t = x[p.t_index()];
    Point mixed = p.r1().at(x);
    const Point r2 = p.r2().at(x);
    for (std::size_t i = 0; i < dim; ++i) mixed[i] -= t * r2[i];
    w.vectors.push_back(mixed);
    Point dt(dim, 0.0);
    dt[p.t_index()] = 1.0;
    w.vectors.push_back(dt);

    const Eigen::VectorXd a = p.eta().eta().at(x).as_vector();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(w.vectors.size()));
    for (std::size_t c = 0; c < w.vectors.size(); ++c) {
        w.max_residual = std::max(w.max_residual, std::abs(dot(a, w.vectors[c])));
        for (std::size_t r = 0; r < dim; ++r)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = w.vectors[c][r];
    }
    w.rank = numeric_rank(m);
    if (w.rank != static_cast<int>(dim) - 1)
        throw GeometryError("distribution_witness: rank " + std::to_string(w.rank) + ", expected " +
                            std::to_string(dim - 1));
    w.pass = w.max_residual < 1e-10;
    return w;
}

LegendrianReport check_legendrian(const ProductContactChart& p, const LegendrianCandidate& l, std::size_t samples,
                                  std::uint64_t seed, Execution ex) {
    const SmoothMap& map = l.map;
    if (!map.target()->same_as(*p.chart()))
        throw GeometryError("check_legendrian: candidate does not map into " + p.chart()->name());
    LegendrianReport r;
    r.dimension = map.source()->dim();
    const std::size_t expected = (p.chart()->dim() - 1) / 2;
    if (r.dimension != expected)
        throw GeometryError("check_legendrian: dimension " + std::to_string(r.dimension) + ", a Legendrian here has " +
                            std::to_string(expected));
    const auto points = map.source()->samples(seed, samples);
    r.samples = points.size();
    const MaxResult worst_rank = min_over(points.size(), [&](std::size_t i) {
        return static_cast<double>(numeric_rank(map.jacobian_at(points[i])));
    }, ex);
    if (worst_rank.value < static_cast<double>(expected))
        throw GeometryError("check_legendrian: not an immersion at sample " + std::to_string(worst_rank.index));
    for (const Point& s : points)
        if (!p.chart()->contains(map.at(s))) ++r.outside;
    r.max_pullback = max_abs(pullback(map, p.eta().eta()), points, ex);
    r.pass = r.outside == 0 && r.max_pullback < 1e-10;
    return r;
}

LegendrianCandidate graph_c(const ProductContactChart& p, const SmoothMap& phi, const Expr& f) {
    if (!phi.source()->same_as(*p.factor1().chart()) || !phi.target()->same_as(*p.factor2().chart()))
        throw GeometryError("graph_c: phi must map the first factor to the second");
    std::vector<Expr> comps;
    for (const auto& c : phi.source()->coords()) comps.push_back(Expr::variable(c));
    for (const auto& c : phi.components()) comps.push_back(c);
    comps.push_back(-f);
    return {SmoothMap(phi.source(), p.chart(), std::move(comps))};
}

PrincipalPeriodPair principal_product_period(const Period& rho1, const Period& rho2) {
    PrincipalPeriodPair out{rho1, rho2, std::nullopt, std::nullopt, Period::infinite()};
    if (!rho1.is_finite()) {
        out.rho = rho2;
        return out;
    }
    if (!rho2.is_finite()) {
        out.rho = rho1;
        return out;
    }
    const Rational ratio = rho2.value() / rho1.value();
    out.k = ratio.num();
    out.l = ratio.den();
    const Rational rho = rho2.value() / Rational(*out.k);
    if (rho != rho1.value() / Rational(*out.l))
        throw std::logic_error("principal_product_period: rho2/k and rho1/l disagree");
    out.rho = Period::finite(rho);
    return out;
}

Rational torus_first_return(const Rational& rho1, const Rational& rho2, const Rational& a, const Rational& b,
                            int bound) {
    if (!rho1.positive() || !rho2.positive()) throw std::invalid_argument("torus_first_return: periods must be positive");
    if (a + b != Rational(1)) throw std::invalid_argument("torus_first_return: need a + b = 1");
    // (a t - s) / rho1 = m,  (b t + s) / rho2 = n, solved for (t, s) by Cramer's rule
    const Rational a11 = a / rho1, a12 = -Rational(1) / rho1;
    const Rational a21 = b / rho2, a22 = Rational(1) / rho2;
    const Rational det = a11 * a22 - a12 * a21;
    if (det == Rational(0)) throw std::invalid_argument("torus_first_return: curve is parallel to the lattice line");
    std::optional<Rational> best;
    for (int m = -bound; m <= bound; ++m) {
        for (int n = -bound; n <= bound; ++n) {
            const Rational t = (Rational(m) * a22 - a12 * Rational(n)) / det;
            if (t.positive() && (!best || t < *best)) best = t;
        }
    }
    if (!best) throw std::runtime_error("torus_first_return: no return within the search bound");
    return *best;
}

PrincipalProduct principal_product_form(const DifferentialForm& theta1, const DifferentialForm& theta2,
                                        double rho, std::size_t samples, std::uint64_t seed, Execution ex) {
    if (theta1.degree() != 1 || theta2.degree() != 1)
        throw GeometryError("principal_product_form: connection data must be 1-forms");
    if (!(rho > 0.0)) throw GeometryError("principal_product_form: period must be positive");
    const bool periodic = std::isfinite(rho);
    const Interval t_dom = periodic ? Interval{0.0, rho} : Interval{};
    const Chart& n1 = *theta1.chart();
    const Chart& n2 = *theta2.chart();
    const Assembly as = assemble("reduced(" + n1.name() + "*" + n2.name() + ")", n1, n2, "t", t_dom, periodic);
    const SmoothMap p1 = projection(as.chart, as.names1, theta1.chart());
    const SmoothMap p2 = projection(as.chart, as.names2, theta2.chart());
    const std::size_t it = as.chart->dim() - 1;
    const DifferentialForm eta =
        DifferentialForm::basis(as.chart, {static_cast<int>(it)}) + pullback(p1, theta1) + pullback(p2, theta2);
    PrincipalProduct out{ContactChart(eta, samples, seed), {}};

    const auto points = as.chart->samples(seed, samples);
    out.checks.push_back(below("reeb_is_fiber",
                               max_over(points.size(), [&](std::size_t i) {
                                   Point e(as.chart->dim(), 0.0);
                                   e[it] = 1.0;
                                   return sup_diff(out.contact.reeb().at(points[i]), e);
                               }, ex).value,
                               1e-10, samples));

    // omega1 + omega2 on the base product, pulled back along the fiber projection
    const SmoothMap q1 = projection(as.base, as.names1, theta1.chart());
    const SmoothMap q2 = projection(as.base, as.names2, theta2.chart());
    const DifferentialForm omega = pullback(q1, exterior_derivative(theta1)) + pullback(q2, exterior_derivative(theta2));
    std::vector<std::string> base_names = as.names1;
    base_names.insert(base_names.end(), as.names2.begin(), as.names2.end());
    const SmoothMap p = projection(as.chart, base_names, as.base);
    out.checks.push_back(below("curvature_projection", max_residual(out.contact.d_eta(), pullback(p, omega), points, ex),
                               1e-10, samples, "d eta - p^*(omega1 + omega2)"));
    const double worst_rank = min_over(points.size(), [&](std::size_t i) {
        return static_cast<double>(numeric_rank(out.contact.d_eta().at(points[i]).as_matrix()));
    }, ex).value;
    out.checks.push_back(above("curvature_rank", worst_rank, static_cast<double>(it) - 0.5, samples, "min rank of d eta"));
    return out;
}

}  // namespace contactkit
