#include <cmath>

#include "contactkit/calculus.hpp"
#include "contactkit/quadrature.hpp"

namespace contactkit {

namespace {

void require_same_chart(const ChartPtr& a, const ChartPtr& b, const char* op) {
    if (!a->same_as(*b)) throw GeometryError(std::string(op) + ": chart mismatch (" + a->name() + " vs " + b->name() + ")");
}

void accumulate(std::map<MultiIndex, Expr>& out, MultiIndex idx, const Expr& term) {
    const int s = sort_with_sign(idx);
    if (s == 0 || term.is_constant(0.0)) return;
    const Expr signed_term = s > 0 ? term : -term;
    auto it = out.find(idx);
    if (it == out.end()) out.emplace(std::move(idx), signed_term);
    else it->second = it->second + signed_term;
}

// d without the degree guard: a top-degree input yields nothing.
std::optional<DifferentialForm> d_or_none(const DifferentialForm& form) {
    if (form.degree() >= static_cast<int>(form.chart()->dim())) return std::nullopt;
    return exterior_derivative(form);
}

}  // namespace

DifferentialForm exterior_derivative(const DifferentialForm& form) {
    const auto& chart = form.chart();
    const int d = static_cast<int>(chart->dim());
    if (form.degree() >= d)
        throw GeometryError("exterior derivative of a top-degree form has degree > dim");
    std::map<MultiIndex, Expr> out;
    for (const auto& [idx, c] : form.coefficients()) {
        for (int j = 0; j < d; ++j) {
            Expr dc = diff(c, chart->coords()[j]);
            if (dc.is_constant(0.0)) continue;
            MultiIndex full{j};
            full.insert(full.end(), idx.begin(), idx.end());
            accumulate(out, std::move(full), dc);
        }
    }
    return DifferentialForm(chart, form.degree() + 1, std::move(out));
}

DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b) {
    require_same_chart(a.chart(), b.chart(), "wedge");
    const int k = a.degree() + b.degree();
    if (k > static_cast<int>(a.chart()->dim())) throw GeometryError("wedge: degree exceeds dimension");
    std::map<MultiIndex, Expr> out;
    for (const auto& [ia, ca] : a.coefficients()) {
        for (const auto& [ib, cb] : b.coefficients()) {
            MultiIndex full = ia;
            full.insert(full.end(), ib.begin(), ib.end());
            accumulate(out, std::move(full), ca * cb);
        }
    }
    return DifferentialForm(a.chart(), k, std::move(out));
}

DifferentialForm interior_product(const VectorField& x, const DifferentialForm& form) {
    require_same_chart(x.chart(), form.chart(), "interior product");
    if (form.degree() == 0) return DifferentialForm::zero(form.chart(), 0);
    const auto& v = x.components();
    std::map<MultiIndex, Expr> out;
    for (const auto& [idx, c] : form.coefficients()) {
        for (std::size_t a = 0; a < idx.size(); ++a) {
            const Expr& va = v[idx[a]];
            if (va.is_constant(0.0)) continue;
            MultiIndex rest;
            for (std::size_t b = 0; b < idx.size(); ++b)
                if (b != a) rest.push_back(idx[b]);
            const Expr term = (a % 2) ? -(va * c) : va * c;
            accumulate(out, std::move(rest), term);
        }
    }
    return DifferentialForm(form.chart(), form.degree() - 1, std::move(out));
}

PointwiseForm interior_product_pointwise(const VectorField& x, const DifferentialForm& form) {
    require_same_chart(x.chart(), form.chart(), "interior product");
    if (x.is_symbolic()) return interior_product(x, form);
    const int k = std::max(form.degree() - 1, 0);
    return PointwiseForm(form.chart(), k, [x, form](std::span<const double> p) {
        if (form.degree() == 0) return FormValue(static_cast<int>(form.chart()->dim()), 0);
        const Point v = x.at(p);
        return form.at(p).interior(v);
    });
}

DifferentialForm lie_derivative_symbolic(const VectorField& x, const DifferentialForm& form) {
    require_same_chart(x.chart(), form.chart(), "Lie derivative");
    if (form.degree() == 0) return DifferentialForm::function(form.chart(), x.apply(form.scalar()));
    DifferentialForm out = exterior_derivative(interior_product(x, form));
    if (auto dw = d_or_none(form)) out = out + interior_product(x, *dw);
    return out;
}

PointwiseForm exterior_derivative_fd(const PointwiseForm& form, double h) {
    const auto chart = form.chart();
    const int d = static_cast<int>(chart->dim());
    const int k = form.degree();
    if (k >= d) throw GeometryError("exterior derivative of a top-degree form has degree > dim");
    return PointwiseForm(chart, k + 1, [form, d, k, h](std::span<const double> p) {
        FormValue out(d, k + 1);
        Point q(p.begin(), p.end());
        for (int j = 0; j < d; ++j) {
            q[j] = p[j] + h;
            const FormValue plus = form.at(q);
            q[j] = p[j] - h;
            const FormValue minus = form.at(q);
            q[j] = p[j];
            const FormValue deriv = (1.0 / (2.0 * h)) * (plus - minus);
            for (const auto& [idx, c] : deriv.coefficients()) {
                MultiIndex full{j};
                full.insert(full.end(), idx.begin(), idx.end());
                out.add(std::move(full), c);
            }
        }
        return out;
    });
}

PointwiseForm lie_derivative_fd(const VectorField& x, const DifferentialForm& form, double h) {
    require_same_chart(x.chart(), form.chart(), "Lie derivative");
    const int d = static_cast<int>(form.chart()->dim());
    if (form.degree() == 0) {
        const Expr f = form.scalar();
        return PointwiseForm(form.chart(), 0, [x, f, d](std::span<const double> p) {
            FormValue v(d, 0);
            v.set({}, x.apply_at(f, p));
            return v;
        });
    }
    // Force the numeric contraction even for symbolic fields.
    const VectorField numeric = VectorField::pointwise(x.chart(), [x](std::span<const double> p) { return x.at(p); });
    const PointwiseForm contracted = interior_product_pointwise(numeric, form);
    const PointwiseForm outer = exterior_derivative_fd(contracted, h);
    std::optional<PointwiseForm> inner;
    if (auto dw = d_or_none(form)) inner = interior_product_pointwise(numeric, *dw);
    return PointwiseForm(form.chart(), form.degree(), [outer, inner](std::span<const double> p) {
        FormValue v = outer.at(p);
        if (inner) v = v + inner->at(p);
        return v;
    });
}

PointwiseForm lie_derivative(const VectorField& x, const DifferentialForm& form) {
    if (x.is_symbolic()) return lie_derivative_symbolic(x, form);
    return lie_derivative_fd(x, form);
}

DifferentialForm pullback(const SmoothMap& map, const DifferentialForm& form) {
    require_same_chart(map.target(), form.chart(), "pullback");
    const auto& src = map.source();
    const auto& tgt = map.target();
    std::map<std::string, Expr> subst;
    for (std::size_t i = 0; i < tgt->dim(); ++i) subst[tgt->coords()[i]] = map.components()[i];

    // d(phi^i) on the source chart
    std::vector<DifferentialForm> dphi;
    for (std::size_t i = 0; i < tgt->dim(); ++i) {
        std::vector<Expr> c(src->dim());
        for (std::size_t j = 0; j < src->dim(); ++j) c[j] = map.partial(i, j);
        dphi.push_back(DifferentialForm::one_form(src, std::move(c)));
    }
    if (form.degree() > static_cast<int>(src->dim()))
        throw GeometryError("pullback: form degree exceeds source dimension");

    DifferentialForm out = DifferentialForm::zero(src, form.degree());
    for (const auto& [idx, c] : form.coefficients()) {
        DifferentialForm term = DifferentialForm::function(src, substitute(c, subst));
        for (int i : idx) term = wedge(term, dphi[i]);
        out = out + term;
    }
    return out;
}

VectorField bracket(const VectorField& x, const VectorField& y) {
    require_same_chart(x.chart(), y.chart(), "bracket");
    if (!x.is_symbolic() || !y.is_symbolic())
        throw GeometryError("bracket needs symbolic vector fields");
    std::vector<Expr> c(x.chart()->dim());
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i] = x.apply(y.components()[i]) - y.apply(x.components()[i]);
    return VectorField::symbolic(x.chart(), std::move(c));
}

double surface_integral(const DifferentialForm& form, const ParametrizedSurface& surface,
                        std::array<int, 2> grid, Execution ex) {
    if (form.degree() != 2) throw GeometryError("surface integral needs a 2-form");
    if (surface.map.source()->dim() != 2) throw GeometryError("surface parameter chart must be 2-dimensional");
    if (grid[0] < 8 || grid[1] < 8) throw GeometryError("surface integral grid must be at least 8x8");
    const DifferentialForm pulled = pullback(surface.map, form);
    const Expr integrand = pulled.coefficient({0, 1});
    const auto& params = surface.map.source()->coords();
    const std::array<int, 2> pts = grid;
    return integrate_box<double>(
            std::span<const Interval>(surface.rect), std::span<const int>(pts),
            [&](std::span<const double> uv) {
                try {
                    return eval(integrand, Binding(params, uv));
                } catch (const EvalError& e) {
                    throw EvalError(std::string(e.what()) + " at quadrature node (" +
                                    std::to_string(uv[0]) + ", " + std::to_string(uv[1]) + ")");
                }
            },
            ex);
}

double max_residual(const PointwiseForm& a, const PointwiseForm& b, std::span<const Point> points,
                    Execution ex) {
    return max_over(points.size(), [&](std::size_t i) { return (a.at(points[i]) - b.at(points[i])).max_abs(); }, ex).value;
}

double max_abs(const PointwiseForm& a, std::span<const Point> points, Execution ex) {
    return max_over(points.size(), [&](std::size_t i) { return a.at(points[i]).max_abs(); }, ex).value;
}

std::vector<Point> covector_kernel(const Eigen::VectorXd& alpha) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(alpha.transpose());
    const Eigen::MatrixXd k = lu.kernel();
    std::vector<Point> out;
    for (int c = 0; c < k.cols(); ++c) out.emplace_back(k.col(c).data(), k.col(c).data() + k.rows());
    return out;
}

int numeric_rank(const Eigen::MatrixXd& m, double tol) {
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    int r = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > tol) ++r;
    return r;
}

}  // namespace contactkit
