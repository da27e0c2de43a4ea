#include "contactkit/calculus.hpp"

namespace contactkit {

// -------------------------------------------------------------- VectorField

VectorField::VectorField(ChartPtr chart, std::optional<std::vector<Expr>> comps, Resolver r)
    : chart_(std::move(chart)), components_(std::move(comps)), resolver_(std::move(r)) {}

VectorField VectorField::symbolic(ChartPtr chart, std::vector<Expr> components) {
    if (components.size() != chart->dim()) throw GeometryError("vector field: component count mismatch");
    auto resolver = [chart, components](std::span<const double> x) {
        Binding b(chart->coords(), x);
        Point v(components.size());
        for (std::size_t i = 0; i < components.size(); ++i) v[i] = eval(components[i], b);
        return v;
    };
    return VectorField(chart, std::move(components), std::move(resolver));
}

VectorField VectorField::pointwise(ChartPtr chart, Resolver resolver) {
    return VectorField(std::move(chart), std::nullopt, std::move(resolver));
}

VectorField VectorField::coordinate(ChartPtr chart, std::string_view coord) {
    std::vector<Expr> c(chart->dim(), Expr(0.0));
    c[chart->require_index(coord)] = Expr(1.0);
    return symbolic(std::move(chart), std::move(c));
}

const std::vector<Expr>& VectorField::components() const {
    if (!components_) throw GeometryError("vector field has no symbolic components");
    return *components_;
}

Point VectorField::at(std::span<const double> x) const { return resolver_(x); }

Expr VectorField::apply(const Expr& f) const {
    const auto& c = components();
    Expr out(0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i].is_constant(0.0)) continue;
        out = out + c[i] * diff(f, chart_->coords()[i]);
    }
    return out;
}

double VectorField::apply_at(const Expr& f, std::span<const double> x) const {
    const Point v = at(x);
    Binding b(chart_->coords(), x);
    double out = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] != 0.0) out += v[i] * eval(diff(f, chart_->coords()[i]), b);
    return out;
}

VectorField VectorField::operator-(const VectorField& other) const {
    if (!chart_->same_as(*other.chart_)) throw GeometryError("chart mismatch in field difference");
    if (is_symbolic() && other.is_symbolic()) {
        std::vector<Expr> c(components().size());
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = components()[i] - other.components()[i];
        return symbolic(chart_, std::move(c));
    }
    auto a = resolver_;
    auto b = other.resolver_;
    return pointwise(chart_, [a, b](std::span<const double> x) {
        Point u = a(x);
        const Point v = b(x);
        for (std::size_t i = 0; i < u.size(); ++i) u[i] -= v[i];
        return u;
    });
}

VectorField VectorField::scaled(double s) const {
    if (is_symbolic()) {
        std::vector<Expr> c = components();
        for (auto& e : c) e = Expr(s) * e;
        return symbolic(chart_, std::move(c));
    }
    auto a = resolver_;
    return pointwise(chart_, [a, s](std::span<const double> x) {
        Point u = a(x);
        for (auto& ui : u) ui *= s;
        return u;
    });
}

// ---------------------------------------------------------------- SmoothMap

SmoothMap::SmoothMap(ChartPtr source, ChartPtr target, std::vector<Expr> components)
    : source_(std::move(source)), target_(std::move(target)), components_(std::move(components)) {
    if (components_.size() != target_->dim())
        throw GeometryError("smooth map: component count must equal target dimension");
    jacobian_.resize(components_.size());
    for (std::size_t i = 0; i < components_.size(); ++i)
        for (const auto& u : source_->coords()) jacobian_[i].push_back(diff(components_[i], u));
}

SmoothMap SmoothMap::identity(const ChartPtr& chart) {
    std::vector<Expr> c;
    for (const auto& name : chart->coords()) c.push_back(Expr::variable(name));
    return SmoothMap(chart, chart, std::move(c));
}

SmoothMap SmoothMap::parse(ChartPtr source, ChartPtr target, const std::vector<std::string>& text) {
    std::vector<Expr> c;
    for (const auto& t : text) c.push_back(contactkit::parse(t, std::span<const std::string>(source->coords())));
    return SmoothMap(std::move(source), std::move(target), std::move(c));
}

Point SmoothMap::at(std::span<const double> x) const {
    Binding b(source_->coords(), x);
    Point y(components_.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = eval(components_[i], b);
    return y;
}

Eigen::MatrixXd SmoothMap::jacobian_at(std::span<const double> x) const {
    Binding b(source_->coords(), x);
    Eigen::MatrixXd j(target_->dim(), source_->dim());
    for (std::size_t i = 0; i < target_->dim(); ++i)
        for (std::size_t k = 0; k < source_->dim(); ++k) j(i, k) = eval(jacobian_[i][k], b);
    return j;
}

Point SmoothMap::push(std::span<const double> x, std::span<const double> v) const {
    const Eigen::MatrixXd j = jacobian_at(x);
    const Eigen::VectorXd w = j * Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<long>(v.size()));
    return Point(w.data(), w.data() + w.size());
}

SmoothMap SmoothMap::then(const SmoothMap& next) const {
    if (!target_->same_as(*next.source_)) throw GeometryError("composition: chart mismatch");
    std::map<std::string, Expr> subst;
    for (std::size_t i = 0; i < target_->dim(); ++i) subst[target_->coords()[i]] = components_[i];
    std::vector<Expr> c;
    for (const auto& e : next.components_) c.push_back(substitute(e, subst));
    return SmoothMap(source_, next.target_, std::move(c));
}

bool ParametrizedSurface::closed() const {
    return edges[0] != EdgeKind::Open && edges[1] != EdgeKind::Open;
}

}  // namespace contactkit
