#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "contactkit/calculus.hpp"
#include "contactkit/quadrature.hpp"

using namespace contactkit;

namespace {

constexpr double kPi = std::numbers::pi;

ChartPtr r3() { return make_chart("r3", {"x", "y", "z"}, {{-1, 1}, {-1, 1}, {-1, 1}}); }

DifferentialForm one_form(const ChartPtr& c, std::vector<std::string> text) {
    std::vector<Expr> e;
    for (auto& t : text) e.push_back(parse(t, std::span<const std::string>(c->coords())));
    return DifferentialForm::one_form(c, e);
}

}  // namespace

TEST(Chart, WrapAndDistance) {
    auto c = make_chart("circle", {"a", "r"}, {{0, 2 * kPi}, {0, 1}}, {true, false});
    Point x{2 * kPi + 0.5, 0.3};
    c->wrap(x);
    EXPECT_NEAR(x[0], 0.5, 1e-15);
    const Point a{0.01, 0.5}, b{2 * kPi - 0.01, 0.5};
    EXPECT_NEAR(c->distance(a, b), 0.02, 1e-12);
    EXPECT_TRUE(c->contains(Point{7.0, 0.5}));
    EXPECT_FALSE(c->contains(Point{1.0, 1.0}));
}

TEST(Chart, SamplesRespectMarginAndExclusions) {
    auto base = make_chart("box", {"u", "v"}, {{0, 1}, {}}, {}, 0.1);
    auto c = std::make_shared<const Chart>(base->with_excluded({{0.5, 0.0}, 0.2}));
    for (const auto& p : c->samples(3, 500)) {
        EXPECT_GE(p[0], 0.1);
        EXPECT_LE(p[0], 0.9);
        EXPECT_LE(std::abs(p[1]), kUnboundedSampleHalfWidth);
        EXPECT_GE(c->distance(p, Point{0.5, 0.0}), 0.2);
    }
    EXPECT_EQ(c->sample(3, 17), c->sample(3, 17));
    EXPECT_NE(c->sample(3, 17), c->sample(4, 17));
}

TEST(Forms, SortWithSign) {
    MultiIndex a{2, 0, 1};
    EXPECT_EQ(sort_with_sign(a), 1);
    EXPECT_EQ(a, (MultiIndex{0, 1, 2}));
    MultiIndex b{1, 0};
    EXPECT_EQ(sort_with_sign(b), -1);
    MultiIndex c{1, 1};
    EXPECT_EQ(sort_with_sign(c), 0);
    EXPECT_EQ(multi_indices(4, 2).size(), 6u);
}

TEST(Forms, WedgeAndEvaluation) {
    auto c = r3();
    const auto dx = DifferentialForm::basis(c, {0});
    const auto dy = DifferentialForm::basis(c, {1});
    const auto w = wedge(dy, dx);
    EXPECT_TRUE(w.coefficient({0, 1}).is_constant(-1.0));
    const FormValue v = w.at(Point{0, 0, 0});
    const Point e1{1, 0, 0}, e2{0, 1, 0};
    const Point vecs[] = {e1, e2};
    EXPECT_DOUBLE_EQ(v(vecs), -1.0);
    EXPECT_THROW(wedge(w, wedge(dx, dy)), GeometryError);
}

TEST(Forms, InteriorProductMatchesEvaluation) {
    auto c = r3();
    const auto a = one_form(c, {"y", "x*z", "1"});
    const auto b = one_form(c, {"z^2", "sin(x)", "y"});
    const auto w = wedge(a, b);
    const auto x = VectorField::symbolic(c, {parse("1 + y", {"x", "y", "z"}), Expr(2.0), parse("x", {"x", "y", "z"})});
    const auto contracted = interior_product(x, w);
    for (const auto& p : c->samples(1, 20)) {
        const Point v = x.at(p);
        const Point u{0.3, -0.2, 0.9};
        const Point vecs[] = {v, u};
        const Point one[] = {u};
        EXPECT_NEAR(contracted.at(p)(one), w.at(p)(vecs), 1e-13);
    }
}

TEST(Forms, DSquaredVanishesAndLeibniz) {
    auto c = r3();
    const auto a = one_form(c, {"sin(x*y)", "exp(z)*x", "y^3*z"});
    const auto b = one_form(c, {"cos(z)", "x*y*z", "log(2 + x^2)"});
    const auto dd = exterior_derivative(exterior_derivative(a));
    for (const auto& [idx, coeff] : dd.coefficients())
        for (const auto& p : c->samples(2, 10)) EXPECT_NEAR(eval(coeff, Binding(c->coords(), p)), 0.0, 1e-12);
    const auto lhs = exterior_derivative(wedge(a, b));
    const auto rhs = wedge(exterior_derivative(a), b) - wedge(a, exterior_derivative(b));
    EXPECT_LT(max_residual(lhs, rhs, c->samples(2, 50)), 1e-12);
    EXPECT_THROW(exterior_derivative(DifferentialForm::basis(c, {0, 1, 2})), GeometryError);
}

TEST(Forms, PullbackCommutesWithD) {
    auto src = make_chart("uv", {"u", "v"}, {{0.1, 1}, {0.1, 1}});
    auto tgt = r3();
    const SmoothMap phi = SmoothMap::parse(src, tgt, {"u*v", "u - v^2", "sin(u)"});
    const auto a = one_form(tgt, {"y*z", "x^2", "exp(y)"});
    const auto lhs = pullback(phi, exterior_derivative(a));
    const auto rhs = exterior_derivative(pullback(phi, a));
    EXPECT_LT(max_residual(lhs, rhs, src->samples(5, 50)), 1e-12);
}

TEST(Forms, PullbackIsFunctorial) {
    auto a = make_chart("a", {"s"}, {{0.1, 1}});
    auto b = make_chart("b", {"u", "v"}, {{0.1, 1}, {0.1, 1}});
    auto c = r3();
    const SmoothMap f = SmoothMap::parse(a, b, {"s^2", "1 + s"});
    const SmoothMap g = SmoothMap::parse(b, c, {"u*v", "u - v", "v^2"});
    const auto w = one_form(c, {"z", "x*y", "1"});
    const auto lhs = pullback(f.then(g), w);
    const auto rhs = pullback(f, pullback(g, w));
    EXPECT_LT(max_residual(lhs, rhs, a->samples(1, 30)), 1e-12);
}

TEST(Forms, LieDerivativeSymbolicMatchesFiniteDifference) {
    auto c = r3();
    const auto w = one_form(c, {"sin(y)", "x*z", "exp(x*y)"});
    const std::vector<std::string>& v = c->coords();
    const auto x = VectorField::symbolic(c, {parse("y", v), parse("-x", v), parse("z^2", v)});
    const auto symbolic = lie_derivative_symbolic(x, w);
    const auto numeric = lie_derivative_fd(x, w);
    EXPECT_LT(max_residual(symbolic, numeric, c->samples(9, 50)), 1e-7);
}

TEST(Forms, BracketOfCoordinateFieldsVanishes) {
    auto c = r3();
    const auto b = bracket(VectorField::coordinate(c, "x"), VectorField::coordinate(c, "y"));
    for (const auto& e : b.components()) EXPECT_TRUE(e.is_constant(0.0));
}

TEST(Quadrature, ExactForPolynomials) {
    const auto rule = gauss_legendre(5, 0.0, 2.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * std::pow(rule.nodes[i], 9);
    EXPECT_NEAR(sum, std::pow(2.0, 10) / 10.0, 1e-11);
}

TEST(Quadrature, SphereArea) {
    // Area form of the unit sphere pulled back along spherical coordinates.
    auto params = make_chart("angles", {"th", "ph"}, {{0, kPi}, {0, 2 * kPi}}, {false, true});
    auto r3full = make_chart("r3", {"x", "y", "z"});
    const SmoothMap embed =
        SmoothMap::parse(params, r3full, {"sin(th)*cos(ph)", "sin(th)*sin(ph)", "cos(th)"});
    const std::vector<std::string>& v = r3full->coords();
    std::map<MultiIndex, Expr> c;
    c[{1, 2}] = parse("x", v);
    c[{0, 2}] = parse("-y", v);
    c[{0, 1}] = parse("z", v);
    const DifferentialForm area(r3full, 2, c);
    const ParametrizedSurface s{{Interval{0, kPi}, Interval{0, 2 * kPi}}, embed,
                                {EdgeKind::Collapsed, EdgeKind::Periodic}};
    EXPECT_TRUE(s.closed());
    const double serial = surface_integral(area, s, kDefaultGrid, Execution::Serial);
    const double parallel = surface_integral(area, s, kDefaultGrid, Execution::Parallel);
    EXPECT_NEAR(serial, 4 * kPi, 1e-10);
    EXPECT_EQ(serial, parallel);
}

TEST(LinearAlgebra, KernelAndRank) {
    Eigen::VectorXd a(3);
    a << 1, 2, 3;
    const auto k = covector_kernel(a);
    ASSERT_EQ(k.size(), 2u);
    for (const auto& v : k) EXPECT_NEAR(v[0] + 2 * v[1] + 3 * v[2], 0.0, 1e-14);
    Eigen::MatrixXd m(2, 2);
    m << 1, 2, 2, 4;
    EXPECT_EQ(numeric_rank(m), 1);
}
