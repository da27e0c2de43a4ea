#include <gtest/gtest.h>

#include <numeric>

#include "contactkit/products.hpp"
#include "fixtures.hpp"

using namespace contactkit;
using fixtures::var;

namespace {

ContactChart darboux1() { return ContactChart(fixtures::darboux(1)); }

// |eta ^ (d eta)^n / n!| equals the Pfaffian of the bordered matrix
// [[0, a^T], [-a, M]], so its square is that matrix's determinant.
double bordered_det(const DifferentialForm& eta, const DifferentialForm& d_eta, const Point& x) {
    const Eigen::VectorXd a = eta.at(x).as_vector();
    const Eigen::MatrixXd m = d_eta.at(x).as_matrix();
    const auto n = a.size();
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n + 1, n + 1);
    b.block(0, 1, 1, n) = a.transpose();
    b.block(1, 0, n, 1) = -a;
    b.block(1, 1, n, n) = m;
    return b.determinant();
}

}  // namespace

TEST(Rational, ParsesIntegersFractionsAndDecimals) {
    EXPECT_EQ(Rational::parse("6"), Rational(6));
    EXPECT_EQ(Rational::parse("-4/6"), Rational(-2, 3));
    EXPECT_EQ(Rational::parse("2.5"), Rational(5, 2));
    EXPECT_EQ(Rational::parse("1e-3"), Rational(1, 1000));
    EXPECT_EQ(Rational::parse("1.5e2"), Rational(150));
    EXPECT_THROW(Rational::parse("pi"), std::invalid_argument);
    EXPECT_THROW(Rational::parse("1/0"), std::domain_error);
    EXPECT_THROW(Rational::parse("99999999999999999999"), OverflowError);
}

TEST(Rational, ArithmeticIsExactAndOverflowIsDetected) {
    EXPECT_EQ(Rational(1, 3) + Rational(1, 6), Rational(1, 2));
    EXPECT_EQ(Rational(2, 3) * Rational(9, 4), Rational(3, 2));
    EXPECT_EQ(Rational(1, 2) / Rational(1, 4), Rational(2));
    EXPECT_LT(Rational(1, 3), Rational(1, 2));
    const Rational big(std::int64_t{1} << 62);
    EXPECT_THROW(big * Rational(4), OverflowError);
    EXPECT_THROW(big + big, OverflowError);
}

TEST(Period, RejectsNonPositiveAndParsesInfinity) {
    EXPECT_THROW(Period::finite(Rational(0)), std::invalid_argument);
    EXPECT_THROW(Period::parse("-2"), std::invalid_argument);
    EXPECT_FALSE(Period::parse("inf").is_finite());
    EXPECT_EQ(Period::parse("3/2").to_string(), "3/2");
}

TEST(ContactProduct, DarbouxSquaredIsContactOnSevenDimensions) {
    const ProductContactChart p = contact_product(darboux1(), darboux1());
    ASSERT_EQ(p.chart()->dim(), 7u);
    EXPECT_EQ(p.chart()->coords(), (std::vector<std::string>{"z_1", "p1_1", "q1_1", "z_2", "p1_2", "q1_2", "t"}));
    // coefficients verbatim: t dz1 - t p1 dq1 + dz2 - p2 dq2
    const Point x{0.3, -0.7, 1.1, 0.2, 0.5, -1.3, 1.7};
    const Eigen::VectorXd a = p.eta().eta().at(x).as_vector();
    const Eigen::VectorXd expected = (Eigen::VectorXd(7) << 1.7, 0, -1.7 * -0.7, 1, 0, -0.5, 0).finished();
    EXPECT_LT((a - expected).lpNorm<Eigen::Infinity>(), 1e-15);

    const auto vol = contact_volume(p.eta().eta());
    for (const Point& s : p.chart()->samples(7, 50)) {
        const double v = vol.value_at(s);
        EXPECT_NEAR(v * v, bordered_det(p.eta().eta(), p.eta().d_eta(), s), 1e-9 * std::max(1.0, v * v));
        EXPECT_GT(std::abs(v), kContactThreshold);
    }
    for (const auto& c : product_checks(p)) EXPECT_TRUE(c.pass) << c.name << " " << c.value;
}

TEST(ContactProduct, ReebFieldsAreTheFactorFields) {
    const ProductContactChart p(darboux1(), darboux1());
    for (const Point& s : p.chart()->samples(3, 20)) {
        const Point r = p.eta().reeb().at(s);
        const Point rp = p.eta_prime().reeb().at(s);
        for (std::size_t i = 0; i < 7; ++i) {
            EXPECT_NEAR(r[i], i == 3 ? 1.0 : 0.0, 1e-12);
            EXPECT_NEAR(rp[i], i == 0 ? 1.0 : 0.0, 1e-12);
        }
    }
}

TEST(ContactProduct, NegativeComponentAndMixedFactors) {
    const ProductContactChart neg(darboux1(), darboux1(), Component::Negative);
    for (const Point& s : neg.chart()->samples(1, 20)) EXPECT_LT(s.back(), 0.0);
    for (const auto& c : product_checks(neg)) EXPECT_TRUE(c.pass) << c.name;

    const ProductContactChart mixed(ContactChart(fixtures::hopf()), darboux1());
    EXPECT_EQ(mixed.chart()->dim(), 7u);
    for (const auto& c : product_checks(mixed, 60)) EXPECT_TRUE(c.pass) << c.name << " " << c.value;
}

TEST(ContactProduct, PuncturedFactorsAreRefused) {
    const auto h = fixtures::hopf();
    auto punctured = std::make_shared<const Chart>(h.chart()->with_excluded({{3.0, 3.0, 0.7}, 0.1}));
    const ContactChart m(DifferentialForm(punctured, 1, h.coefficients()));
    EXPECT_THROW(ProductContactChart(m, darboux1()), GeometryError);
}

TEST(DistributionWitness, SpansKernelOfProductForm) {
    const ProductContactChart p(darboux1(), darboux1());
    const Point x{0.3, -0.7, 1.1, 0.2, 0.5, -1.3, 1.0};
    const DistributionWitness w = distribution_witness(p, x);
    EXPECT_EQ(w.vectors.size(), 6u);
    EXPECT_EQ(w.rank, 6);
    EXPECT_TRUE(w.pass);
    EXPECT_LT(w.max_residual, 1e-12);
    // at t = 1 the mixed vector is d/dz1 - d/dz2
    const Point& mixed = w.vectors[4];
    EXPECT_EQ(mixed, (Point{1, 0, 0, -1, 0, 0, 0}));
    for (const Point& s : p.chart()->samples(11, 50)) EXPECT_TRUE(distribution_witness(p, s).pass);
}

TEST(Legendrian, TranslationGraphLivesOnTheNegativeComponent) {
    const ContactChart m = darboux1();
    const ProductContactChart neg(m, m, Component::Negative);
    const SmoothMap phi = SmoothMap::parse(m.chart(), m.chart(), {"z + 0.75", "p1", "q1"});
    const LegendrianReport r = check_legendrian(neg, graph_c(neg, phi, Expr(1.0)));
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.max_pullback, 0.0);
    EXPECT_EQ(r.dimension, 3u);

    const ProductContactChart pos(m, m);
    const LegendrianReport wrong_side = check_legendrian(pos, graph_c(pos, phi, Expr(1.0)));
    EXPECT_FALSE(wrong_side.pass);
    EXPECT_EQ(wrong_side.outside, wrong_side.samples);
}

TEST(Legendrian, ReversalGraphLivesOnThePositiveComponent) {
    const ContactChart m = darboux1();
    const ProductContactChart pos(m, m);
    // (z, p, q) -> (-z, p, -q) pulls dz - p dq back to -(dz - p dq)
    const SmoothMap phi = SmoothMap::parse(m.chart(), m.chart(), {"-z", "p1", "-q1"});
    const LegendrianReport r = check_legendrian(pos, graph_c(pos, phi, Expr(-1.0)));
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.max_pullback, 0.0);
}

TEST(Legendrian, BrokenConformalityFails) {
    const ContactChart m = darboux1();
    const ProductContactChart neg(m, m, Component::Negative);
    const SmoothMap phi = SmoothMap::parse(m.chart(), m.chart(), {"z", "2*p1", "q1"});
    const LegendrianReport r = check_legendrian(neg, graph_c(neg, phi, Expr(1.0)));
    EXPECT_FALSE(r.pass);
    EXPECT_EQ(r.outside, 0u);
    EXPECT_GT(r.max_pullback, 1e-3);
}

TEST(Legendrian, WrongDimensionAndNonImmersionThrow) {
    const ContactChart m = darboux1();
    const ProductContactChart p(m, m);
    auto line = make_chart("line", {"u"});
    const SmoothMap curve = SmoothMap::parse(line, p.chart(), {"u", "0", "0", "0", "0", "0", "1"});
    EXPECT_THROW(check_legendrian(p, {curve}), GeometryError);
    const SmoothMap flat = SmoothMap::parse(m.chart(), p.chart(), {"z", "0", "0", "0", "0", "0", "1"});
    EXPECT_THROW(check_legendrian(p, {flat}), GeometryError);
}

TEST(PrincipalPeriod, WorkedCases) {
    const auto r = principal_product_period(Period::parse("6"), Period::parse("4"));
    EXPECT_EQ(*r.k, 2);
    EXPECT_EQ(*r.l, 3);
    EXPECT_EQ(r.rho.value(), Rational(2));

    const auto eq = principal_product_period(Period::parse("1"), Period::parse("1"));
    EXPECT_EQ(*eq.k, 1);
    EXPECT_EQ(*eq.l, 1);
    EXPECT_EQ(eq.rho.value(), Rational(1));

    EXPECT_EQ(principal_product_period(Period::infinite(), Period::parse("5")).rho.value(), Rational(5));
    EXPECT_EQ(principal_product_period(Period::parse("5"), Period::infinite()).rho.value(), Rational(5));
    EXPECT_FALSE(principal_product_period(Period::infinite(), Period::infinite()).rho.is_finite());
}

TEST(PrincipalPeriod, SymmetricAndHomogeneous) {
    for (std::uint64_t i = 0; i < 50; ++i) {
        auto rng = stream_rng(5, i);
        const Rational r1(static_cast<std::int64_t>(rng() % 40 + 1), static_cast<std::int64_t>(rng() % 12 + 1));
        const Rational r2(static_cast<std::int64_t>(rng() % 40 + 1), static_cast<std::int64_t>(rng() % 12 + 1));
        const Rational c(static_cast<std::int64_t>(rng() % 9 + 1), static_cast<std::int64_t>(rng() % 9 + 1));
        const Rational a = principal_product_period(Period::finite(r1), Period::finite(r2)).rho.value();
        EXPECT_EQ(a, principal_product_period(Period::finite(r2), Period::finite(r1)).rho.value());
        EXPECT_EQ(c * a, principal_product_period(Period::finite(c * r1), Period::finite(c * r2)).rho.value());
    }
}

TEST(TorusFirstReturn, WorkedCases) {
    const Rational half(1, 2);
    EXPECT_EQ(torus_first_return(Rational(6), Rational(4), half, half), Rational(2));
    EXPECT_EQ(torus_first_return(Rational(6), Rational(4), Rational(1, 4), Rational(3, 4)), Rational(2));
    EXPECT_EQ(torus_first_return(Rational(3), Rational(3), half, half), Rational(3));
    EXPECT_THROW(torus_first_return(Rational(6), Rational(4), half, Rational(1, 3)), std::invalid_argument);
}

TEST(TorusFirstReturn, AgreesWithBezoutForSeededCoprimePairs) {
    int checked = 0;
    for (std::uint64_t i = 0; checked < 50; ++i) {
        auto rng = stream_rng(kDefaultSeed, i);
        const auto k = static_cast<std::int64_t>(rng() % 30 + 1);
        const auto l = static_cast<std::int64_t>(rng() % 30 + 1);
        if (std::gcd(k, l) != 1) continue;
        ++checked;
        const Rational base(static_cast<std::int64_t>(rng() % 20 + 1), static_cast<std::int64_t>(rng() % 20 + 1));
        const Rational rho1 = Rational(l) * base, rho2 = Rational(k) * base;
        const auto pair = principal_product_period(Period::finite(rho1), Period::finite(rho2));
        EXPECT_EQ(*pair.k, k);
        EXPECT_EQ(*pair.l, l);
        EXPECT_EQ(pair.rho.value(), torus_first_return(rho1, rho2, Rational(1, 2), Rational(1, 2)));
        EXPECT_EQ(pair.rho.value(), torus_first_return(rho1, rho2, Rational(1, 4), Rational(3, 4)));
    }
}

TEST(PrincipalProductForm, DarbouxDataConcatenates) {
    auto n1 = make_chart("plane1", {"q", "p"});
    const DifferentialForm theta = DifferentialForm::one_form(n1, {-var("p"), Expr(0.0)});
    const PrincipalProduct pp = principal_product_form(theta, theta);
    EXPECT_EQ(pp.contact.chart()->coords(), (std::vector<std::string>{"q_1", "p_1", "q_2", "p_2", "t"}));
    const Point x{0.4, -1.2, 0.9, 0.3, 0.1};
    const Eigen::VectorXd a = pp.contact.eta().at(x).as_vector();
    EXPECT_EQ(a, (Eigen::VectorXd(5) << 1.2, 0, -0.3, 0, 1).finished());
    for (const auto& c : pp.checks) EXPECT_TRUE(c.pass) << c.name << " " << c.value;
}

TEST(PrincipalProductForm, PeriodicFiberAndDegenerateData) {
    auto n1 = make_chart("plane", {"q", "p"});
    const DifferentialForm theta = DifferentialForm::one_form(n1, {-var("p"), Expr(0.0)});
    const PrincipalProduct pp = principal_product_form(theta, theta, 2.0);
    EXPECT_TRUE(pp.contact.chart()->periodic(4));
    EXPECT_EQ(pp.contact.chart()->interval(4).hi, 2.0);

    auto n2 = make_chart("plane2", {"x", "y"});
    const DifferentialForm zero = DifferentialForm::one_form(n2, {Expr(0.0), Expr(0.0)});
    EXPECT_THROW(principal_product_form(theta, zero), GeometryError);
}
