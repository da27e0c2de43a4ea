#include <gtest/gtest.h>

#include "contactkit/dynamics.hpp"
#include "contactkit/prequant.hpp"
#include "fixtures.hpp"

using namespace contactkit;
using fixtures::kPi;
using fixtures::var;

namespace {

const PrincipalContactData& darboux() {
    static const PrincipalContactData d(fixtures::darboux_theta(), 2 * kPi);
    return d;
}

const PrincipalContactData& hopf() {
    static const PrincipalContactData d(fixtures::hopf_theta(), 2 * kPi);
    return d;
}

// e^{-it} e^{-(q^2 + p^2)/2} (1 + i q / 2) on the Darboux data (rho = 2 pi)
Complex gaussian_g(std::span<const double> x) {
    return std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1])) * Complex(1.0, 0.5 * x[0]);
}

EquivariantFunction gaussian() { return base_section(gaussian_g, darboux()); }

std::vector<Point> total_points(const PrincipalContactData& d, std::size_t n, std::uint64_t seed = 9) {
    return d.total()->samples(seed, n);
}

}  // namespace

TEST(PrincipalData, NormalFormInvariants) {
    const auto& d = darboux();
    EXPECT_EQ(d.total()->coords(), (std::vector<std::string>{"q", "p", "t"}));
    EXPECT_TRUE(d.total()->periodic(2));
    EXPECT_LT(d.reeb_residual(), 1e-12);
    EXPECT_DOUBLE_EQ(*d.hbar(), 1.0);
    EXPECT_EQ(eval(d.omega().coefficient({0, 1}), std::map<std::string, double>{}), 1.0);
    EXPECT_THROW(PrincipalContactData(fixtures::darboux_theta(), 2 * kPi, 3.0), GeometryError);
    EXPECT_THROW(PrincipalContactData(fixtures::darboux_theta(), -1.0), GeometryError);
    const PrincipalContactData line(fixtures::darboux_theta(), INFINITY);
    EXPECT_FALSE(line.hbar().has_value());
    EXPECT_THROW(prequantum_op(var("q"), base_section(gaussian_g, line), line), GeometryError);
}

TEST(HamiltonianField, TwoByTwoOracle) {
    const auto& w = darboux().omega();
    // i_X (dq ^ dp) = X^q dp - X^p dq, so X_H = H_p d/dq - H_q d/dp
    const Point x{0.3, -0.8};
    EXPECT_EQ(hamiltonian_field(var("p"), w).at(x), (Point{1.0, 0.0}));
    EXPECT_EQ(hamiltonian_field(var("q"), w).at(x), (Point{0.0, -1.0}));
    EXPECT_EQ(hamiltonian_field(Expr(4.0), w).at(x), (Point{0.0, 0.0}));
    const Expr h = parse("q^2 * p + sin(p)", {"q", "p"});
    const VectorField xh = hamiltonian_field(h, w);
    EXPECT_TRUE(xh.is_symbolic());
    const auto pts = darboux().base()->samples(3, 100);
    EXPECT_LT(hamiltonian_residual(xh, h, w, pts), 1e-10);
}

TEST(HamiltonianField, NonConstantOmegaAndConservation) {
    const auto& d = hopf();
    const Expr h = parse("cos(2*phi)", {"phi", "psi"});
    const VectorField xh = hamiltonian_field(h, d.omega());
    EXPECT_LT(hamiltonian_residual(xh, h, d.omega(), d.base()->samples(2, 100)), 1e-10);

    const Expr osc = parse("(q^2 + p^2) / 2", {"q", "p"});
    const VectorField xo = hamiltonian_field(osc, darboux().omega());
    const Point x0{0.7, -0.2};
    const FlowResult r = flow(xo, x0, 1.5, 1e-3);
    EXPECT_LT(std::abs(eval(osc, Binding(darboux().base()->coords(), r.x)) -
                       eval(osc, Binding(darboux().base()->coords(), x0))),
              1e-8);
}

TEST(HorizontalLift, DarbouxLiftAndCommutation) {
    const auto& d = darboux();
    const VectorField dq = VectorField::coordinate(d.base(), "q");
    const VectorField lift = horizontal_lift(dq, d);
    // lift of d/dq is d/dq + p d/dt
    const Point y{0.4, -1.3, 2.0};
    EXPECT_EQ(lift.at(y), (Point{1.0, 0.0, -1.3}));
    for (const auto& c : lift_checks(dq, d)) EXPECT_TRUE(c.pass) << c.name;
    const VectorField x = VectorField::symbolic(d.base(), {var("q") * var("p"), sin(var("q"))});
    for (const auto& c : lift_checks(x, d)) EXPECT_TRUE(c.pass) << c.name;

    const VectorField r = VectorField::coordinate(d.total(), "t");
    const VectorField br = bracket(r, horizontal_lift(x, d));
    for (const Point& s : total_points(d, 20)) EXPECT_EQ(br.at(s), (Point{0.0, 0.0, 0.0}));

    const VectorField pointwise = VectorField::pointwise(d.base(), [x](std::span<const double> p) { return x.at(p); });
    for (const Point& s : total_points(d, 20)) {
        const Point a = horizontal_lift(pointwise, d).at(s), b = horizontal_lift(x, d).at(s);
        for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(a[i], b[i], 1e-15);
    }
}

TEST(CovariantDerivative, MatchesClosedForm) {
    // D_X F = e^{-it} (X(g) + i theta(X) g) for F = e^{-it} g
    const auto& d = darboux();
    const VectorField x = VectorField::symbolic(d.base(), {var("p"), Expr(1.0) + var("q")});
    const EquivariantFunction dF = covariant_derivative(x, gaussian(), d);
    for (const Point& y : total_points(d, 50)) {
        const double q = y[0], p = y[1], t = y[2];
        const Point v = x.at(std::span<const double>(y).first(2));
        const double e = std::exp(-0.5 * (q * q + p * p));
        const Complex g(e, 0.5 * q * e);
        const Complex gq = Complex(-q * e, 0.5 * e - 0.5 * q * q * e);
        const Complex gp = Complex(-p * e, -0.5 * q * p * e);
        const double theta_x = -p * v[0];
        const Complex expected = std::polar(1.0, -t) * (v[0] * gq + v[1] * gp + Complex(0.0, theta_x) * g);
        EXPECT_LT(std::abs(dF(y) - expected), 1e-8);
    }
}

TEST(CovariantDerivative, PreservesEquivarianceAndIsLeibniz) {
    const auto& d = darboux();
    const VectorField x = VectorField::symbolic(d.base(), {var("p") * var("p"), sin(var("q"))});
    const EquivariantFunction F = gaussian();
    EXPECT_LT(phase_residual(F, d, 50), 1e-12);
    EXPECT_LT(phase_residual(covariant_derivative(x, F, d), d, 50), 1e-6);

    // D_X(g F) = X(g) F + g D_X F for a base function g
    const Expr g = parse("cos(q) + p", {"q", "p"});
    const auto& coords = d.base()->coords();
    const EquivariantFunction gF{[&](std::span<const double> y) { return eval(g, Binding(coords, y.first(2))) * F(y); },
                                 F.rho};
    const EquivariantFunction lhs = covariant_derivative(x, gF, d);
    const EquivariantFunction dF = covariant_derivative(x, F, d);
    const Expr xg = x.apply(g);
    for (const Point& y : total_points(d, 30)) {
        const Binding b(coords, std::span<const double>(y).first(2));
        EXPECT_LT(std::abs(lhs(y) - (eval(xg, b) * F(y) + eval(g, b) * dF(y))), 1e-6);
    }
}

TEST(CovariantDerivative, RejectsNonEquivariantInput) {
    const auto& d = darboux();
    const EquivariantFunction wrong{[](std::span<const double> y) { return std::polar(1.0, -2.0 * y[2]); }, 2 * kPi};
    EXPECT_THROW(covariant_derivative(VectorField::coordinate(d.base(), "q"), wrong, d), GeometryError);
}

TEST(Curvature, CalibrationOnDarbouxData) {
    const auto pts = total_points(darboux(), 20);
    const Calibration c = calibrate_curvature(gaussian(), darboux(), pts);
    EXPECT_EQ(c.sign, kCurvatureSign);
    EXPECT_NEAR(c.ratio, 1.0, 1e-4);
    EXPECT_LT(c.spread, 1e-4);
}

TEST(Curvature, HoldsForOtherFieldsAndHopfData) {
    const auto& d = darboux();
    const VectorField x = VectorField::symbolic(d.base(), {Expr(1.0), var("q")});
    const VectorField y = VectorField::symbolic(d.base(), {var("p") * var("p"), Expr(0.5)});
    EXPECT_LT(curvature_residual(x, y, gaussian(), d, total_points(d, 20)), 1e-4);
    EXPECT_GT(curvature_residual(x, y, gaussian(), d, total_points(d, 20), -kCurvatureSign), 1e-2);

    const auto& h = hopf();
    const EquivariantFunction F = base_section(
        [](std::span<const double> b) { return std::sin(b[0]) * std::polar(1.0, b[1]); }, h);
    const VectorField dphi = VectorField::coordinate(h.base(), "phi");
    const VectorField dpsi = VectorField::coordinate(h.base(), "psi");
    EXPECT_LT(curvature_residual(dphi, dpsi, F, h, total_points(h, 20)), 1e-4);
}

TEST(Curvature, AgreesWithReducedSymplecticForm) {
    // the curvature scalar measured by the commutator equals the base form
    // obtained from the Hopf sphere by contact_to_symplectic
    const ContactChart sphere(fixtures::hopf());
    const auto& h = hopf();
    const SmoothMap p = SmoothMap::parse(sphere.chart(), h.base(), {"phi", "xi2 - xi1"});
    const SmoothMap sigma = SmoothMap::parse(h.base(), sphere.chart(), {"0", "psi", "phi"});
    const ContactToSymplectic cts = contact_to_symplectic(sphere, p, sigma, 50);
    const EquivariantFunction F = base_section([](std::span<const double>) { return Complex(1.0, 0.0); }, h);
    const VectorField dphi = VectorField::coordinate(h.base(), "phi");
    const VectorField dpsi = VectorField::coordinate(h.base(), "psi");
    const EquivariantFunction k = curvature_operator(dphi, dpsi, F, h);
    const std::array<Point, 2> e{Point{1.0, 0.0}, Point{0.0, 1.0}};
    for (const Point& y : total_points(h, 20)) {
        const Complex measured = k(y) / (Complex(0.0, 2 * kPi / h.rho()) * F(y));
        const double expected = cts.omega.at(std::span<const double>(y).first(2))(e);
        EXPECT_LT(std::abs(measured - static_cast<double>(kCurvatureSign) * expected), 1e-4);
    }
}

TEST(PrequantumOperator, ConstantsLinearityAndEquivariance) {
    const auto& d = darboux();
    const EquivariantFunction psi = gaussian();
    const auto pts = total_points(d, 30);
    const PrequantumOperatorResult c = prequantum_op(Expr(2.5), psi, d);
    for (const Point& y : pts) EXPECT_LT(std::abs(c.out(y) - 2.5 * psi(y)), 1e-12);

    const Expr h = parse("q * p + q^2", {"q", "p"});
    const EquivariantFunction psi2 = base_section(
        [](std::span<const double> x) { return Complex(std::cos(x[0]), x[1]) * std::exp(-x[1] * x[1]); }, d);
    const Complex a(0.3, -1.2), b(2.0, 0.7);
    const EquivariantFunction mix{[&](std::span<const double> y) { return a * psi(y) + b * psi2(y); }, psi.rho};
    const PrequantumOperatorResult hm = prequantum_op(h, mix, d);
    const PrequantumOperatorResult h1 = prequantum_op(h, psi, d);
    const PrequantumOperatorResult h2 = prequantum_op(h, psi2, d);
    for (const Point& y : pts) EXPECT_LT(std::abs(hm.out(y) - (a * h1.out(y) + b * h2.out(y))), 1e-10);
    EXPECT_LT(hm.phase_residual, 1e-6);
}

TEST(PrequantumOperator, DiracRelation) {
    const auto& d = darboux();
    const auto pts = total_points(d, 10);
    const Calibration c = calibrate_dirac(var("q"), var("p"), gaussian(), d, pts);
    EXPECT_EQ(c.sign, kDiracSign);
    EXPECT_NEAR(c.ratio, 1.0, 1e-3);

    const std::vector<std::pair<std::string, std::string>> pairs{
        {"q^2", "p"}, {"q*p", "p"}, {"sin(q)", "p^2"}, {"q", "p^3"}, {"q^2 + p^2", "q*p"}};
    for (const auto& [fs, gs] : pairs) {
        const Expr f = parse(fs, {"q", "p"}), g = parse(gs, {"q", "p"});
        EXPECT_LT(dirac_residual(f, g, gaussian(), d, pts), 1e-3) << fs << ", " << gs;
    }
}

TEST(HermitianPairing, GaussianNormAndSymmetries) {
    const auto& d = darboux();
    const std::vector<Interval> box{{-6, 6}, {-6, 6}};
    const std::vector<int> grid{64, 64};
    const EquivariantFunction plain = base_section(
        [](std::span<const double> x) { return Complex(std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1])), 0.0); }, d);
    EXPECT_NEAR(hermitian_pairing(plain, plain, d, box, grid).real(), kPi, 1e-10);

    const EquivariantFunction F = gaussian();
    const EquivariantFunction G = base_section(
        [](std::span<const double> x) { return Complex(x[1], 1.0) * std::exp(-(x[0] * x[0] + x[1] * x[1])); }, d);
    const Complex ff = hermitian_pairing(F, F, d, box, grid);
    EXPECT_GT(ff.real(), 0.0);
    EXPECT_LT(std::abs(ff.imag()), 1e-10);
    const Complex fg = hermitian_pairing(F, G, d, box, grid);
    EXPECT_LT(std::abs(fg - std::conj(hermitian_pairing(G, F, d, box, grid))), 1e-12);
    const Complex rot = std::polar(1.0, 0.9);
    const EquivariantFunction rF{[&](std::span<const double> y) { return rot * F(y); }, F.rho};
    EXPECT_LT(std::abs(hermitian_pairing(rF, G, d, box, grid) - rot * fg), 1e-12);

    const EquivariantFunction other{[](std::span<const double> y) { return std::polar(1.0, -2.0 * y[2]); }, 2 * kPi};
    EXPECT_THROW(hermitian_pairing(F, other, d, box, grid), GeometryError);
}

TEST(HermitianPairing, PrequantumOperatorIsSymmetric) {
    const auto& d = darboux();
    const std::vector<Interval> box{{-7, 7}, {-7, 7}};
    const std::vector<int> grid{64, 64};
    const Expr h = parse("q^2 + q*p", {"q", "p"});
    const EquivariantFunction psi = gaussian();
    const EquivariantFunction phi = base_section(
        [](std::span<const double> x) { return Complex(x[1], 0.3) * std::exp(-0.5 * (x[0] * x[0] + 2 * x[1] * x[1])); },
        d);
    const Complex lhs = hermitian_pairing(prequantum_op(h, psi, d).out, phi, d, box, grid);
    const Complex rhs = hermitian_pairing(psi, prequantum_op(h, phi, d).out, d, box, grid);
    EXPECT_LT(std::abs(lhs - rhs), 1e-4);
}

TEST(TensorSection, InvarianceEquivarianceAndFactorization) {
    const auto& d = darboux();
    const EquivariantFunction F1 = gaussian();
    const EquivariantFunction F2 = base_section(
        [](std::span<const double> x) { return Complex(1.0, x[0]) * std::exp(-(x[0] * x[0] + x[1] * x[1])); }, d);
    const TensorSection s = tensor_section(F1, d, F2, d);
    EXPECT_EQ(s.chart->coords(), (std::vector<std::string>{"q_1", "p_1", "t_1", "q_2", "p_2", "t_2"}));
    for (const auto& c : tensor_checks(s)) EXPECT_TRUE(c.pass) << c.name << " " << c.value;

    // F_j = e^{-i t_j} g_j gives e^{-i (t1 + t2)} g1 g2
    for (const Point& y : s.chart->samples(4, 20)) {
        const Complex expected = std::polar(1.0, -(y[2] + y[5])) * gaussian_g(std::span<const double>(y).first(2)) *
                                 Complex(1.0, y[3]) * std::exp(-(y[3] * y[3] + y[4] * y[4]));
        EXPECT_LT(std::abs(s.F(y) - expected), 1e-12);
    }

    const EquivariantFunction G1 = base_section(
        [](std::span<const double> x) { return Complex(x[1], 1.0) * std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1])); }, d);
    const TensorSection t = tensor_section(G1, d, F1, d);
    const std::vector<Interval> box{{-6, 6}, {-6, 6}};
    const std::vector<int> g2{24, 24}, g4{24, 24, 24, 24};
    const Complex whole = tensor_pairing(s, t, d, d, box, box, g4);
    const Complex split = hermitian_pairing(F1, G1, d, box, g2) * hermitian_pairing(F2, F1, d, box, g2);
    EXPECT_LT(std::abs(whole - split), 1e-6);
}

TEST(TensorSection, PeriodMismatchThrows) {
    const PrincipalContactData other(fixtures::darboux_theta(), 4 * kPi);
    EXPECT_THROW(tensor_section(gaussian(), darboux(), base_section(gaussian_g, other), other), GeometryError);
}

TEST(PoissonBracket, CanonicalPair) {
    const auto& w = darboux().omega();
    EXPECT_EQ(eval(poisson_bracket(var("q"), var("p"), w), std::map<std::string, double>{{"q", 0.2}, {"p", 0.4}}), 1.0);
    const Expr b = poisson_bracket(parse("q^2", {"q", "p"}), var("p"), w);
    EXPECT_DOUBLE_EQ(eval(b, std::map<std::string, double>{{"q", 0.5}, {"p", 0.0}}), 1.0);
}
