#pragma once

// Prequantization on a principal contactification in normal form
// eta = dt + h_a(x) dx^a: equivariant functions as sections of the associated
// line bundle, horizontal lifts, the induced connection, the prequantum
// operator, the Hermitian pairing and tensor products of sections.

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "contactkit/contact.hpp"

namespace contactkit {

using Complex = std::complex<double>;

/// Central-difference step used for D_X.
inline constexpr double kCovariantStep = 1e-5;

/// Sign s in (D_X D_Y - D_Y D_X - D_[X,Y]) F = s (2 pi i / rho) omega(X, Y) F,
/// fixed by calibrate_curvature on the Darboux data (omega = dq ^ dp,
/// X = d/dq, Y = d/dp) and frozen here.
inline constexpr int kCurvatureSign = +1;

/// Sign s in [H_f, H_g] = s i hbar H_{f,g} with {f, g} = omega(X_f, X_g) and
/// i_{X_H} omega = dH, fixed by calibrate_dirac on f = q, g = p.
inline constexpr int kDiracSign = +1;

class PrincipalContactData {
public:
    /// Total chart (x, t) over the base chart of theta, with eta = dt + theta
    /// and t periodic on [0, rho) when rho is finite. hbar defaults to
    /// rho / 2 pi; for rho = inf it must be supplied before prequantum_op is
    /// used. Throws GeometryError when eta is not contact, the Reeb field is
    /// not d/dt (residual >= 1e-10), or a supplied hbar contradicts rho.
    PrincipalContactData(DifferentialForm theta, double rho, std::optional<double> hbar = std::nullopt,
                         std::size_t samples = kDefaultSamples, std::uint64_t seed = kDefaultSeed);

    const ChartPtr& base() const { return theta_.chart(); }
    const ChartPtr& total() const { return contact_.chart(); }
    const std::string& t() const { return t_; }
    std::size_t t_index() const { return base()->dim(); }
    const DifferentialForm& theta() const { return theta_; }
    /// d theta on the base; its pullback is d eta.
    const DifferentialForm& omega() const { return omega_; }
    /// omega^n / n! on the base.
    const DifferentialForm& liouville() const { return liouville_; }
    const ContactChart& contact() const { return contact_; }
    double rho() const { return rho_; }
    std::optional<double> hbar() const { return hbar_; }
    double reeb_residual() const { return reeb_residual_; }

    Point project(std::span<const double> y) const;
    Point at_fiber(std::span<const double> x, double t) const;

private:
    DifferentialForm theta_;
    DifferentialForm omega_;
    DifferentialForm liouville_;
    double rho_;
    std::optional<double> hbar_;
    std::string t_;
    ContactChart contact_;
    double reeb_residual_ = 0.0;
};

/// A complex function on the total chart declared equivariant:
/// F(exp(s R) y) = exp(-2 pi i s / rho) F(y). rho = inf means invariant.
struct EquivariantFunction {
    std::function<Complex(std::span<const double>)> f;
    double rho = 0.0;

    Complex operator()(std::span<const double> y) const { return f(y); }
};

/// F(x, t) = exp(-2 pi i t / rho) g(x) for a function g on the base.
EquivariantFunction base_section(std::function<Complex(std::span<const double>)> g, const PrincipalContactData& d);

/// Largest |F(y + s e_t) - exp(-2 pi i s / rho) F(y)| over seeded (y, s) with
/// s in [-rho, rho] (in [-4, 4] when rho = inf). The Reeb flow of the normal
/// form is translation in t.
double phase_residual(const EquivariantFunction& F, const PrincipalContactData& d, std::size_t samples = 50,
                      std::uint64_t seed = kDefaultSeed, Execution ex = default_execution());

/// Solution of i_X omega = dH. Symbolic when omega has constant coefficients
/// or the base is 2-dimensional, pointwise otherwise; the pointwise solve
/// throws GeometryError where omega is singular.
VectorField hamiltonian_field(const Expr& H, const DifferentialForm& omega);

/// max |i_X omega - dH| over points.
double hamiltonian_residual(const VectorField& x, const Expr& H, const DifferentialForm& omega,
                            std::span<const Point> points, Execution ex = default_execution());

/// {f, g} = omega(X_f, X_g) = X_g(f) as an expression. Requires a symbolic X_g.
Expr poisson_bracket(const Expr& f, const Expr& g, const DifferentialForm& omega);

/// X^h = X^a d_a - theta(X) d/dt on the total chart; symbolic when X is.
VectorField horizontal_lift(const VectorField& x, const PrincipalContactData& d);

/// eta(X^h) = 0 and T p (X^h) = X at samples, both below 1e-12.
std::vector<Check> lift_checks(const VectorField& x, const PrincipalContactData& d,
                               std::size_t samples = kDefaultSamples, std::uint64_t seed = kDefaultSeed,
                               Execution ex = default_execution());

/// D_X F = X^h(F) by central differences with step h. Throws GeometryError
/// when F fails the phase test (residual >= 1e-6 at 16 samples).
EquivariantFunction covariant_derivative(const VectorField& x, const EquivariantFunction& F,
                                         const PrincipalContactData& d, double h = kCovariantStep);

/// (D_X D_Y - D_Y D_X - D_[X,Y]) F for symbolic base fields X, Y.
EquivariantFunction curvature_operator(const VectorField& x, const VectorField& y, const EquivariantFunction& F,
                                       const PrincipalContactData& d);

/// max over points of |K(X, Y) F - s (2 pi i / rho) omega(X, Y) F|.
double curvature_residual(const VectorField& x, const VectorField& y, const EquivariantFunction& F,
                          const PrincipalContactData& d, std::span<const Point> points, int sign = kCurvatureSign);

struct Calibration {
    int sign = 0;       // nearest of +1 / -1
    double ratio = 0.0; // measured / unsigned prediction, averaged over points
    double spread = 0.0;
};

/// Measures K(d/dq, d/dp) F against (2 pi i / rho) omega(d/dq, d/dp) F on the
/// first two base coordinates.
Calibration calibrate_curvature(const EquivariantFunction& F, const PrincipalContactData& d,
                                std::span<const Point> points);

struct PrequantumOperatorResult {
    EquivariantFunction out;   // -i hbar D_{X_H} psi + H psi
    double phase_residual = 0.0;
};

/// The prequantum operator. Requires hbar (see PrincipalContactData).
PrequantumOperatorResult prequantum_op(const Expr& H, const EquivariantFunction& psi, const PrincipalContactData& d);

/// max over points of |([H_f, H_g] - s i hbar H_{f,g}) psi|.
double dirac_residual(const Expr& f, const Expr& g, const EquivariantFunction& psi, const PrincipalContactData& d,
                      std::span<const Point> points, int sign = kDiracSign);

/// Measures [H_f, H_g] psi against i hbar H_{f,g} psi.
Calibration calibrate_dirac(const Expr& f, const Expr& g, const EquivariantFunction& psi,
                            const PrincipalContactData& d, std::span<const Point> points);

/// Integral of F conj(G) over a box of the base at t = 0 against |omega^n / n!|.
/// Throws GeometryError when F conj(G) is not fiber invariant (1e-8).
Complex hermitian_pairing(const EquivariantFunction& F, const EquivariantFunction& G, const PrincipalContactData& d,
                          std::span<const Interval> box, std::span<const int> points,
                          Execution ex = default_execution());

struct TensorSection {
    ChartPtr chart;  // (x1, t1, x2, t2)
    std::size_t dim1 = 0;
    std::size_t t1 = 0, t2 = 0;
    EquivariantFunction F;
};

/// (F1 (x) F2)(y1, y2) = F1(y1) F2(y2). Throws GeometryError when the periods
/// differ.
TensorSection tensor_section(const EquivariantFunction& F1, const PrincipalContactData& d1,
                             const EquivariantFunction& F2, const PrincipalContactData& d2);

/// Invariance along (R1, -R2) and the phase law along (R1 / 2, R2 / 2), both
/// below 1e-6 at seeded samples.
std::vector<Check> tensor_checks(const TensorSection& s, std::size_t samples = 50, std::uint64_t seed = kDefaultSeed);

/// Pairing of two tensor sections over box1 x box2 against the product
/// Liouville measure.
Complex tensor_pairing(const TensorSection& a, const TensorSection& b, const PrincipalContactData& d1,
                       const PrincipalContactData& d2, std::span<const Interval> box1,
                       std::span<const Interval> box2, std::span<const int> points,
                       Execution ex = default_execution());

}  // namespace contactkit
