#pragma once

// Contact products of two contact charts, Legendrian graphs of conformal
// contactomorphisms, and products of principal contactifications with their
// exact period arithmetic.

#include <optional>
#include <vector>

#include "contactkit/contact.hpp"
#include "contactkit/rational.hpp"

namespace contactkit {

enum class Component { Positive, Negative };

const char* to_string(Component c);

class ProductContactChart {
public:
    /// Chart (x1, x2, t) with t restricted to one sign. Coordinate names that
    /// occur in both factors get the suffixes _1 and _2. Throws GeometryError
    /// when a factor has excluded regions or when either product form fails the
    /// contact test.
    ProductContactChart(const ContactChart& m1, const ContactChart& m2, Component component = Component::Positive,
                        std::size_t samples = kDefaultSamples, std::uint64_t seed = kDefaultSeed);

    const ChartPtr& chart() const { return chart_; }
    const ContactChart& factor1() const { return m1_; }
    const ContactChart& factor2() const { return m2_; }
    Component component() const { return component_; }
    const std::string& t() const { return t_; }
    std::size_t t_index() const { return chart()->dim() - 1; }
    std::size_t dim1() const { return m1_.chart()->dim(); }
    std::size_t dim2() const { return m2_.chart()->dim(); }

    /// t eta1 + eta2
    const ContactChart& eta() const { return eta_; }
    /// eta1 + (1/t) eta2, the same structure in the parameter t' = 1/t
    const ContactChart& eta_prime() const { return eta_prime_; }
    /// Projections onto the factor charts.
    const SmoothMap& pr1() const { return pr1_; }
    const SmoothMap& pr2() const { return pr2_; }
    /// Factor Reeb fields lifted to the product (no t component).
    const VectorField& r1() const { return r1_; }
    const VectorField& r2() const { return r2_; }

private:
    ContactChart m1_, m2_;
    Component component_;
    ChartPtr chart_;
    std::string t_;
    SmoothMap pr1_, pr2_;
    ContactChart eta_, eta_prime_;
    VectorField r1_, r2_;
};

/// Builds the product and runs product_checks on it.
ProductContactChart contact_product(const ContactChart& m1, const ContactChart& m2,
                                    Component component = Component::Positive,
                                    std::size_t samples = kDefaultSamples, std::uint64_t seed = kDefaultSeed);

/// contact condition, reeb(eta) = R2, reeb(eta') = R1 (< 1e-8) and kernel
/// agreement of eta and eta' (< 1e-10, at most 100 points).
std::vector<Check> product_checks(const ProductContactChart& p, std::size_t samples = kDefaultSamples,
                                  std::uint64_t seed = kDefaultSeed, Execution ex = default_execution());

struct DistributionWitness {
    std::vector<Point> vectors;  // ker eta1, ker eta2, R1 - t R2, d/dt
    double max_residual = 0.0;   // max |eta(v)|
    int rank = 0;
    bool pass = false;
};

/// Spanning set of ker eta at x built from the factor distributions, the
/// combination R1 - t R2 and d/dt (which eta does not see, having no dt term).
/// Throws GeometryError when the collection is rank deficient.
DistributionWitness distribution_witness(const ProductContactChart& p, std::span<const double> x);

struct LegendrianCandidate {
    SmoothMap map;  // from the parameter chart into the product chart
};

struct LegendrianReport {
    std::size_t dimension = 0;
    double max_pullback = 0.0;     // max coefficient of L^* eta over samples
    std::size_t outside = 0;       // sample images not in the product chart
    std::size_t samples = 0;
    bool pass = false;
};

/// Pullback test for a Legendrian candidate. Throws GeometryError when the
/// parameter dimension is not (dim - 1) / 2 or the map is not an immersion at
/// a sample.
LegendrianReport check_legendrian(const ProductContactChart& p, const LegendrianCandidate& l,
                                  std::size_t samples = kDefaultSamples, std::uint64_t seed = kDefaultSeed,
                                  Execution ex = default_execution());

/// Graph of phi: M1 -> M2 with phi^* eta2 = f eta1, embedded as
/// x1 -> (x1, phi(x1), -f(x1)). f is an expression over M1's coordinates.
LegendrianCandidate graph_c(const ProductContactChart& p, const SmoothMap& phi, const Expr& f);

struct PrincipalPeriodPair {
    Period rho1 = Period::infinite();
    Period rho2 = Period::infinite();
    std::optional<std::int64_t> k, l;  // rho2 / rho1 = k / l, set when both are finite
    Period rho = Period::infinite();   // period of the product
};

/// rho2 / k (= rho1 / l) for finite periods. An infinite factor period yields
/// the other one, and two infinite periods yield infinity.
PrincipalPeriodPair principal_product_period(const Period& rho1, const Period& rho2);

/// Brute-force first return on the torus R^2 / Z^2 measured in turns: the
/// smallest t > 0 at which (a t / rho1, b t / rho2) lies on the line
/// {(s / rho1, -s / rho2)} + Z^2, searching lattice shifts with |m|, |n| <=
/// bound. Requires a + b = 1 and positive periods.
Rational torus_first_return(const Rational& rho1, const Rational& rho2, const Rational& a, const Rational& b,
                            int bound = 64);

struct PrincipalProduct {
    ContactChart contact;  // dt + theta1 + theta2 on (x, y, t)
    std::vector<Check> checks;
};

/// Reduced product of two principal contactifications in normal form
/// dt + h_a dx^a and dt + g_i dy^i, given by the base 1-forms theta1 = h_a dx^a
/// and theta2 = g_i dy^i. The fiber t is periodic on [0, rho) when rho is finite. Checks
/// reeb = d/dt, d eta = p^*(d theta1 + d theta2) and the rank of d eta.
/// Throws GeometryError when the result is not contact.
PrincipalProduct principal_product_form(const DifferentialForm& theta1, const DifferentialForm& theta2,
                                        double rho = std::numeric_limits<double>::infinity(),
                                        std::size_t samples = kDefaultSamples, std::uint64_t seed = kDefaultSeed,
                                        Execution ex = default_execution());

}  // namespace contactkit
