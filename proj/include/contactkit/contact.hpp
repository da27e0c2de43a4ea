#pragma once

// Contact forms on a single chart: the contact condition, the Reeb field,
// conformal rescaling, symplectization and the two reductions between contact
// and symplectic data, and the integrality test for 2-forms.

#include <cstdint>
#include <optional>
#include <vector>

#include "contactkit/calculus.hpp"
#include "contactkit/check.hpp"

namespace contactkit {

inline constexpr std::size_t kDefaultSamples = 200;
inline constexpr std::uint64_t kDefaultSeed = 42;
/// Smallest |eta ^ (d eta)^n| accepted as nonvanishing.
inline constexpr double kContactThreshold = 1e-10;

/// eta ^ (d eta)^n / n! for a 1-form on a (2n+1)-dimensional chart. The
/// normalization makes the Darboux volume exactly +-1 in every dimension.
DifferentialForm contact_volume(const DifferentialForm& eta);

struct ContactReport {
    bool pass = false;
    double min_volume = 0.0;   // min over samples of |eta ^ (d eta)^n / n!|
    Point worst;               // sample attaining the minimum
    std::size_t samples = 0;
};

/// Evaluates the contact volume at seeded domain samples.
ContactReport is_contact(const DifferentialForm& eta, std::size_t samples = kDefaultSamples,
                         std::uint64_t seed = kDefaultSeed, Execution ex = default_execution());

/// Reciprocal condition estimate below which the Reeb system counts as singular.
inline constexpr double kReebConditionFloor = 1e-12;

/// Reeb vector at one point, from the square system (M + a a^T) R = a where
/// a = eta(x) and M is the matrix of d eta(x). The system is nonsingular
/// exactly when eta ^ (d eta)^n != 0 at x. Throws GeometryError when it is
/// numerically singular.
Point reeb_at(const DifferentialForm& eta, const DifferentialForm& d_eta, std::span<const double> x);

/// Pointwise Reeb field of a contact form.
VectorField reeb(const DifferentialForm& eta);

/// Residuals |eta(R) - 1| and max_j |d eta(R, e_j)| at one point.
std::pair<double, double> reeb_residuals(const DifferentialForm& eta, const DifferentialForm& d_eta,
                                         std::span<const double> x, std::span<const double> r);

class ContactChart {
public:
    /// Validates the contact condition on seeded samples; throws
    /// GeometryError when it fails.
    explicit ContactChart(DifferentialForm eta, std::size_t samples = kDefaultSamples,
                          std::uint64_t seed = kDefaultSeed);

    const ChartPtr& chart() const { return eta_.chart(); }
    const DifferentialForm& eta() const { return eta_; }
    const DifferentialForm& d_eta() const { return d_eta_; }
    int n() const { return static_cast<int>(chart()->dim() - 1) / 2; }
    const VectorField& reeb() const { return reeb_; }
    const ContactReport& report() const { return report_; }

private:
    DifferentialForm eta_;
    DifferentialForm d_eta_;
    VectorField reeb_;
    ContactReport report_;
};

/// Reeb residual, and L_R eta = 0 through the finite-difference Lie derivative.
std::vector<Check> reeb_checks(const ContactChart& c, std::size_t samples = kDefaultSamples,
                               std::uint64_t seed = kDefaultSeed, Execution ex = default_execution());

struct RescaleResult {
    DifferentialForm eta;      // f * eta
    double max_residual = 0.0; // of f^2 i_X d eta = df - R(f) eta and eta(X) = 0
    bool pass = false;
};

/// eta' = f eta together with the check that X = R' - R/f lies in ker eta and
/// solves i_X d eta = (df - R(f) eta) / f^2. Throws GeometryError when f vanishes at
/// a sample.
RescaleResult conformal_rescale(const ContactChart& c, const Expr& f, std::size_t samples = 100,
                                std::uint64_t seed = kDefaultSeed, double tol = 1e-8,
                                Execution ex = default_execution());

struct Symplectization {
    ChartPtr chart;            // base coordinates followed by s in (0, inf)
    std::string s;             // name of the fiber coordinate
    DifferentialForm eta;      // eta on the extended chart
    DifferentialForm omega;    // ds ^ eta + s d eta
    DifferentialForm theta;    // s eta
    VectorField liouville;     // s d/ds
    std::vector<Check> checks;
};

/// Builds omega = d(s eta) and verifies i_L omega = theta, L_L omega = omega,
/// the homogeneity h_2^* omega = 2 omega and nondegeneracy at samples.
Symplectization symplectize(const ContactChart& c, std::size_t samples = kDefaultSamples,
                            std::uint64_t seed = kDefaultSeed, Execution ex = default_execution());

/// Map from an extended chart to itself scaling the coordinate `s` by nu.
SmoothMap scale_fiber(const ChartPtr& chart, const std::string& s, double nu);

/// The section of the symplectization at s = value, as a map from the base.
SmoothMap fiber_section(const ChartPtr& base, const Symplectization& sy, double value);

struct SymplecticToContact {
    DifferentialForm eta;  // embed^*(i_nu Omega)
    std::vector<Check> checks;
};

/// Contact form induced on a hypersurface by a Liouville field. `nu` must be
/// symbolic. Throws GeometryError when homogeneity or transversality fails.
SymplecticToContact symplectic_to_contact(const DifferentialForm& omega, const VectorField& nu,
                                          const SmoothMap& embed, std::size_t samples = kDefaultSamples,
                                          std::uint64_t seed = kDefaultSeed,
                                          Execution ex = default_execution());

struct ContactToSymplectic {
    DifferentialForm omega;  // sigma^*(d eta) on the base chart
    std::vector<Check> checks;
};

/// Symplectic form on the base of a contactification: p maps the contact
/// chart onto the base and sigma is a section. Throws GeometryError when sigma
/// is not a section or p does not collapse the Reeb direction.
ContactToSymplectic contact_to_symplectic(const ContactChart& c, const SmoothMap& p,
                                          const SmoothMap& sigma, std::size_t samples = kDefaultSamples,
                                          std::uint64_t seed = kDefaultSeed,
                                          Execution ex = default_execution());

struct IntegralityReport {
    double integral = 0.0;
    double rho = 0.0;
    double quotient = 0.0;
    long long nearest = 0;
    double deviation = 0.0;
    bool classified = false;  // false for relative cycles: only the integral is meaningful
    bool pass = false;
};

/// Integral of omega over a closed surface compared against rho Z. Open
/// surfaces are rejected unless `relative_cycle` is set, in which case only
/// the raw integral is reported.
IntegralityReport integrality_check(const DifferentialForm& omega, const ParametrizedSurface& surface,
                                    double rho, double tol = 1e-6,
                                    std::array<int, 2> grid = kDefaultGrid, bool relative_cycle = false,
                                    Execution ex = default_execution());

/// Extends a form to a chart whose first coordinates are those of the form's
/// chart (same names, same order).
DifferentialForm extend_to(const DifferentialForm& form, const ChartPtr& bigger);

/// A coordinate name not used by the chart, starting from `base`.
std::string fresh_name(const Chart& chart, std::string base);

}  // namespace contactkit
