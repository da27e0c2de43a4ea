#pragma once

// Built-in examples with their known closed-form data, and the verification
// suite that re-derives that data.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "contactkit/contact.hpp"
#include "contactkit/dynamics.hpp"
#include "contactkit/prequant.hpp"
#include "contactkit/products.hpp"

namespace contactkit {

class CatalogError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Base of a contactification: projection, section, the expected symplectic
/// form when known, and optionally a closed surface for the integrality test.
struct KnownReduction {
    SmoothMap p;
    SmoothMap sigma;
    std::optional<DifferentialForm> omega;
    std::optional<ParametrizedSurface> surface;
};

/// A map phi with phi^* eta = f eta (genuine) or a map that breaks this.
struct Contactomorphism {
    std::string name;
    SmoothMap phi;
    Expr f;
    bool genuine = true;
};

struct ExampleDescriptor {
    std::string id;
    ContactChart contact;
    std::optional<std::vector<Expr>> reeb;  // closed form, when known
    /// Minimal period of every orbit: a finite value, infinity for
    /// non-periodic flows, or unset when there is no common period.
    std::optional<double> period;
    std::optional<KnownReduction> reduction;
    std::vector<Contactomorphism> maps;
    /// A start point whose Reeb orbit leaves the domain within the horizon.
    std::optional<Point> exit_witness;
    std::vector<Check> extra_checks;  // example-specific, computed at construction
    std::string notes;
};

struct VerifyOptions {
    std::size_t samples = kDefaultSamples;
    std::uint64_t seed = kDefaultSeed;
    double step = kDefaultStep;
    std::array<int, 2> grid = kDefaultGrid;
    std::size_t orbits = 20;
    double nonperiodic_horizon = 10.0;
    Execution ex = default_execution();
};

/// Accepted ids: darboux(n) for n = 1..4, hopf_s3, exact(n) for n = 1..3,
/// punctured_hopf, torus_fixture(k,l).
std::vector<std::string> catalog_ids();

/// Builds the descriptor without running the suite. Throws CatalogError for
/// an unknown or malformed id.
ExampleDescriptor describe(std::string_view id);

/// Contact condition, Reeb residual and invariance, closed-form Reeb field,
/// period constancy (or non-periodicity), incompleteness witness, base
/// reduction with integrality when a closed surface and finite period are
/// known, and the conformal factor of every listed map.
std::vector<Check> verify(const ExampleDescriptor& d, const VerifyOptions& opts = {});

/// describe + verify; throws GeometryError when a declared property fails.
ExampleDescriptor load(std::string_view id, const VerifyOptions& opts = {});

/// Normal-form principal data for the prequantization examples:
/// "darboux-data" (theta = -p dq on the plane, rho = 2 pi) and "hopf-data"
/// (theta = sin^2 phi dpsi on the sphere chart, rho = 2 pi).
PrincipalContactData principal_data(std::string_view id);

}  // namespace contactkit
