#pragma once

// Fixed-step RK4 flows of vector fields on a chart, first-return (minimal
// period) detection and orbit classification.

#include <functional>
#include <optional>
#include <vector>

#include "contactkit/calculus.hpp"
#include "contactkit/contact.hpp"

namespace contactkit {

inline constexpr double kDefaultStep = 1e-3;
inline constexpr double kDefaultHorizon = 100.0;
inline constexpr double kDefaultReturnTol = 1e-4;
inline constexpr double kRefinedReturnTol = 1e-8;

/// A trajectory left the chart domain (or entered an excluded region).
class DomainExit : public GeometryError {
public:
    DomainExit(double time, Point last);
    double time() const { return time_; }
    const Point& last_inside() const { return last_; }

private:
    double time_;
    Point last_;
};

/// Scalar residual evaluated after every accepted step, e.g. |eta(X) - 1|.
using Monitor = std::function<double(std::span<const double>)>;

struct FlowResult {
    Point x;
    double time = 0.0;
    double step = 0.0;
    std::size_t steps = 0;
    double max_residual = 0.0;  // of the monitor, 0 when none was given
};

/// Classical RK4 with fixed step h and a final partial step landing exactly
/// at T (T may be negative). Periodic coordinates are wrapped after each step.
/// Global error is O(h^4). Throws DomainExit when the trajectory leaves the
/// domain and GeometryError when x0 is outside it.
FlowResult flow(const VectorField& x, std::span<const double> x0, double T, double h = kDefaultStep,
                const Monitor& monitor = {});

struct PeriodOptions {
    double horizon = kDefaultHorizon;
    double return_tol = kDefaultReturnTol;
    double refined_tol = kRefinedReturnTol;
    double h = kDefaultStep;
};

struct PeriodResult {
    enum class Status { Periodic, NoReturn };
    Status status = Status::NoReturn;
    double period = 0.0;           // valid when periodic
    double return_distance = 0.0;  // wrapped l-infinity distance at the refined time
    int refinement_iterations = 0;
    std::size_t candidates = 0;    // near-returns examined
};

/// First return of the orbit through x0: local minima of |x(t) - x0| below
/// return_tol + h |X| are refined by bisection on the derivative of the
/// squared distance to 1e-10 in t and accepted below refined_tol.
PeriodResult minimal_period(const VectorField& x, std::span<const double> x0, const PeriodOptions& opts = {});

struct OrbitSuiteReport {
    enum class Verdict { AllPeriodic, AllNonPeriodic, Mixed, DomainExit };
    Verdict verdict = Verdict::AllNonPeriodic;
    std::vector<Point> starts;
    std::vector<PeriodResult> orbits;
    std::vector<std::optional<double>> exit_times;  // set for orbits that left the domain
    double mean = 0.0;                              // of detected periods
    double spread = 0.0;                            // max - min of detected periods
    bool pass = false;
};

const char* to_string(OrbitSuiteReport::Verdict v);

/// Runs minimal_period from n seeded chart samples. Passes when the orbits
/// are uniformly non-periodic, or uniformly periodic with
/// spread < 1e-5 * mean. Orbits run in parallel; each is sequential.
OrbitSuiteReport period_constancy_suite(const VectorField& x, std::size_t n_orbits, std::uint64_t seed,
                                        const PeriodOptions& opts = {}, Execution ex = default_execution());
OrbitSuiteReport period_constancy_suite(const ContactChart& c, std::size_t n_orbits, std::uint64_t seed,
                                        const PeriodOptions& opts = {}, Execution ex = default_execution());

}  // namespace contactkit
