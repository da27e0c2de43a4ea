#include "contactkit/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace contactkit {

DomainExit::DomainExit(double time, Point last)
    : GeometryError([&] {
          std::ostringstream os;
          os << "trajectory left the domain at t = " << time;
          return os.str();
      }()),
      time_(time),
      last_(std::move(last)) {}

namespace {

Point rk4_step(const VectorField& f, const Point& x, double h) {
    const std::size_t n = x.size();
    Point y(n);
    const Point k1 = f.at(x);
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + 0.5 * h * k1[i];
    const Point k2 = f.at(y);
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + 0.5 * h * k2[i];
    const Point k3 = f.at(y);
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + h * k3[i];
    const Point k4 = f.at(y);
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return y;
}

double sup_norm(const Point& v) {
    double m = 0.0;
    for (double c : v) m = std::max(m, std::abs(c));
    return m;
}

// Componentwise a - b with periodic coordinates reduced to the nearest image.
Point wrapped_difference(const Chart& chart, const Point& a, std::span<const double> b) {
    Point d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        d[i] = a[i] - b[i];
        if (chart.periodic(i)) {
            const double len = chart.interval(i).length();
            d[i] -= len * std::round(d[i] / len);
        }
    }
    return d;
}

Point start_point(const Chart& chart, std::span<const double> x0) {
    Point x(x0.begin(), x0.end());
    if (x.size() != chart.dim()) throw GeometryError("flow: start point has the wrong dimension");
    chart.wrap(x);
    if (!chart.contains(x)) throw GeometryError("flow: start point is outside the domain of " + chart.name());
    return x;
}

// One step with wrapping and the domain test.
Point advance(const VectorField& f, const Chart& chart, const Point& x, double h, double t_after) {
    Point y = rk4_step(f, x, h);
    chart.wrap(y);
    if (!chart.contains(y)) throw DomainExit(t_after, x);
    return y;
}

}  // namespace

FlowResult flow(const VectorField& f, std::span<const double> x0, double T, double h, const Monitor& monitor) {
    if (!(h > 0.0)) throw GeometryError("flow: step must be positive");
    const Chart& chart = *f.chart();
    FlowResult r;
    r.x = start_point(chart, x0);
    r.step = h;
    const double dir = T < 0 ? -1.0 : 1.0;
    const double span = std::abs(T);
    const auto full = static_cast<std::size_t>(std::floor(span / h));
    const double rest = span - static_cast<double>(full) * h;
    if (monitor) r.max_residual = monitor(r.x);
    for (std::size_t k = 0; k < full; ++k) {
        r.x = advance(f, chart, r.x, dir * h, dir * static_cast<double>(k + 1) * h);
        ++r.steps;
        if (monitor) r.max_residual = std::max(r.max_residual, monitor(r.x));
    }
    if (rest > 1e-15 * std::max(1.0, span)) {
        r.x = advance(f, chart, r.x, dir * rest, T);
        ++r.steps;
        if (monitor) r.max_residual = std::max(r.max_residual, monitor(r.x));
    }
    r.time = T;
    return r;
}

PeriodResult minimal_period(const VectorField& f, std::span<const double> x0_in, const PeriodOptions& opts) {
    if (!(opts.h > 0.0) || !(opts.horizon > 0.0)) throw GeometryError("minimal_period: step and horizon must be positive");
    const Chart& chart = *f.chart();
    const Point x0 = start_point(chart, x0_in);
    PeriodResult out;

    // position at time a + tau, integrating from xa with the same step
    auto position = [&](const Point& xa, double tau) {
        Point x = xa;
        const auto full = static_cast<std::size_t>(std::floor(tau / opts.h));
        for (std::size_t k = 0; k < full; ++k) x = advance(f, chart, x, opts.h, 0.0);
        const double rest = tau - static_cast<double>(full) * opts.h;
        if (rest > 0.0) x = advance(f, chart, x, rest, 0.0);
        return x;
    };
    auto slope = [&](const Point& x) {
        const Point d = wrapped_difference(chart, x, x0);
        const Point v = f.at(x);
        double s = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) s += d[i] * v[i];
        return s;
    };

    Point x_pp = x0, x_p, x_n;
    double d_pp = 0.0, d_p = 0.0;
    x_p = advance(f, chart, x0, opts.h, opts.h);
    d_p = chart.distance(x_p, x0);
    const auto steps = static_cast<std::size_t>(std::ceil(opts.horizon / opts.h));
    for (std::size_t k = 2; k <= steps; ++k) {
        const double t_n = static_cast<double>(k) * opts.h;
        x_n = advance(f, chart, x_p, opts.h, t_n);
        const double d_n = chart.distance(x_n, x0);
        const double window = opts.return_tol + opts.h * sup_norm(f.at(x_p));
        if (d_p <= d_pp && d_p < d_n && d_p < window) {
            ++out.candidates;
            // bracket [t_{k-2}, t_k] starting from x_pp
            double a = 0.0, b = 2.0 * opts.h;
            const double ga = slope(x_pp);
            const double gb = slope(x_n);
            int it = 0;
            double best_tau = opts.h;
            if (ga < 0.0 && gb > 0.0) {
                while (b - a > 1e-10 && it < 200) {
                    const double m = 0.5 * (a + b);
                    const double gm = slope(position(x_pp, m));
                    (gm < 0.0 ? a : b) = m;
                    ++it;
                }
                best_tau = 0.5 * (a + b);
            }
            const Point xr = position(x_pp, best_tau);
            const double dr = chart.distance(xr, x0);
            out.refinement_iterations += it;
            if (dr < opts.refined_tol) {
                out.status = PeriodResult::Status::Periodic;
                out.period = static_cast<double>(k - 2) * opts.h + best_tau;
                out.return_distance = dr;
                return out;
            }
        }
        x_pp = std::move(x_p);
        d_pp = d_p;
        x_p = std::move(x_n);
        d_p = d_n;
    }
    out.status = PeriodResult::Status::NoReturn;
    return out;
}

const char* to_string(OrbitSuiteReport::Verdict v) {
    switch (v) {
        case OrbitSuiteReport::Verdict::AllPeriodic: return "all-periodic";
        case OrbitSuiteReport::Verdict::AllNonPeriodic: return "all-non-periodic";
        case OrbitSuiteReport::Verdict::Mixed: return "mixed";
        case OrbitSuiteReport::Verdict::DomainExit: return "domain-exit";
    }
    return "?";
}

OrbitSuiteReport period_constancy_suite(const VectorField& f, std::size_t n_orbits, std::uint64_t seed,
                                        const PeriodOptions& opts, Execution ex) {
    OrbitSuiteReport r;
    r.starts = f.chart()->samples(seed, n_orbits);
    r.orbits.resize(n_orbits);
    r.exit_times.resize(n_orbits);
    for_each_index(n_orbits, [&](std::size_t i) {
        try {
            r.orbits[i] = minimal_period(f, r.starts[i], opts);
        } catch (const DomainExit& e) {
            r.exit_times[i] = e.time();
        }
    }, ex);

    std::size_t periodic = 0, exits = 0;
    double lo = INFINITY, hi = -INFINITY, sum = 0.0;
    for (std::size_t i = 0; i < n_orbits; ++i) {
        if (r.exit_times[i]) {
            ++exits;
        } else if (r.orbits[i].status == PeriodResult::Status::Periodic) {
            ++periodic;
            lo = std::min(lo, r.orbits[i].period);
            hi = std::max(hi, r.orbits[i].period);
            sum += r.orbits[i].period;
        }
    }
    if (periodic > 0) {
        r.mean = sum / static_cast<double>(periodic);
        r.spread = hi - lo;
    }
    if (exits > 0) {
        r.verdict = OrbitSuiteReport::Verdict::DomainExit;
        r.pass = false;
    } else if (periodic == n_orbits && n_orbits > 0) {
        r.verdict = OrbitSuiteReport::Verdict::AllPeriodic;
        r.pass = r.spread < 1e-5 * r.mean;
    } else if (periodic == 0) {
        r.verdict = OrbitSuiteReport::Verdict::AllNonPeriodic;
        r.pass = true;
    } else {
        r.verdict = OrbitSuiteReport::Verdict::Mixed;
        r.pass = false;
    }
    return r;
}

OrbitSuiteReport period_constancy_suite(const ContactChart& c, std::size_t n_orbits, std::uint64_t seed,
                                        const PeriodOptions& opts, Execution ex) {
    return period_constancy_suite(c.reeb(), n_orbits, seed, opts, ex);
}

}  // namespace contactkit
