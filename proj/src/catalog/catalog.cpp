#include "contactkit/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <regex>
#include <sstream>

namespace contactkit {

namespace {

constexpr double kPi = std::numbers::pi;

Expr var(const std::string& s) { return Expr::variable(s); }

std::string idx(const std::string& base, int i) { return base + std::to_string(i); }

std::string format(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

// Sum of dx^a ^ dx^b over the given index pairs.
DifferentialForm symplectic_sum(const ChartPtr& chart, const std::vector<std::pair<int, int>>& pairs) {
    DifferentialForm out = DifferentialForm::zero(chart, 2);
    for (const auto& [a, b] : pairs) out = out + DifferentialForm::basis(chart, {a, b});
    return out;
}

ExampleDescriptor darboux(int n) {
    std::vector<std::string> coords{"z"};
    for (int i = 1; i <= n; ++i) coords.push_back(idx("p", i));
    for (int i = 1; i <= n; ++i) coords.push_back(idx("q", i));
    auto chart = make_chart("darboux" + std::to_string(n), coords);
    std::vector<Expr> c(coords.size(), Expr(0.0));
    c[0] = Expr(1.0);
    for (int i = 1; i <= n; ++i) c[static_cast<std::size_t>(n + i)] = -var(idx("p", i));
    ContactChart contact(DifferentialForm::one_form(chart, c));

    std::vector<Expr> reeb(coords.size(), Expr(0.0));
    reeb[0] = Expr(1.0);

    // Base (p, q): drop z, section at z = 0.
    auto base = make_chart("darboux_base" + std::to_string(n),
                           std::vector<std::string>(coords.begin() + 1, coords.end()));
    std::vector<Expr> pc, sc{Expr(0.0)};
    std::vector<std::pair<int, int>> pairs;
    for (std::size_t i = 1; i < coords.size(); ++i) {
        pc.push_back(var(coords[i]));
        sc.push_back(var(coords[i]));
    }
    for (int i = 0; i < n; ++i) pairs.emplace_back(n + i, i);  // dq ^ dp
    KnownReduction red{SmoothMap(chart, base, pc), SmoothMap(base, chart, sc), symplectic_sum(base, pairs),
                       std::nullopt};

    auto map_of = [&](double sz, double sp, double sq, double shift) {
        std::vector<Expr> comps{Expr(sz) * var("z") + Expr(shift)};
        for (int i = 1; i <= n; ++i) comps.push_back(Expr(sp) * var(idx("p", i)));
        for (int i = 1; i <= n; ++i) comps.push_back(Expr(sq) * var(idx("q", i)));
        return SmoothMap(chart, chart, comps);
    };
    std::vector<Contactomorphism> maps{
        {"translation", map_of(1, 1, 1, 0.75), Expr(1.0), true},
        {"reversal", map_of(-1, 1, -1, 0), Expr(-1.0), true},
        {"scaling", map_of(4, 2, 2, 0), Expr(4.0), true},
        {"momentum_doubling", map_of(1, 2, 1, 0), Expr(1.0), false},
    };

    return {"darboux(" + std::to_string(n) + ")", std::move(contact), reeb, INFINITY, std::move(red),
            std::move(maps), std::nullopt, {}, "eta = dz - sum p_i dq_i on R^" + std::to_string(2 * n + 1)};
}

ChartPtr hopf_chart(std::optional<ExcludedBall> hole) {
    Chart chart("hopf_s3", {"xi1", "xi2", "phi"}, {{0, 2 * kPi}, {0, 2 * kPi}, {0, kPi / 2}}, {true, true, false});
    if (hole) chart = chart.with_excluded(*hole);
    return std::make_shared<const Chart>(std::move(chart));
}

DifferentialForm hopf_form(const ChartPtr& chart) {
    return DifferentialForm::one_form(chart, {pow(cos(var("phi")), 2), pow(sin(var("phi")), 2), Expr(0.0)});
}

ExampleDescriptor hopf_s3() {
    auto chart = hopf_chart(std::nullopt);
    ContactChart contact(hopf_form(chart));
    auto base = make_chart("s2", {"phi", "psi"}, {{0, kPi / 2}, {0, 2 * kPi}}, {false, true});
    const DifferentialForm omega = DifferentialForm::basis(base, {0, 1}).scaled(sin(Expr(2.0) * var("phi")));
    ParametrizedSurface sphere{{Interval{0, kPi / 2}, Interval{0, 2 * kPi}},
                               SmoothMap::identity(base),
                               {EdgeKind::Collapsed, EdgeKind::Periodic}};
    KnownReduction red{SmoothMap(chart, base, {var("phi"), var("xi2") - var("xi1")}),
                       SmoothMap(base, chart, {Expr(0.0), var("psi"), var("phi")}), omega, std::move(sphere)};
    std::vector<Contactomorphism> maps{
        {"torus_rotation", SmoothMap(chart, chart, {var("xi1") + Expr(0.5), var("xi2") - Expr(1.25), var("phi")}),
         Expr(1.0), true},
        {"fiber_swap", SmoothMap(chart, chart, {var("xi2"), var("xi1"), var("phi")}), Expr(1.0), false},
    };
    return {"hopf_s3", std::move(contact), std::vector<Expr>{Expr(1.0), Expr(1.0), Expr(0.0)}, 2 * kPi,
            std::move(red), std::move(maps), std::nullopt, {},
            "restriction of the Liouville form of C^2 to the unit sphere, in the dense Hopf chart"};
}

ExampleDescriptor exact(int n) {
    std::vector<std::string> coords;
    for (int i = 1; i <= n; ++i) coords.push_back(idx("q", i));
    for (int i = 1; i <= n; ++i) coords.push_back(idx("p", i));
    auto base = make_chart("plane" + std::to_string(2 * n), coords);
    coords.push_back("t");
    auto chart = make_chart("exact" + std::to_string(n), coords);
    std::vector<Expr> c(coords.size(), Expr(0.0));
    for (int i = 1; i <= n; ++i) {
        c[static_cast<std::size_t>(i - 1)] = Expr(-0.5) * var(idx("p", i));
        c[static_cast<std::size_t>(n + i - 1)] = Expr(0.5) * var(idx("q", i));
    }
    c.back() = Expr(1.0);
    ContactChart contact(DifferentialForm::one_form(chart, c));

    std::vector<Expr> reeb(coords.size(), Expr(0.0));
    reeb.back() = Expr(1.0);

    std::vector<Expr> pc, sc;
    std::vector<std::pair<int, int>> pairs;
    for (std::size_t i = 0; i + 1 < coords.size(); ++i) {
        pc.push_back(var(coords[i]));
        sc.push_back(var(coords[i]));
    }
    sc.push_back(Expr(0.0));
    for (int i = 0; i < n; ++i) pairs.emplace_back(i, n + i);
    KnownReduction red{SmoothMap(chart, base, pc), SmoothMap(base, chart, sc), symplectic_sum(base, pairs),
                       std::nullopt};

    // Rotation in the (q1, p1) plane preserves q dp - p dq.
    const double a = 0.6;
    std::vector<Expr> rot, stretch;
    for (const auto& s : coords) {
        rot.push_back(var(s));
        stretch.push_back(var(s));
    }
    rot[0] = Expr(std::cos(a)) * var("q1") - Expr(std::sin(a)) * var("p1");
    rot[static_cast<std::size_t>(n)] = Expr(std::sin(a)) * var("q1") + Expr(std::cos(a)) * var("p1");
    stretch[0] = Expr(2.0) * var("q1");
    std::vector<Contactomorphism> maps{
        {"rotation", SmoothMap(chart, chart, rot), Expr(1.0), true},
        {"q_stretch", SmoothMap(chart, chart, stretch), Expr(1.0), false},
    };
    return {"exact(" + std::to_string(n) + ")", std::move(contact), reeb, INFINITY, std::move(red),
            std::move(maps), std::nullopt, {},
            "eta = theta + dt with theta = 1/2 sum (q dp - p dq) on R^" + std::to_string(2 * n)};
}

ExampleDescriptor punctured_hopf() {
    auto chart = hopf_chart(ExcludedBall{{kPi, kPi, kPi / 4}, 0.1});
    ContactChart contact(hopf_form(chart));
    return {"punctured_hopf", std::move(contact), std::vector<Expr>{Expr(1.0), Expr(1.0), Expr(0.0)},
            std::nullopt, std::nullopt, {}, Point{kPi - 1.0, kPi - 1.0, kPi / 4}, {},
            "Hopf chart with a ball of radius 0.1 removed around (pi, pi, pi/4); the Reeb flow is incomplete"};
}

DifferentialForm plane_theta() {
    auto chart = make_chart("plane", {"q", "p"});
    return DifferentialForm::one_form(chart, {-var("p"), Expr(0.0)});
}

ExampleDescriptor torus_fixture(std::int64_t k, std::int64_t l) {
    if (k <= 0 || l <= 0) throw CatalogError("torus_fixture: base periods must be positive");
    const Period rho1 = Period::finite(Rational(k)), rho2 = Period::finite(Rational(l));
    const PrincipalPeriodPair pair = principal_product_period(rho1, rho2);
    const Rational oracle = torus_first_return(rho1.value(), rho2.value(), Rational(1, 2), Rational(1, 2));
    const double rho = pair.rho.to_double();

    std::vector<Check> extra;
    extra.push_back(below("period_lemma", pair.rho.value() == oracle ? 0.0 : 1.0, 0.5, 1,
                          "rho = " + pair.rho.to_string() + ", torus first return = " + oracle.to_string() +
                              ", k = " + std::to_string(*pair.k) + ", l = " + std::to_string(*pair.l)));
    PrincipalProduct pp = principal_product_form(plane_theta(), plane_theta(), rho);
    for (auto& c : pp.checks) {
        c.name = "principal_" + c.name;
        extra.push_back(std::move(c));
    }
    std::vector<Expr> reeb(pp.contact.chart()->dim(), Expr(0.0));
    reeb.back() = Expr(1.0);
    return {"torus_fixture(" + std::to_string(k) + "," + std::to_string(l) + ")", std::move(pp.contact), reeb, rho,
            std::nullopt, {}, std::nullopt, std::move(extra),
            "principal product of two Darboux planes with fiber periods " + std::to_string(k) + " and " +
                std::to_string(l)};
}

int parse_int(const std::string& s, std::string_view id) {
    try {
        std::size_t used = 0;
        const long v = std::stol(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return static_cast<int>(v);
    } catch (const std::exception&) {
        throw CatalogError("malformed catalog id '" + std::string(id) + "'");
    }
}

}  // namespace

std::vector<std::string> catalog_ids() {
    return {"darboux(1)", "darboux(2)", "darboux(3)",     "darboux(4)",         "hopf_s3",
            "exact(1)",   "exact(2)",   "exact(3)",       "punctured_hopf",     "torus_fixture(6,4)"};
}

ExampleDescriptor describe(std::string_view id) {
    static const std::regex one(R"(\s*(darboux|exact)\s*\(\s*(-?\d+)\s*\)\s*)");
    static const std::regex two(R"(\s*torus_fixture\s*\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)\s*)");
    const std::string s(id);
    std::smatch m;
    if (s == "hopf_s3") return hopf_s3();
    if (s == "punctured_hopf") return punctured_hopf();
    if (std::regex_match(s, m, one)) {
        const int n = parse_int(m[2], id);
        if (m[1] == "darboux") {
            if (n < 1 || n > 4) throw CatalogError("darboux(n) requires 1 <= n <= 4");
            return darboux(n);
        }
        if (n < 1 || n > 3) throw CatalogError("exact(n) requires 1 <= n <= 3");
        return exact(n);
    }
    if (std::regex_match(s, m, two)) return torus_fixture(parse_int(m[1], id), parse_int(m[2], id));
    throw CatalogError("unknown catalog id '" + s + "'");
}

std::vector<Check> verify(const ExampleDescriptor& d, const VerifyOptions& opts) {
    std::vector<Check> out;
    const ContactChart& c = d.contact;
    const ContactReport cr = is_contact(c.eta(), opts.samples, opts.seed, opts.ex);
    out.push_back(above("contact_condition", cr.min_volume, kContactThreshold, opts.samples,
                        "min |eta ^ (d eta)^n / n!|"));
    if (!cr.pass) return out;  // the remaining checks need a Reeb field

    for (auto& r : reeb_checks(c, opts.samples, opts.seed, opts.ex)) out.push_back(std::move(r));

    if (d.reeb) {
        const VectorField known = VectorField::symbolic(c.chart(), *d.reeb);
        const auto points = c.chart()->samples(opts.seed, opts.samples);
        const double res = max_over(points.size(), [&](std::size_t i) {
            const Point a = known.at(points[i]), b = c.reeb().at(points[i]);
            double m = 0.0;
            for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
            return m;
        }, opts.ex).value;
        out.push_back(below("reeb_closed_form", res, 1e-10, opts.samples, "max |R - R_known|"));
    }

    if (d.period) {
        PeriodOptions po;
        po.h = opts.step;
        const bool finite = std::isfinite(*d.period);
        po.horizon = finite ? 1.5 * *d.period : opts.nonperiodic_horizon;
        const OrbitSuiteReport rep = period_constancy_suite(c, opts.orbits, opts.seed, po, opts.ex);
        const std::string verdict = to_string(rep.verdict);
        if (finite) {
            const bool periodic = rep.verdict == OrbitSuiteReport::Verdict::AllPeriodic;
            out.push_back(below("period_constancy", periodic ? rep.spread : INFINITY, 1e-5 * *d.period, opts.orbits,
                                "verdict " + verdict + ", spread of detected periods"));
            out.push_back(below("period_value", periodic ? std::abs(rep.mean - *d.period) : INFINITY, 1e-6,
                                opts.orbits, "mean " + format(rep.mean) + " vs " + format(*d.period)));
        } else {
            std::size_t returned = 0;
            for (std::size_t i = 0; i < rep.orbits.size(); ++i)
                if (rep.orbits[i].status == PeriodResult::Status::Periodic || rep.exit_times[i]) ++returned;
            out.push_back(below("period_constancy", static_cast<double>(returned), 0.5, opts.orbits,
                                "verdict " + verdict + " (horizon " + format(po.horizon) +
                                    "), orbits returning or exiting"));
        }
    }

    if (d.exit_witness) {
        double exit_time = 0.0;
        bool exited = false;
        try {
            flow(c.reeb(), *d.exit_witness, opts.nonperiodic_horizon, opts.step);
        } catch (const DomainExit& e) {
            exited = true;
            exit_time = e.time();
        }
        out.push_back(above("incomplete_flow", exited ? 1.0 : 0.0, 0.5, 1,
                            exited ? "orbit left the domain at t = " + format(exit_time)
                                   : "orbit stayed inside up to t = " + format(opts.nonperiodic_horizon)));
    }

    if (d.reduction) {
        const KnownReduction& r = *d.reduction;
        const ContactToSymplectic cts = contact_to_symplectic(c, r.p, r.sigma, opts.samples, opts.seed, opts.ex);
        for (auto ch : cts.checks) {
            ch.name = "reduction_" + ch.name;
            out.push_back(std::move(ch));
        }
        if (r.omega) {
            const auto base_points = r.p.target()->samples(opts.seed, opts.samples);
            out.push_back(below("reduction_omega", max_residual(cts.omega, *r.omega, base_points, opts.ex), 1e-10,
                                opts.samples, "sigma^* d eta against the known omega"));
        }
        if (r.surface && d.period && std::isfinite(*d.period)) {
            const IntegralityReport ir = integrality_check(r.omega ? *r.omega : cts.omega, *r.surface, *d.period,
                                                           1e-6, opts.grid, false, opts.ex);
            out.push_back(below("integrality", ir.deviation, 1e-6,
                                static_cast<std::size_t>(opts.grid[0]) * static_cast<std::size_t>(opts.grid[1]),
                                "integral " + format(ir.integral) + " = " + format(ir.quotient) + " rho, class " +
                                    std::to_string(ir.nearest)));
        }
    }

    const auto points = c.chart()->samples(opts.seed, opts.samples);
    for (const auto& m : d.maps) {
        const double res = max_residual(pullback(m.phi, c.eta()), c.eta().scaled(m.f), points, opts.ex);
        if (m.genuine)
            out.push_back(below("contactomorphism[" + m.name + "]", res, 1e-10, opts.samples,
                                "max |phi^* eta - f eta|, f = " + m.f.to_string()));
        else
            out.push_back(above("non_contactomorphism[" + m.name + "]", res, 1e-6, opts.samples,
                                "max |phi^* eta - f eta|, f = " + m.f.to_string()));
    }

    for (const auto& e : d.extra_checks) out.push_back(e);
    std::stable_sort(out.begin(), out.end(), [](const Check& a, const Check& b) { return a.name < b.name; });
    return out;
}

ExampleDescriptor load(std::string_view id, const VerifyOptions& opts) {
    ExampleDescriptor d = describe(id);
    std::string failed;
    for (const auto& c : verify(d, opts))
        if (!c.pass) failed += " " + c.name + " (" + format(c.value) + " vs " + format(c.bound) + ")";
    if (!failed.empty()) throw GeometryError("catalog example " + d.id + " failed:" + failed);
    return d;
}

PrincipalContactData principal_data(std::string_view id) {
    if (id == "darboux-data") return PrincipalContactData(plane_theta(), 2 * kPi);
    if (id == "hopf-data" || id == "hopf_s3") {
        auto base = make_chart("s2", {"phi", "psi"}, {{0, kPi / 2}, {0, 2 * kPi}}, {false, true});
        return PrincipalContactData(DifferentialForm::one_form(base, {Expr(0.0), pow(sin(var("phi")), 2)}), 2 * kPi);
    }
    throw CatalogError("unknown principal data '" + std::string(id) + "' (expected darboux-data or hopf-data)");
}

}  // namespace contactkit
