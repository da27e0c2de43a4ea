#include "app.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "contactkit/catalog.hpp"
#include "manifold_file.hpp"

namespace contactkit::cli {

namespace {

// Errors in the invocation or its inputs (exit 2).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Flags {
    std::size_t samples = kDefaultSamples;
    std::uint64_t seed = kDefaultSeed;
    std::optional<double> tol;
    double step = kDefaultStep;
    std::string grid = "64,64";
    std::string json;
    std::string component = "pos";
};

std::array<int, 2> parse_grid(const std::string& s) {
    int a = 0, b = 0;
    char extra = 0;
    if (std::sscanf(s.c_str(), "%d,%d%c", &a, &b, &extra) != 2 || a < 2 || b < 2)
        throw InputError("--grid expects n1,n2 with both at least 2, got '" + s + "'");
    return {a, b};
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool is_file(const std::string& target) {
    std::error_code ec;
    return std::filesystem::is_regular_file(target, ec);
}

VerifyOptions verify_options(const Flags& f) {
    VerifyOptions o;
    o.samples = f.samples;
    o.seed = f.seed;
    o.step = f.step;
    o.grid = parse_grid(f.grid);
    return o;
}

// Everything that determines the report, in a fixed textual form.
std::string digest_of(const std::string& command, const std::vector<std::string>& targets, const Flags& f) {
    std::ostringstream s;
    s << command;
    for (const auto& t : targets) s << '\n' << t << '\n' << (is_file(t) ? read_file(t) : std::string());
    s.precision(17);
    s << "\nsamples=" << f.samples << " seed=" << f.seed << " step=" << f.step << " grid=" << f.grid
      << " component=" << f.component << " tol=";
    if (f.tol) s << *f.tol;
    return fnv1a_hex(s.str());
}

struct LoadedTarget {
    std::optional<ExampleDescriptor> desc;
    std::vector<Check> failed_contact;  // set instead of desc when a file fails the contact test
};

LoadedTarget load_target(const std::string& target, const Flags& f) {
    if (!is_file(target)) return {describe(target), {}};
    const ManifoldFile m = parse_manifold(read_file(target));
    const ContactReport cr = is_contact(m.eta, f.samples, f.seed);
    if (!cr.pass)
        return {std::nullopt,
                {above("contact_condition", cr.min_volume, kContactThreshold, f.samples, "min |eta ^ (d eta)^n / n!|")}};
    std::optional<KnownReduction> red;
    if (m.projection) red = KnownReduction{*m.projection, *m.section, std::nullopt, std::nullopt};
    return {ExampleDescriptor{std::filesystem::path(target).filename().string(), ContactChart(m.eta, f.samples, f.seed),
                              std::nullopt, m.period, std::move(red), {}, std::nullopt, {}, "manifold file"},
            {}};
}

ExampleDescriptor require_contact(const std::string& target, const Flags& f) {
    LoadedTarget t = load_target(target, f);
    if (!t.desc) throw InputError(target + " is not a contact form (min volume " +
                                  std::to_string(t.failed_contact.front().value) + ")");
    return std::move(*t.desc);
}

void apply_tolerance(std::vector<Check>& checks, std::optional<double> tol) {
    if (!tol) return;
    for (auto& c : checks)
        if (c.kind == Check::Kind::Below) {
            c.bound = *tol;
            c.pass = c.value < c.bound;
        }
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

void print_table(std::ostream& out, const ReportHeader& h, std::size_t samples, const std::vector<Check>& checks) {
    out << h.command << ' ' << h.target << "  (seed " << h.seed << ", samples " << samples << ", digest " << h.digest
        << ")\n";
    std::size_t width = 0;
    for (const auto& c : checks) width = std::max(width, c.name.size());
    std::size_t passed = 0;
    for (const auto& c : checks) {
        passed += c.pass;
        out << "  " << (c.pass ? "PASS" : "FAIL") << "  " << c.name << std::string(width - c.name.size() + 2, ' ')
            << sci(c.value) << (c.kind == Check::Kind::Below ? " < " : " > ") << sci(c.bound);
        if (!c.detail.empty()) out << "  " << c.detail;
        out << '\n';
    }
    out << passed << '/' << checks.size() << " checks passed\n";
}

int finish(std::ostream& out, const Flags& f, const ReportHeader& h, std::vector<Check> checks) {
    apply_tolerance(checks, f.tol);
    std::stable_sort(checks.begin(), checks.end(), [](const Check& a, const Check& b) { return a.name < b.name; });
    print_table(out, h, f.samples, checks);
    if (!f.json.empty()) {
        std::ofstream js(f.json, std::ios::binary | std::ios::trunc);
        if (!js) throw InputError("cannot write " + f.json);
        js << ndjson_report(h, checks);
    }
    return all_pass(checks) ? kExitPass : kExitCheckFailure;
}

int cmd_verify(std::ostream& out, const Flags& f, const std::string& target) {
    const ReportHeader h{"verify", target, digest_of("verify", {target}, f), f.seed};
    LoadedTarget t = load_target(target, f);
    if (!t.desc) return finish(out, f, h, t.failed_contact);
    return finish(out, f, h, verify(*t.desc, verify_options(f)));
}

Component parse_component(const std::string& s) {
    if (s == "pos") return Component::Positive;
    if (s == "neg") return Component::Negative;
    throw InputError("--component expects pos or neg, got '" + s + "'");
}

int cmd_product(std::ostream& out, const Flags& f, const std::string& t1, const std::string& t2) {
    const ReportHeader h{"product", t1 + " " + t2, digest_of("product", {t1, t2}, f), f.seed};
    const Component comp = parse_component(f.component);
    const ExampleDescriptor d1 = require_contact(t1, f);
    const bool same = t1 == t2;
    const ExampleDescriptor d2 = same ? d1 : require_contact(t2, f);

    const ProductContactChart p(d1.contact, d2.contact, comp, f.samples, f.seed);
    std::vector<Check> checks = product_checks(p, f.samples, f.seed);
    const Point x = p.chart()->sample(f.seed, 0);
    const DistributionWitness w = distribution_witness(p, x);
    checks.push_back(below("distribution_witness", w.max_residual, 1e-10, 1,
                           "rank " + std::to_string(w.rank) + " of " + std::to_string(p.chart()->dim() - 1)));

    // Graphs of the example's maps. A conformal factor f puts the graph at
    // fiber coordinate -f, hence on the component opposite to the sign of f.
    if (same) {
        const Point x1 = d1.contact.chart()->sample(f.seed, 0);
        for (const auto& m : d1.maps) {
            const double fx = eval(m.f, Binding(d1.contact.chart()->coords(), x1));
            const Component side = fx > 0 ? Component::Negative : Component::Positive;
            const ProductContactChart ps(d1.contact, d1.contact, side, f.samples, f.seed);
            const LegendrianReport r = check_legendrian(ps, graph_c(ps, m.phi, m.f), f.samples, f.seed);
            const std::string detail = std::string("component ") + to_string(side) + ", dimension " +
                                       std::to_string(r.dimension) + ", " + std::to_string(r.outside) +
                                       " samples outside";
            if (m.genuine)
                checks.push_back(
                    below("legendrian[" + m.name + "]", r.outside ? INFINITY : r.max_pullback, 1e-10, r.samples, detail));
            else
                checks.push_back(above("non_legendrian[" + m.name + "]", r.max_pullback, 1e-6, r.samples, detail));
        }
    }
    return finish(out, f, h, std::move(checks));
}

int cmd_period(std::ostream& out, const Flags& f, const std::string& a, const std::string& b) {
    const ReportHeader h{"period", a + " " + b, digest_of("period", {a, b}, f), f.seed};
    Period r1 = Period::infinite(), r2 = Period::infinite();
    try {
        r1 = Period::parse(a);
        r2 = Period::parse(b);
    } catch (const std::invalid_argument& e) {
        throw InputError(std::string("period: ") + e.what());
    }
    const PrincipalPeriodPair pair = principal_product_period(r1, r2);
    std::string line = "rho = " + pair.rho.to_string();
    if (pair.k) line += ", k = " + std::to_string(*pair.k) + ", l = " + std::to_string(*pair.l);
    out << line << '\n';

    std::vector<Check> checks;
    if (r1.is_finite() && r2.is_finite()) {
        std::string oracle;
        bool agree = false;
        try {
            const Rational t = torus_first_return(r1.value(), r2.value(), Rational(1, 2), Rational(1, 2));
            oracle = t.to_string();
            agree = t == pair.rho.value();
        } catch (const std::exception& e) {
            oracle = std::string("unavailable (") + e.what() + ")";
        }
        checks.push_back(below("period_lemma", agree ? 0.0 : 1.0, 0.5, 1, line + "; torus first return " + oracle));
    } else {
        checks.push_back(below("period_lemma", 0.0, 0.5, 0, line + "; an infinite period leaves the other"));
    }
    return finish(out, f, h, std::move(checks));
}

int cmd_prequant(std::ostream& out, const Flags& f, const std::string& target, const std::string& hspec) {
    const ReportHeader h{"prequant", target + " " + hspec, digest_of("prequant", {target, hspec}, f), f.seed};
    PrincipalContactData d = [&] {
        try {
            return principal_data(target);
        } catch (const CatalogError& e) {
            throw InputError(e.what());
        }
    }();
    std::string text = hspec;
    if (text.rfind("H=", 0) == 0) text = text.substr(2);
    const auto& base_coords = d.base()->coords();
    const Expr H = parse(text, base_coords);

    // A Gaussian with a linear phase in the last base coordinate.
    const std::size_t n = base_coords.size();
    const EquivariantFunction psi = base_section(
        [n](std::span<const double> x) {
            double r2 = 0.0;
            for (std::size_t i = 0; i < n; ++i) r2 += x[i] * x[i];
            return std::exp(Complex(-0.25 * r2, 0.3 * x[n - 1]));
        },
        d);

    // The Dirac check nests finite differences, so it runs on at most 40 points.
    const std::size_t count = std::min<std::size_t>(f.samples, 40);
    const auto points = d.total()->samples(f.seed, count);
    const auto base_points = d.base()->samples(f.seed, f.samples);

    std::vector<Check> checks;
    const VectorField xh = hamiltonian_field(H, d.omega());
    checks.push_back(below("hamiltonian_field", hamiltonian_residual(xh, H, d.omega(), base_points), 1e-10, f.samples,
                           "max |i_X omega - dH|"));
    for (auto& c : lift_checks(xh, d, f.samples, f.seed)) checks.push_back(std::move(c));
    checks.push_back(below("prequantum_equivariance", prequantum_op(H, psi, d).phase_residual, 1e-6, 50,
                           "phase law of the image of psi"));
    for (const auto& g : base_coords) {
        const Expr ge = Expr::variable(g);
        checks.push_back(below("dirac[" + H.to_string() + "," + g + "]", dirac_residual(H, ge, psi, d, points), 1e-3,
                               count, "|([H_f, H_g] - i hbar H_{f,g}) psi|, {f, g} = " +
                                          poisson_bracket(H, ge, d.omega()).to_string()));
    }
    return finish(out, f, h, std::move(checks));
}

}  // namespace

std::string fnv1a_hex(std::string_view data) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (const unsigned char c : data) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

std::string ndjson_report(const ReportHeader& h, const std::vector<Check>& checks) {
    std::string out;
    for (const auto& c : checks) {
        nlohmann::json j;
        j["check"] = c.name;
        j["command"] = h.command;
        j["target"] = h.target;
        j["digest"] = h.digest;
        j["seed"] = h.seed;
        j["samples"] = c.samples;
        j["value"] = c.value;  // non-finite values serialize as null
        j["tolerance"] = c.bound;
        j["comparison"] = c.kind == Check::Kind::Below ? "below" : "above";
        j["pass"] = c.pass;
        j["detail"] = c.detail;
        out += j.dump() + '\n';
    }
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"contactkit: verification suites for contact forms on charts"};
    app.require_subcommand(1);
    app.fallthrough();
    Flags f;
    app.add_option("--samples", f.samples, "seeded sample points per check")->check(CLI::PositiveNumber);
    app.add_option("--seed", f.seed, "sampling seed");
    app.add_option("--tol", f.tol, "replace the bound of every residual (below) check");
    app.add_option("--step", f.step, "RK4 step h")->check(CLI::PositiveNumber);
    app.add_option("--grid", f.grid, "quadrature grid n1,n2");
    app.add_option("--json", f.json, "write newline-delimited JSON to PATH");
    app.add_option("--component", f.component, "product component: pos or neg");

    std::string target, target2, hspec;
    auto* verify_cmd = app.add_subcommand("verify", "run the suite on a catalog id or manifold file");
    verify_cmd->add_option("target", target, "catalog id or manifold file")->required();
    auto* product_cmd = app.add_subcommand("product", "contact product of two targets with the Legendrian fixture");
    product_cmd->add_option("first", target)->required();
    product_cmd->add_option("second", target2)->required();
    auto* period_cmd = app.add_subcommand("period", "period of a principal product from two rational periods");
    period_cmd->add_option("rho1", target)->required();
    period_cmd->add_option("rho2", target2)->required();
    auto* prequant_cmd = app.add_subcommand("prequant", "prequantum operator report (darboux-data or hopf-data)");
    prequant_cmd->add_option("data", target)->required();
    prequant_cmd->add_option("hamiltonian", hspec, "H=expr over the base coordinates")->required();
    auto* list_cmd = app.add_subcommand("list", "print the catalog ids");

    std::vector<std::string> argv(args.rbegin(), args.rend());
    if (!argv.empty()) argv.pop_back();  // program name
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitPass;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    }

    try {
        if (*list_cmd) {
            for (const auto& id : catalog_ids()) out << id << '\n';
            return kExitPass;
        }
        if (*verify_cmd) return cmd_verify(out, f, target);
        if (*product_cmd) return cmd_product(out, f, target, target2);
        if (*period_cmd) return cmd_period(out, f, target, target2);
        return cmd_prequant(out, f, target, hspec);
    } catch (const std::exception& e) {
        // Bad ids, files and expressions, and geometry errors raised while
        // building the requested objects (e.g. a map that is not a section).
        err << "error: " << e.what() << '\n';
    }
    return kExitInputError;
}

}  // namespace contactkit::cli
