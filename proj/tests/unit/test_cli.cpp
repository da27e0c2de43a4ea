#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "app.hpp"
#include "contactkit/expr.hpp"
#include "manifold_file.hpp"

using namespace contactkit;
using namespace contactkit::cli;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "contactkit");
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string manifold(const std::string& name) { return std::string(CONTACTKIT_MANIFOLD_DIR) + "/" + name; }

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST(Fnv1a, KnownVectors) {
    EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
    EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
    EXPECT_EQ(fnv1a_hex("foobar"), "85944171f73967e8");
}

TEST(Toml, ScalarsArraysAndComments) {
    const TomlDocument doc = parse_toml(R"(# header
top = 1
[s]
a = "x # not a comment"   # comment
b = -2.5e-1
c = [1, "two",
     [true, false],   # nested
    ]
d = -inf
"quoted key" = "q\"uote"
)");
    EXPECT_EQ(std::get<double>(doc.at("").at("top").v), 1.0);
    const auto& s = doc.at("s");
    EXPECT_EQ(std::get<std::string>(s.at("a").v), "x # not a comment");
    EXPECT_EQ(std::get<double>(s.at("b").v), -0.25);
    const auto& c = std::get<std::vector<TomlValue>>(s.at("c").v);
    ASSERT_EQ(c.size(), 3u);
    EXPECT_EQ(std::get<std::string>(c[1].v), "two");
    EXPECT_FALSE(std::get<bool>(std::get<std::vector<TomlValue>>(c[2].v)[1].v));
    EXPECT_EQ(std::get<double>(s.at("d").v), -INFINITY);
    EXPECT_EQ(std::get<std::string>(s.at("quoted key").v), "q\"uote");
}

TEST(Toml, Errors) {
    EXPECT_THROW(parse_toml("a = \"open\n"), ManifoldFileError);
    EXPECT_THROW(parse_toml("a = 1\na = 2\n"), ManifoldFileError);
    EXPECT_THROW(parse_toml("[s]\n[s]\n"), ManifoldFileError);
    EXPECT_THROW(parse_toml("a = 1 2\n"), ManifoldFileError);
    EXPECT_THROW(parse_toml("a = [1 2]\n"), ManifoldFileError);
    EXPECT_THROW(parse_toml("a = 1.2.3\n"), ManifoldFileError);
    try {
        parse_toml("a = 1\n\nb = oops\n");
        FAIL();
    } catch (const ManifoldFileError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
}

TEST(ManifoldFile, HopfFile) {
    const ManifoldFile m = parse_manifold(slurp(manifold("hopf.toml")));
    EXPECT_EQ(m.chart->coords(), (std::vector<std::string>{"xi1", "xi2", "phi"}));
    EXPECT_TRUE(m.chart->periodic(0));
    EXPECT_DOUBLE_EQ(m.chart->interval(2).hi, std::acos(-1.0) / 2);
    ASSERT_TRUE(m.period);
    EXPECT_DOUBLE_EQ(*m.period, 2 * std::acos(-1.0));
    ASSERT_TRUE(m.projection && m.section);
    EXPECT_EQ(m.projection->target()->name(), "s2");
    const Point x{0.3, 1.1, 0.7};
    const Eigen::VectorXd a = m.eta.at(x).as_vector();
    EXPECT_DOUBLE_EQ(a(0), std::cos(0.7) * std::cos(0.7));
    EXPECT_DOUBLE_EQ(a(2), 0.0);
}

TEST(ManifoldFile, StructuralErrors) {
    const std::string chart = "[chart]\ncoords = [\"z\", \"p\", \"q\"]\n";
    EXPECT_THROW(parse_manifold("[form]\nz = \"1\"\n"), ManifoldFileError);
    EXPECT_THROW(parse_manifold(chart), ManifoldFileError);
    EXPECT_THROW(parse_manifold(chart + "[form]\nw = \"1\"\n"), ManifoldFileError);
    EXPECT_THROW(parse_manifold(chart + "[form]\nz = \"1 +\"\n"), ParseError);
    EXPECT_THROW(parse_manifold(chart + "[form]\nz = \"w\"\n"), ParseError);
    EXPECT_THROW(parse_manifold(chart + "[form]\nz = 1\n[extra]\n"), ManifoldFileError);
    EXPECT_THROW(parse_manifold(chart + "[form]\nz = 1\n[period]\nvalue = -1\n"), ManifoldFileError);
    EXPECT_THROW(parse_manifold(chart + "[form]\nz = 1\n[section]\ncomponents = [0, 0, 0]\n"), ManifoldFileError);
    EXPECT_THROW(parse_manifold("[chart]\ncoords = [\"z\", \"z\"]\n[form]\nz = 1\n"), ManifoldFileError);
    EXPECT_THROW(parse_manifold(chart + "colour = 1\n[form]\nz = 1\n"), ManifoldFileError);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run_cli({"verify", "darboux(1)", "--samples", "40"}).code, kExitPass);
    EXPECT_EQ(run_cli({"verify", manifold("dz.toml")}).code, kExitCheckFailure);
    EXPECT_EQ(run_cli({"verify", "not_an_example"}).code, kExitInputError);
    EXPECT_EQ(run_cli({"verify"}).code, kExitInputError);
    EXPECT_EQ(run_cli({"frobnicate"}).code, kExitInputError);
    EXPECT_EQ(run_cli({"verify", "darboux(1)", "--grid", "x"}).code, kExitInputError);
    EXPECT_EQ(run_cli({"product", "darboux(1)", "darboux(1)", "--component", "up"}).code, kExitInputError);
    EXPECT_EQ(run_cli({"product", "darboux(1)", manifold("dz.toml")}).code, kExitInputError);
    EXPECT_EQ(run_cli({"period", "pi", "2"}).code, kExitInputError);
    EXPECT_EQ(run_cli({"prequant", "darboux-data", "H=r"}).code, kExitInputError);
    EXPECT_EQ(run_cli({"--help"}).code, kExitPass);
}

TEST(Cli, PeriodLine) {
    const Result r = run_cli({"period", "6", "4"});
    EXPECT_EQ(r.code, kExitPass);
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "rho = 2, k = 2, l = 3");
}

TEST(Cli, ToleranceOverrideOnlyTouchesResidualChecks) {
    const Result strict = run_cli({"verify", "darboux(1)", "--samples", "40", "--tol", "1e-30"});
    EXPECT_EQ(strict.code, kExitCheckFailure);
    EXPECT_NE(strict.out.find("PASS  contact_condition"), std::string::npos);
}

TEST(Cli, ProductAndPrequantPass) {
    const Result p = run_cli({"product", "darboux(1)", "darboux(1)", "--samples", "60"});
    EXPECT_EQ(p.code, kExitPass) << p.out;
    EXPECT_NE(p.out.find("PASS  legendrian[translation]"), std::string::npos);
    EXPECT_NE(p.out.find("PASS  non_legendrian[momentum_doubling]"), std::string::npos);
    const Result q = run_cli({"prequant", "darboux-data", "H=q"});
    EXPECT_EQ(q.code, kExitPass) << q.out;
    EXPECT_NE(q.out.find("dirac[q,p]"), std::string::npos);
}

TEST(Cli, JsonReportIsSortedAndDeterministic) {
    const auto dir = std::filesystem::temp_directory_path();
    const std::string a = (dir / "contactkit_cli_a.json").string(), b = (dir / "contactkit_cli_b.json").string();
    const std::vector<std::string> base{"verify", "hopf_s3", "--samples", "40", "--seed", "7", "--json"};
    auto args_a = base, args_b = base;
    args_a.push_back(a);
    args_b.push_back(b);
    const Result ra = run_cli(args_a), rb = run_cli(args_b);
    EXPECT_EQ(ra.code, kExitPass) << ra.out;
    EXPECT_EQ(ra.out, rb.out);
    const std::string ja = slurp(a), jb = slurp(b);
    EXPECT_FALSE(ja.empty());
    EXPECT_EQ(ja, jb);

    std::vector<std::string> names;
    std::istringstream lines(ja);
    for (std::string line; std::getline(lines, line);) {
        ASSERT_EQ(line.rfind("{\"check\":\"", 0), 0u) << line;
        names.push_back(line.substr(10, line.find('"', 10) - 10));
    }
    EXPECT_TRUE(std::is_sorted(names.begin(), names.end()));
    std::filesystem::remove(a);
    std::filesystem::remove(b);
}
