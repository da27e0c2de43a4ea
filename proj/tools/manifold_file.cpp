#include "manifold_file.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <set>

namespace contactkit::cli {

namespace {

class TomlParser {
public:
    explicit TomlParser(std::string_view text) : s_(text) {}

    TomlDocument run() {
        TomlDocument doc;
        std::set<std::string> seen;
        std::string section;
        doc[section];
        while (true) {
            skip_blank_lines();
            if (eof()) break;
            if (peek() == '[') {
                ++pos_;
                skip_inline_space();
                section = key();
                skip_inline_space();
                expect(']');
                if (!seen.insert(section).second) fail("duplicate section [" + section + "]");
                doc[section];
            } else {
                const std::string k = key();
                skip_inline_space();
                expect('=');
                skip_inline_space();
                TomlValue v = value();
                if (!doc[section].emplace(k, std::move(v)).second) fail("duplicate key '" + k + "'");
            }
            end_of_line();
        }
        return doc;
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;

    bool eof() const { return pos_ >= s_.size(); }
    char peek() const { return eof() ? '\0' : s_[pos_]; }

    [[noreturn]] void fail(const std::string& what) const {
        std::size_t line = 1;
        for (std::size_t i = 0; i < pos_ && i < s_.size(); ++i) line += s_[i] == '\n';
        throw ManifoldFileError("line " + std::to_string(line) + ": " + what);
    }

    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    void skip_inline_space() {
        while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) ++pos_;
    }

    void skip_comment() {
        if (peek() == '#')
            while (!eof() && peek() != '\n') ++pos_;
    }

    void skip_blank_lines() {
        while (!eof()) {
            skip_inline_space();
            skip_comment();
            if (peek() != '\n') return;
            ++pos_;
        }
    }

    // Whitespace, comments and newlines inside arrays.
    void skip_any_space() {
        while (!eof()) {
            skip_inline_space();
            skip_comment();
            if (peek() != '\n') return;
            ++pos_;
        }
    }

    void end_of_line() {
        skip_inline_space();
        skip_comment();
        if (eof()) return;
        if (peek() != '\n') fail("unexpected trailing characters");
        ++pos_;
    }

    std::string key() {
        if (peek() == '"') return string();
        const std::size_t start = pos_;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) ++pos_;
        if (pos_ == start) fail("expected a key");
        return std::string(s_.substr(start, pos_ - start));
    }

    std::string string() {
        expect('"');
        std::string out;
        while (true) {
            if (eof() || peek() == '\n') fail("unterminated string");
            const char c = s_[pos_++];
            if (c == '"') return out;
            if (c != '\\') {
                out += c;
                continue;
            }
            if (eof()) fail("unterminated string");
            const char e = s_[pos_++];
            switch (e) {
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                default: fail(std::string("unsupported escape \\") + e);
            }
        }
    }

    TomlValue value() {
        const char c = peek();
        if (c == '"') return {string()};
        if (c == '[') {
            ++pos_;
            std::vector<TomlValue> items;
            skip_any_space();
            while (peek() != ']') {
                items.push_back(value());
                skip_any_space();
                if (peek() == ',') {
                    ++pos_;
                    skip_any_space();
                } else if (peek() != ']') {
                    fail("expected ',' or ']' in array");
                }
            }
            ++pos_;
            return {std::move(items)};
        }
        const std::size_t start = pos_;
        while (!eof() && !std::isspace(static_cast<unsigned char>(peek())) && peek() != ',' && peek() != ']' &&
               peek() != '#')
            ++pos_;
        std::string tok(s_.substr(start, pos_ - start));
        if (tok == "true") return {true};
        if (tok == "false") return {false};
        if (tok == "inf" || tok == "+inf") return {INFINITY};
        if (tok == "-inf") return {-INFINITY};
        if (tok.empty()) fail("expected a value");
        std::erase(tok, '_');
        char* end = nullptr;
        const double d = std::strtod(tok.c_str(), &end);
        if (end != tok.c_str() + tok.size()) fail("malformed value '" + tok + "'");
        return {d};
    }
};

const std::vector<TomlValue>& as_array(const TomlValue& v, const std::string& what) {
    if (const auto* a = std::get_if<std::vector<TomlValue>>(&v.v)) return *a;
    throw ManifoldFileError(what + " must be an array");
}

std::string as_string(const TomlValue& v, const std::string& what) {
    if (const auto* s = std::get_if<std::string>(&v.v)) return *s;
    throw ManifoldFileError(what + " must be a string");
}

// Numbers, inf, or a constant expression string such as "2*pi".
double as_number(const TomlValue& v, const std::string& what) {
    if (const auto* d = std::get_if<double>(&v.v)) return *d;
    if (const auto* s = std::get_if<std::string>(&v.v)) {
        if (*s == "inf" || *s == "+inf") return INFINITY;
        if (*s == "-inf") return -INFINITY;
        return eval(parse(*s, {}), std::map<std::string, double>{});
    }
    throw ManifoldFileError(what + " must be a number or constant expression");
}

// Expression text: strings are parsed, bare numbers are constants.
Expr as_expr(const TomlValue& v, const std::vector<std::string>& vars, const std::string& what) {
    if (const auto* d = std::get_if<double>(&v.v)) return Expr(*d);
    return parse(as_string(v, what), vars);
}

std::vector<std::string> string_list(const TomlValue& v, const std::string& what) {
    std::vector<std::string> out;
    for (const auto& x : as_array(v, what)) out.push_back(as_string(x, what + " entry"));
    return out;
}

std::vector<Expr> expr_list(const TomlValue& v, const std::vector<std::string>& vars, const std::string& what) {
    std::vector<Expr> out;
    for (const auto& x : as_array(v, what)) out.push_back(as_expr(x, vars, what + " entry"));
    return out;
}

void allow_only(const TomlTable& t, const std::string& section, std::initializer_list<const char*> keys) {
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, _] : t)
        if (!ok.count(k)) throw ManifoldFileError("unknown key '" + k + "' in [" + section + "]");
}

const TomlValue* find(const TomlTable& t, const std::string& key) {
    const auto it = t.find(key);
    return it == t.end() ? nullptr : &it->second;
}

// Chart fields shared by [chart] and [projection].
ChartPtr read_chart(const TomlTable& t, const std::string& section, const std::string& default_name) {
    const TomlValue* c = find(t, "coords");
    if (!c) throw ManifoldFileError("[" + section + "] needs coords");
    const auto coords = string_list(*c, section + ".coords");
    std::vector<Interval> domain;
    if (const TomlValue* d = find(t, "domain")) {
        for (const auto& iv : as_array(*d, section + ".domain")) {
            const auto& pair = as_array(iv, section + ".domain entry");
            if (pair.size() != 2) throw ManifoldFileError(section + ".domain entries must be [lo, hi]");
            domain.push_back({as_number(pair[0], section + ".domain"), as_number(pair[1], section + ".domain")});
        }
    }
    std::vector<bool> periodic;
    if (const TomlValue* p = find(t, "periodic")) {
        for (const auto& b : as_array(*p, section + ".periodic")) {
            const auto* flag = std::get_if<bool>(&b.v);
            if (!flag) throw ManifoldFileError(section + ".periodic entries must be booleans");
            periodic.push_back(*flag);
        }
    }
    double margin = kDefaultMargin;
    if (const TomlValue* m = find(t, "margin")) margin = as_number(*m, section + ".margin");
    std::string name = default_name;
    if (const TomlValue* n = find(t, "name")) name = as_string(*n, section + ".name");
    try {
        return make_chart(name, coords, domain, periodic, margin);
    } catch (const GeometryError& e) {
        throw ManifoldFileError("[" + section + "]: " + e.what());
    }
}

}  // namespace

TomlDocument parse_toml(std::string_view text) { return TomlParser(text).run(); }

ManifoldFile parse_manifold(std::string_view text) {
    const TomlDocument doc = parse_toml(text);
    for (const auto& [name, table] : doc) {
        if (name.empty() && !table.empty()) throw ManifoldFileError("keys outside a section");
        if (!name.empty() && name != "chart" && name != "form" && name != "projection" && name != "section" &&
            name != "period")
            throw ManifoldFileError("unknown section [" + name + "]");
    }
    if (!doc.count("chart")) throw ManifoldFileError("missing [chart]");
    if (!doc.count("form")) throw ManifoldFileError("missing [form]");

    const TomlTable& chart_t = doc.at("chart");
    allow_only(chart_t, "chart", {"name", "coords", "domain", "periodic", "margin"});
    const ChartPtr chart = read_chart(chart_t, "chart", "manifold");
    const auto& coords = chart->coords();
    std::vector<Expr> comps(coords.size(), Expr(0.0));
    for (const auto& [k, v] : doc.at("form")) {
        const auto i = chart->index_of(k);
        if (!i) throw ManifoldFileError("[form] names unknown coordinate '" + k + "'");
        comps[*i] = as_expr(v, coords, "form." + k);
    }
    ManifoldFile out{chart, DifferentialForm::one_form(chart, comps), {}, {}, {}};

    if (doc.count("projection")) {
        const TomlTable& t = doc.at("projection");
        allow_only(t, "projection", {"name", "coords", "domain", "periodic", "margin", "components"});
        ChartPtr base = read_chart(t, "projection", "base");
        const TomlValue* c = find(t, "components");
        if (!c) throw ManifoldFileError("[projection] needs components");
        auto pc = expr_list(*c, coords, "projection.components");
        if (pc.size() != base->dim()) throw ManifoldFileError("[projection] needs one component per base coordinate");
        out.projection = SmoothMap(out.chart, base, std::move(pc));
    }
    if (doc.count("section")) {
        if (!out.projection) throw ManifoldFileError("[section] requires [projection]");
        const TomlTable& t = doc.at("section");
        allow_only(t, "section", {"components"});
        const TomlValue* c = find(t, "components");
        if (!c) throw ManifoldFileError("[section] needs components");
        auto sc = expr_list(*c, out.projection->target()->coords(), "section.components");
        if (sc.size() != coords.size()) throw ManifoldFileError("[section] needs one component per chart coordinate");
        out.section = SmoothMap(out.projection->target(), out.chart, std::move(sc));
    }
    if (out.projection && !out.section) throw ManifoldFileError("[projection] requires [section]");
    if (doc.count("period")) {
        const TomlTable& t = doc.at("period");
        allow_only(t, "period", {"value"});
        const TomlValue* v = find(t, "value");
        if (!v) throw ManifoldFileError("[period] needs value");
        const double rho = as_number(*v, "period.value");
        if (!(rho > 0)) throw ManifoldFileError("period must be positive");
        out.period = rho;
    }
    return out;
}

}  // namespace contactkit::cli
