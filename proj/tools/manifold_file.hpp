#pragma once

// Manifold description files: a TOML subset with sections [chart], [form]
// and optional [projection], [section], [period].
//
//   [chart]
//   name = "heisenberg"
//   coords = ["z", "p", "q"]
//   domain = [[-inf, inf], [-inf, inf], [0, "2*pi"]]   # optional
//   periodic = [false, false, true]                    # optional
//   margin = 1e-3                                      # optional
//
//   [form]                 # eta = sum coefficient d(coord); omitted = 0
//   z = "1"
//   q = "-p"
//
//   [projection]           # base chart and p in terms of the total coords
//   coords = ["p", "q"]
//   components = ["p", "q"]
//
//   [section]              # sigma in terms of the base coords
//   components = ["0", "p", "q"]
//
//   [period]
//   value = "inf"          # or a number / constant expression such as "2*pi"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "contactkit/calculus.hpp"

namespace contactkit::cli {

class ManifoldFileError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TomlValue {
    std::variant<std::string, double, bool, std::vector<TomlValue>> v;
};

using TomlTable = std::map<std::string, TomlValue>;
using TomlDocument = std::map<std::string, TomlTable>;

/// Strings, floats (including inf / nan), booleans and nested arrays;
/// comments and multi-line arrays. Keys outside a section go under "".
TomlDocument parse_toml(std::string_view text);

struct ManifoldFile {
    ChartPtr chart;
    DifferentialForm eta;
    std::optional<SmoothMap> projection;
    std::optional<SmoothMap> section;
    std::optional<double> period;  // infinity for "inf"
};

/// Throws ManifoldFileError on structural problems and ParseError on bad
/// expressions. Does not test the contact condition.
ManifoldFile parse_manifold(std::string_view text);

}  // namespace contactkit::cli
