#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace contactkit {

/// One verified property: a measured quantity compared against a bound.
struct Check {
    enum class Kind { Below, Above };

    std::string name;
    double value = 0.0;
    double bound = 0.0;
    Kind kind = Kind::Below;
    bool pass = false;
    std::size_t samples = 0;
    std::string detail;
};

/// value < bound passes; NaN never passes.
inline Check below(std::string name, double value, double bound, std::size_t samples = 0,
                   std::string detail = {}) {
    return {std::move(name), value, bound, Check::Kind::Below, value < bound, samples, std::move(detail)};
}

/// value > bound passes; NaN never passes.
inline Check above(std::string name, double value, double bound, std::size_t samples = 0,
                   std::string detail = {}) {
    return {std::move(name), value, bound, Check::Kind::Above, value > bound, samples, std::move(detail)};
}

inline bool all_pass(const std::vector<Check>& checks) {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

}  // namespace contactkit
