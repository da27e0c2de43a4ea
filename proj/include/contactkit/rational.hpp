#pragma once

// Exact rationals over int64 with overflow detection, and periods that are
// either such a rational or infinite.

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace contactkit {

class OverflowError : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

class Rational {
public:
    Rational() = default;
    Rational(std::int64_t n) : num_(n) {}  // NOLINT: integers are rationals
    /// Normalized n/d; throws std::domain_error when d == 0.
    Rational(std::int64_t n, std::int64_t d);

    /// Integer, "p/q" or a finite decimal such as "2.5" or "-1e-3". Anything
    /// else (including "pi") throws std::invalid_argument.
    static Rational parse(std::string_view text);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    std::string to_string() const;
    bool positive() const { return num_ > 0; }

    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a);
    friend bool operator==(const Rational& a, const Rational& b) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

/// gcd of |a| and |b| (gcd(0, 0) = 0).
std::int64_t gcd64(std::int64_t a, std::int64_t b);

/// A positive rational period or infinity.
class Period {
public:
    static Period infinite() { return Period(); }
    static Period finite(Rational r);
    /// "inf" or anything Rational::parse accepts.
    static Period parse(std::string_view text);

    bool is_finite() const { return value_.has_value(); }
    const Rational& value() const;
    double to_double() const;
    std::string to_string() const;
    friend bool operator==(const Period& a, const Period& b) = default;

private:
    Period() = default;
    std::optional<Rational> value_;
};

}  // namespace contactkit
