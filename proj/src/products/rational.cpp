#include "contactkit/rational.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <compare>
#include <limits>

namespace contactkit {

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("rational overflow in multiplication");
    return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw OverflowError("rational overflow in addition");
    return r;
}

std::int64_t parse_int(std::string_view s, std::string_view whole) {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc::result_out_of_range) throw OverflowError("integer out of range in '" + std::string(whole) + "'");
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw std::invalid_argument("not an exact rational: '" + std::string(whole) + "'");
    return v;
}

}  // namespace

std::int64_t gcd64(std::int64_t a, std::int64_t b) {
    if (a == std::numeric_limits<std::int64_t>::min() || b == std::numeric_limits<std::int64_t>::min())
        throw OverflowError("gcd of INT64_MIN");
    a = a < 0 ? -a : a;
    b = b < 0 ? -b : b;
    while (b != 0) {
        const std::int64_t t = a % b;
        a = b;
        b = t;
    }
    return a;
}

Rational::Rational(std::int64_t n, std::int64_t d) {
    if (d == 0) throw std::domain_error("rational with zero denominator");
    if (n == std::numeric_limits<std::int64_t>::min() || d == std::numeric_limits<std::int64_t>::min())
        throw OverflowError("rational component out of range");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    const std::int64_t g = gcd64(n, d);
    num_ = g ? n / g : 0;
    den_ = g ? d / g : 1;
}

Rational Rational::parse(std::string_view text) {
    std::string_view s = text;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    if (s.empty()) throw std::invalid_argument("empty rational");
    if (const auto slash = s.find('/'); slash != std::string_view::npos)
        return Rational(parse_int(s.substr(0, slash), text), parse_int(s.substr(slash + 1), text));

    // decimal: [sign] digits [. digits] [e [sign] digits]
    std::int64_t exponent = 0;
    if (const auto e = s.find_first_of("eE"); e != std::string_view::npos) {
        exponent = parse_int(s.substr(e + 1).front() == '+' ? s.substr(e + 2) : s.substr(e + 1), text);
        s = s.substr(0, e);
    }
    std::string digits;
    bool negative = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    const auto dot = s.find('.');
    std::string_view int_part = s.substr(0, dot);
    std::string_view frac_part = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
    if (int_part.empty() && frac_part.empty()) throw std::invalid_argument("not an exact rational: '" + std::string(text) + "'");
    for (char c : int_part) {
        if (!std::isdigit(static_cast<unsigned char>(c))) throw std::invalid_argument("not an exact rational: '" + std::string(text) + "'");
        digits += c;
    }
    for (char c : frac_part) {
        if (!std::isdigit(static_cast<unsigned char>(c))) throw std::invalid_argument("not an exact rational: '" + std::string(text) + "'");
        digits += c;
    }
    exponent -= static_cast<std::int64_t>(frac_part.size());
    const std::int64_t mantissa = parse_int(digits, text);
    if (exponent > 18 || exponent < -18) throw OverflowError("exponent out of range in '" + std::string(text) + "'");
    std::int64_t scale = 1;
    for (std::int64_t i = 0; i < (exponent < 0 ? -exponent : exponent); ++i) scale = checked_mul(scale, 10);
    Rational r = exponent >= 0 ? Rational(checked_mul(mantissa, scale)) : Rational(mantissa, scale);
    return negative ? -r : r;
}

std::string Rational::to_string() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

Rational operator+(const Rational& a, const Rational& b) {
    const std::int64_t g = gcd64(a.den_, b.den_);
    const std::int64_t da = a.den_ / g, db = b.den_ / g;
    return Rational(checked_add(checked_mul(a.num_, db), checked_mul(b.num_, da)), checked_mul(a.den_, db));
}

Rational operator-(const Rational& a) { return Rational(-a.num_, a.den_); }

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
    // cross-cancel first to keep intermediates small
    const std::int64_t g1 = gcd64(a.num_, b.den_), g2 = gcd64(b.num_, a.den_);
    const std::int64_t n1 = g1 ? a.num_ / g1 : 0, d2 = g1 ? b.den_ / g1 : b.den_;
    const std::int64_t n2 = g2 ? b.num_ / g2 : 0, d1 = g2 ? a.den_ / g2 : a.den_;
    return Rational(checked_mul(n1, n2), checked_mul(d1, d2));
}

Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("rational division by zero");
    return a * Rational(b.den_, b.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const __int128 l = static_cast<__int128>(a.num_) * b.den_;
    const __int128 r = static_cast<__int128>(b.num_) * a.den_;
    return l < r ? std::strong_ordering::less : (l > r ? std::strong_ordering::greater : std::strong_ordering::equal);
}

Period Period::finite(Rational r) {
    if (!r.positive()) throw std::invalid_argument("period must be positive, got " + r.to_string());
    Period p;
    p.value_ = r;
    return p;
}

Period Period::parse(std::string_view text) {
    if (text == "inf" || text == "infinity") return infinite();
    return finite(Rational::parse(text));
}

const Rational& Period::value() const {
    if (!value_) throw std::logic_error("infinite period has no rational value");
    return *value_;
}

double Period::to_double() const { return value_ ? value_->to_double() : INFINITY; }

std::string Period::to_string() const { return value_ ? value_->to_string() : "inf"; }

}  // namespace contactkit
