#include <algorithm>
#include <cmath>
#include <set>

#include "contactkit/calculus.hpp"

namespace contactkit {

bool Interval::bounded() const { return std::isfinite(lo) && std::isfinite(hi); }

Chart::Chart(std::string name, std::vector<std::string> coords, std::vector<Interval> domain,
             std::vector<bool> periodic, double margin)
    : name_(std::move(name)),
      coords_(std::move(coords)),
      domain_(std::move(domain)),
      periodic_(std::move(periodic)),
      margin_(margin) {
    if (domain_.empty()) domain_.resize(coords_.size());
    if (periodic_.empty()) periodic_.resize(coords_.size(), false);
    if (domain_.size() != coords_.size() || periodic_.size() != coords_.size())
        throw GeometryError("chart " + name_ + ": domain/periodic size mismatch");
    std::set<std::string> seen;
    for (const auto& c : coords_)
        if (!seen.insert(c).second) throw GeometryError("chart " + name_ + ": duplicate coordinate " + c);
    for (std::size_t i = 0; i < coords_.size(); ++i) {
        if (!(domain_[i].lo < domain_[i].hi))
            throw GeometryError("chart " + name_ + ": empty interval for " + coords_[i]);
        if (periodic_[i] && !domain_[i].bounded())
            throw GeometryError("chart " + name_ + ": periodic coordinate needs a bounded interval");
    }
    if (margin_ < 0.0) throw GeometryError("negative sampling margin");
}

std::optional<std::size_t> Chart::index_of(std::string_view coord) const {
    for (std::size_t i = 0; i < coords_.size(); ++i)
        if (coords_[i] == coord) return i;
    return std::nullopt;
}

std::size_t Chart::require_index(std::string_view coord) const {
    auto i = index_of(coord);
    if (!i) throw GeometryError("chart " + name_ + " has no coordinate " + std::string(coord));
    return *i;
}

Chart Chart::with_excluded(ExcludedBall ball) const {
    if (ball.center.size() != dim()) throw GeometryError("excluded ball dimension mismatch");
    Chart c = *this;
    c.excluded_.push_back(std::move(ball));
    return c;
}

bool Chart::contains(std::span<const double> x) const {
    if (x.size() != dim()) return false;
    for (std::size_t i = 0; i < dim(); ++i) {
        if (!std::isfinite(x[i])) return false;
        if (!periodic_[i] && !(x[i] > domain_[i].lo && x[i] < domain_[i].hi)) return false;
    }
    for (const auto& ball : excluded_)
        if (distance(x, ball.center) < ball.radius) return false;
    return true;
}

void Chart::wrap(std::span<double> x) const {
    for (std::size_t i = 0; i < dim(); ++i) {
        if (!periodic_[i]) continue;
        const double len = domain_[i].length();
        double r = std::fmod(x[i] - domain_[i].lo, len);
        if (r < 0) r += len;
        x[i] = domain_[i].lo + r;
    }
}

double Chart::distance(std::span<const double> a, std::span<const double> b) const {
    double d = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) {
        double di = std::abs(a[i] - b[i]);
        if (periodic_[i]) {
            const double len = domain_[i].length();
            di = std::fmod(di, len);
            di = std::min(di, len - di);
        }
        d = std::max(d, di);
    }
    return d;
}

Point Chart::sample(std::uint64_t seed, std::uint64_t index) const {
    auto rng = stream_rng(seed, index);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Point x(dim());
        for (std::size_t i = 0; i < dim(); ++i) {
            const double w = 2.0 * kUnboundedSampleHalfWidth;
            double lo = domain_[i].lo;
            double hi = domain_[i].hi;
            if (!std::isfinite(lo) && !std::isfinite(hi)) {
                lo = -kUnboundedSampleHalfWidth;
                hi = kUnboundedSampleHalfWidth;
            } else if (!std::isfinite(lo)) {
                lo = hi - w;
            } else if (!std::isfinite(hi)) {
                hi = lo + w;
            }
            if (!periodic_[i]) {
                lo += margin_;
                hi -= margin_;
            }
            if (!(lo < hi)) throw GeometryError("chart " + name_ + ": margin exceeds domain");
            x[i] = lo + (hi - lo) * unit(rng);
        }
        bool excluded = false;
        for (const auto& ball : excluded_)
            if (distance(x, ball.center) < ball.radius + margin_) excluded = true;
        if (!excluded) return x;
    }
    throw GeometryError("chart " + name_ + ": could not draw a sample outside excluded regions");
}

std::vector<Point> Chart::samples(std::uint64_t seed, std::size_t count) const {
    std::vector<Point> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = sample(seed, i);
    return out;
}

Chart Chart::extended(std::string name, const std::vector<std::string>& coords,
                      const std::vector<Interval>& domain, const std::vector<bool>& periodic) const {
    if (!excluded_.empty()) throw GeometryError("chart " + name_ + ": cannot extend a chart with excluded regions");
    auto c = coords_;
    auto d = domain_;
    auto p = periodic_;
    c.insert(c.end(), coords.begin(), coords.end());
    d.insert(d.end(), domain.begin(), domain.end());
    p.insert(p.end(), periodic.begin(), periodic.end());
    return Chart(std::move(name), std::move(c), std::move(d), std::move(p), margin_);
}

bool Chart::same_as(const Chart& other) const {
    return this == &other || (name_ == other.name_ && coords_ == other.coords_);
}

ChartPtr make_chart(std::string name, std::vector<std::string> coords, std::vector<Interval> domain,
                    std::vector<bool> periodic, double margin) {
    return std::make_shared<const Chart>(std::move(name), std::move(coords), std::move(domain),
                                         std::move(periodic), margin);
}

}  // namespace contactkit
