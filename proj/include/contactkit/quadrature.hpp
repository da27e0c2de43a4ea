#pragma once

#include <cstddef>
#include <vector>

#include "contactkit/calculus.hpp"
#include "contactkit/parallel.hpp"

namespace contactkit {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
QuadratureRule gauss_legendre(int n);
/// The same rule mapped affinely onto [a, b].
QuadratureRule gauss_legendre(int n, double a, double b);

/// Tensor-product Gauss-Legendre integral of f over the box
/// [lower, upper] with points[i] nodes along axis i. Integrand values are
/// computed in parallel and summed serially in node order, so the result does
/// not depend on the execution policy. T is double or std::complex<double>.
template <class T, class F>
T integrate_box(std::span<const Interval> box, std::span<const int> points, F&& f,
                Execution ex = default_execution()) {
    const std::size_t dim = box.size();
    std::vector<QuadratureRule> rules;
    std::size_t total = 1;
    for (std::size_t i = 0; i < dim; ++i) {
        rules.push_back(gauss_legendre(points[i], box[i].lo, box[i].hi));
        total *= static_cast<std::size_t>(points[i]);
    }
    std::vector<T> values(total);
    for_each_index(
        total,
        [&](std::size_t flat) {
            Point x(dim);
            double w = 1.0;
            std::size_t rest = flat;
            for (std::size_t i = dim; i-- > 0;) {
                const std::size_t n = rules[i].nodes.size();
                const std::size_t k = rest % n;
                rest /= n;
                x[i] = rules[i].nodes[k];
                w *= rules[i].weights[k];
            }
            values[flat] = w * f(std::span<const double>(x));
        },
        ex);
    T sum{};
    for (const T& v : values) sum += v;
    return sum;
}

}  // namespace contactkit
