#pragma once

// Coordinate charts, differential forms with symbolic coefficients, vector
// fields, smooth maps and the exterior-calculus operations on them.

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "contactkit/expr.hpp"
#include "contactkit/parallel.hpp"

namespace contactkit {

using Point = std::vector<double>;

class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    bool bounded() const;
    double length() const { return hi - lo; }
};

/// A region removed from a chart's domain (used for punctured examples).
/// Distance is measured in the chart's wrapped l-infinity metric.
struct ExcludedBall {
    Point center;
    double radius = 0.0;
};

/// Half-width of the sampling window used for unbounded coordinate directions.
inline constexpr double kUnboundedSampleHalfWidth = 2.0;

/// Default distance kept from the domain boundary when sampling.
inline constexpr double kDefaultMargin = 1e-3;

class Chart {
public:
    Chart(std::string name, std::vector<std::string> coords, std::vector<Interval> domain = {},
          std::vector<bool> periodic = {}, double margin = kDefaultMargin);

    const std::string& name() const { return name_; }
    const std::vector<std::string>& coords() const { return coords_; }
    std::size_t dim() const { return coords_.size(); }
    const Interval& interval(std::size_t i) const { return domain_[i]; }
    bool periodic(std::size_t i) const { return periodic_[i]; }
    double margin() const { return margin_; }
    const std::vector<ExcludedBall>& excluded() const { return excluded_; }

    std::optional<std::size_t> index_of(std::string_view coord) const;
    std::size_t require_index(std::string_view coord) const;

    Chart with_excluded(ExcludedBall ball) const;
    /// This chart with further coordinates appended (same margin).
    Chart extended(std::string name, const std::vector<std::string>& coords,
                   const std::vector<Interval>& domain, const std::vector<bool>& periodic) const;

    /// Open-domain membership: non-periodic coordinates strictly inside their
    /// interval and the point outside every excluded ball.
    bool contains(std::span<const double> x) const;

    /// Maps periodic coordinates into [lo, hi).
    void wrap(std::span<double> x) const;

    /// l-infinity distance with wrap-around on periodic coordinates.
    double distance(std::span<const double> a, std::span<const double> b) const;

    /// Sample point `index` of the stream `seed`: uniform in the domain shrunk
    /// by the margin (unbounded directions use a window of half-width
    /// kUnboundedSampleHalfWidth), avoiding excluded balls.
    Point sample(std::uint64_t seed, std::uint64_t index) const;
    std::vector<Point> samples(std::uint64_t seed, std::size_t count) const;

    bool same_as(const Chart& other) const;

private:
    std::string name_;
    std::vector<std::string> coords_;
    std::vector<Interval> domain_;
    std::vector<bool> periodic_;
    double margin_;
    std::vector<ExcludedBall> excluded_;
};

using ChartPtr = std::shared_ptr<const Chart>;

ChartPtr make_chart(std::string name, std::vector<std::string> coords,
                    std::vector<Interval> domain = {}, std::vector<bool> periodic = {},
                    double margin = kDefaultMargin);

/// Strictly increasing list of coordinate indices.
using MultiIndex = std::vector<int>;

/// Sorts `idx` in place and returns the sign of the permutation, or 0 when an
/// index repeats.
int sort_with_sign(MultiIndex& idx);

/// All strictly increasing k-subsets of {0..d-1}, lexicographic.
std::vector<MultiIndex> multi_indices(int dim, int degree);

/// A numeric alternating k-form at one point.
class FormValue {
public:
    FormValue(int dim, int degree) : dim_(dim), degree_(degree) {}

    int dim() const { return dim_; }
    int degree() const { return degree_; }
    const std::map<MultiIndex, double>& coefficients() const { return coeffs_; }
    double coefficient(const MultiIndex& idx) const;
    void set(const MultiIndex& idx, double value);
    void add(MultiIndex idx, double value);  // idx need not be sorted

    /// Value on k vectors: sum over I of c_I det[V_a^{I_b}].
    double operator()(std::span<const Point> vectors) const;
    FormValue interior(std::span<const double> v) const;

    double max_abs() const;
    /// Components of a 1-form as a dense vector.
    Eigen::VectorXd as_vector() const;
    /// Antisymmetric matrix M_ij = w(e_i, e_j) of a 2-form.
    Eigen::MatrixXd as_matrix() const;
    /// Top-degree coefficient (0 when absent).
    double top() const;

    friend FormValue operator-(const FormValue& a, const FormValue& b);
    friend FormValue operator+(const FormValue& a, const FormValue& b);
    friend FormValue operator*(double s, const FormValue& a);

private:
    int dim_;
    int degree_;
    std::map<MultiIndex, double> coeffs_;
};

class DifferentialForm {
public:
    DifferentialForm(ChartPtr chart, int degree, std::map<MultiIndex, Expr> coeffs = {});

    static DifferentialForm zero(ChartPtr chart, int degree) { return {std::move(chart), degree}; }
    static DifferentialForm function(ChartPtr chart, Expr f);
    /// sum_i components[i] dx^i
    static DifferentialForm one_form(ChartPtr chart, std::vector<Expr> components);
    /// The basis form dx^{i1} ^ ... ^ dx^{ik} (indices need not be sorted).
    static DifferentialForm basis(ChartPtr chart, MultiIndex idx);
    /// Parses "coord = expression" style coefficient strings of a 1-form.
    static DifferentialForm parse_one_form(ChartPtr chart,
                                           const std::map<std::string, std::string>& coefficients);

    const ChartPtr& chart() const { return chart_; }
    int degree() const { return degree_; }
    const std::map<MultiIndex, Expr>& coefficients() const { return coeffs_; }
    Expr coefficient(const MultiIndex& idx) const;
    /// The single coefficient of a 0-form.
    Expr scalar() const;

    FormValue at(std::span<const double> x) const;
    double value_at(std::span<const double> x) const { return at(x).top(); }

    DifferentialForm operator+(const DifferentialForm& other) const;
    DifferentialForm operator-(const DifferentialForm& other) const;
    DifferentialForm operator-() const;
    /// Multiplication by a function.
    DifferentialForm scaled(const Expr& f) const;
    /// Coordinate renaming / substitution applied to every coefficient,
    /// re-homed onto `target` (which must have the same dimension).
    DifferentialForm rehomed(ChartPtr target, const std::map<std::string, Expr>& subst) const;

    std::string to_string() const;

private:
    ChartPtr chart_;
    int degree_;
    std::map<MultiIndex, Expr> coeffs_;
};

/// A form known only pointwise (e.g. obtained by contracting with a numeric
/// vector field). Carries the symbolic form when one is available.
class PointwiseForm {
public:
    using Evaluator = std::function<FormValue(std::span<const double>)>;

    PointwiseForm(ChartPtr chart, int degree, Evaluator eval);
    PointwiseForm(const DifferentialForm& form);  // NOLINT: symbolic forms are pointwise forms

    const ChartPtr& chart() const { return chart_; }
    int degree() const { return degree_; }
    FormValue at(std::span<const double> x) const { return eval_(x); }
    const std::optional<DifferentialForm>& symbolic() const { return symbolic_; }

private:
    ChartPtr chart_;
    int degree_;
    Evaluator eval_;
    std::optional<DifferentialForm> symbolic_;
};

class VectorField {
public:
    using Resolver = std::function<Point(std::span<const double>)>;

    static VectorField symbolic(ChartPtr chart, std::vector<Expr> components);
    static VectorField pointwise(ChartPtr chart, Resolver resolver);
    /// The coordinate field d/dx^i.
    static VectorField coordinate(ChartPtr chart, std::string_view coord);

    const ChartPtr& chart() const { return chart_; }
    bool is_symbolic() const { return components_.has_value(); }
    const std::vector<Expr>& components() const;
    Point at(std::span<const double> x) const;

    /// X(f) as an expression (symbolic fields only).
    Expr apply(const Expr& f) const;
    /// X(f) at a point, for any field.
    double apply_at(const Expr& f, std::span<const double> x) const;

    VectorField operator-(const VectorField& other) const;
    VectorField scaled(double s) const;

private:
    VectorField(ChartPtr chart, std::optional<std::vector<Expr>> comps, Resolver r);
    ChartPtr chart_;
    std::optional<std::vector<Expr>> components_;
    Resolver resolver_;
};

class SmoothMap {
public:
    SmoothMap(ChartPtr source, ChartPtr target, std::vector<Expr> components);
    static SmoothMap identity(const ChartPtr& chart);
    /// Components given as expression strings over the source coordinates.
    static SmoothMap parse(ChartPtr source, ChartPtr target, const std::vector<std::string>& text);

    const ChartPtr& source() const { return source_; }
    const ChartPtr& target() const { return target_; }
    const std::vector<Expr>& components() const { return components_; }
    /// d(component i) / d(source coordinate j)
    const Expr& partial(std::size_t i, std::size_t j) const { return jacobian_[i][j]; }

    Point at(std::span<const double> x) const;
    Eigen::MatrixXd jacobian_at(std::span<const double> x) const;
    /// Pushforward of a tangent vector at x.
    Point push(std::span<const double> x, std::span<const double> v) const;

    /// The composite `next` after this map.
    SmoothMap then(const SmoothMap& next) const;

private:
    ChartPtr source_;
    ChartPtr target_;
    std::vector<Expr> components_;
    std::vector<std::vector<Expr>> jacobian_;
};

enum class EdgeKind {
    Open,       // genuine boundary
    Periodic,   // the parameter is an angle; opposite edges are identified
    Collapsed,  // both ends of the parameter range are mapped to single points
};

struct ParametrizedSurface {
    std::array<Interval, 2> rect;
    SmoothMap map;  // from a 2-dimensional parameter chart
    std::array<EdgeKind, 2> edges{EdgeKind::Open, EdgeKind::Open};

    bool closed() const;
};

// Exterior calculus.
DifferentialForm exterior_derivative(const DifferentialForm& form);
DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b);
/// Symbolic contraction; requires a symbolic field.
DifferentialForm interior_product(const VectorField& x, const DifferentialForm& form);
/// Contraction with any field; symbolic result attached when available.
PointwiseForm interior_product_pointwise(const VectorField& x, const DifferentialForm& form);
/// Symbolic Lie derivative via Cartan's formula; requires a symbolic field.
DifferentialForm lie_derivative_symbolic(const VectorField& x, const DifferentialForm& form);
/// Lie derivative by Cartan's formula where the outer d of i_X w is taken by
/// central differences with step `h`. Accuracy O(h^2).
PointwiseForm lie_derivative_fd(const VectorField& x, const DifferentialForm& form,
                                double h = 1e-5);
/// Symbolic when X is symbolic, finite-difference otherwise.
PointwiseForm lie_derivative(const VectorField& x, const DifferentialForm& form);
/// Central-difference exterior derivative of a pointwise form.
PointwiseForm exterior_derivative_fd(const PointwiseForm& form, double h = 1e-5);
DifferentialForm pullback(const SmoothMap& map, const DifferentialForm& form);
VectorField bracket(const VectorField& x, const VectorField& y);

inline constexpr std::array<int, 2> kDefaultGrid{64, 64};

/// Integral of a 2-form over a parametrized surface with tensor-product
/// Gauss-Legendre quadrature. Deterministic for a fixed grid.
double surface_integral(const DifferentialForm& form, const ParametrizedSurface& surface,
                        std::array<int, 2> grid = kDefaultGrid,
                        Execution ex = default_execution());

/// Maximum over `points` of |a - b| (largest coefficient difference).
double max_residual(const PointwiseForm& a, const PointwiseForm& b, std::span<const Point> points,
                    Execution ex = default_execution());
/// Maximum over `points` of the largest coefficient of `a`.
double max_abs(const PointwiseForm& a, std::span<const Point> points,
               Execution ex = default_execution());

/// Basis of ker(alpha) at a point, for a nonzero covector alpha.
std::vector<Point> covector_kernel(const Eigen::VectorXd& alpha);

/// Numerical rank with singular-value threshold `tol` (relative to 1).
int numeric_rank(const Eigen::MatrixXd& m, double tol = 1e-8);

}  // namespace contactkit
