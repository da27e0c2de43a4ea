#include <algorithm>
#include <cmath>
#include <sstream>

#include "contactkit/calculus.hpp"

namespace contactkit {

int sort_with_sign(MultiIndex& idx) {
    int sign = 1;
    // insertion sort, counting transpositions
    for (std::size_t i = 1; i < idx.size(); ++i) {
        for (std::size_t j = i; j > 0 && idx[j - 1] >= idx[j]; --j) {
            if (idx[j - 1] == idx[j]) return 0;
            std::swap(idx[j - 1], idx[j]);
            sign = -sign;
        }
    }
    return sign;
}

std::vector<MultiIndex> multi_indices(int dim, int degree) {
    std::vector<MultiIndex> out;
    if (degree < 0 || degree > dim) return out;
    MultiIndex cur(degree);
    for (int i = 0; i < degree; ++i) cur[i] = i;
    for (;;) {
        out.push_back(cur);
        int i = degree - 1;
        while (i >= 0 && cur[i] == dim - degree + i) --i;
        if (i < 0) break;
        ++cur[i];
        for (int j = i + 1; j < degree; ++j) cur[j] = cur[j - 1] + 1;
    }
    return out;
}

// ---------------------------------------------------------------- FormValue

double FormValue::coefficient(const MultiIndex& idx) const {
    auto it = coeffs_.find(idx);
    return it == coeffs_.end() ? 0.0 : it->second;
}

void FormValue::set(const MultiIndex& idx, double value) { coeffs_[idx] = value; }

void FormValue::add(MultiIndex idx, double value) {
    const int s = sort_with_sign(idx);
    if (s == 0 || value == 0.0) return;
    coeffs_[idx] += s * value;
}

double FormValue::operator()(std::span<const Point> vectors) const {
    if (static_cast<int>(vectors.size()) != degree_) throw GeometryError("form arity mismatch");
    if (degree_ == 0) return top();
    double total = 0.0;
    Eigen::MatrixXd m(degree_, degree_);
    for (const auto& [idx, c] : coeffs_) {
        for (int a = 0; a < degree_; ++a)
            for (int b = 0; b < degree_; ++b) m(a, b) = vectors[a][idx[b]];
        total += c * m.determinant();
    }
    return total;
}

FormValue FormValue::interior(std::span<const double> v) const {
    FormValue out(dim_, std::max(degree_ - 1, 0));
    if (degree_ == 0) return out;
    for (const auto& [idx, c] : coeffs_) {
        for (int a = 0; a < degree_; ++a) {
            MultiIndex rest;
            rest.reserve(degree_ - 1);
            for (int b = 0; b < degree_; ++b)
                if (b != a) rest.push_back(idx[b]);
            const double term = ((a % 2) ? -1.0 : 1.0) * v[idx[a]] * c;
            if (term != 0.0) out.coeffs_[rest] += term;
        }
    }
    return out;
}

double FormValue::max_abs() const {
    double m = 0.0;
    for (const auto& [idx, c] : coeffs_) m = std::max(m, std::abs(c));
    return m;
}

Eigen::VectorXd FormValue::as_vector() const {
    if (degree_ != 1) throw GeometryError("as_vector needs a 1-form");
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim_);
    for (const auto& [idx, c] : coeffs_) v(idx[0]) = c;
    return v;
}

Eigen::MatrixXd FormValue::as_matrix() const {
    if (degree_ != 2) throw GeometryError("as_matrix needs a 2-form");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim_, dim_);
    for (const auto& [idx, c] : coeffs_) {
        m(idx[0], idx[1]) = c;
        m(idx[1], idx[0]) = -c;
    }
    return m;
}

double FormValue::top() const {
    if (coeffs_.empty()) return 0.0;
    if (coeffs_.size() != 1) throw GeometryError("top() on a form with several coefficients");
    return coeffs_.begin()->second;
}

FormValue operator+(const FormValue& a, const FormValue& b) {
    if (a.degree_ != b.degree_ || a.dim_ != b.dim_) throw GeometryError("form shape mismatch");
    FormValue out = a;
    for (const auto& [idx, c] : b.coeffs_) out.coeffs_[idx] += c;
    return out;
}

FormValue operator-(const FormValue& a, const FormValue& b) { return a + (-1.0) * b; }

FormValue operator*(double s, const FormValue& a) {
    FormValue out = a;
    for (auto& [idx, c] : out.coeffs_) c *= s;
    return out;
}

// --------------------------------------------------------- DifferentialForm

DifferentialForm::DifferentialForm(ChartPtr chart, int degree, std::map<MultiIndex, Expr> coeffs)
    : chart_(std::move(chart)), degree_(degree) {
    const int d = static_cast<int>(chart_->dim());
    if (degree < 0 || degree > d) throw GeometryError("form degree out of range");
    for (auto& [idx, c] : coeffs) {
        if (static_cast<int>(idx.size()) != degree) throw GeometryError("multi-index length mismatch");
        for (std::size_t i = 0; i < idx.size(); ++i) {
            if (idx[i] < 0 || idx[i] >= d) throw GeometryError("multi-index out of range");
            if (i > 0 && idx[i] <= idx[i - 1]) throw GeometryError("multi-index not increasing");
        }
        if (!c.is_constant(0.0)) coeffs_.emplace(idx, std::move(c));
    }
}

DifferentialForm DifferentialForm::function(ChartPtr chart, Expr f) {
    return DifferentialForm(std::move(chart), 0, {{MultiIndex{}, std::move(f)}});
}

DifferentialForm DifferentialForm::one_form(ChartPtr chart, std::vector<Expr> components) {
    if (components.size() != chart->dim()) throw GeometryError("one_form: component count mismatch");
    std::map<MultiIndex, Expr> c;
    for (std::size_t i = 0; i < components.size(); ++i) c[{static_cast<int>(i)}] = components[i];
    return DifferentialForm(std::move(chart), 1, std::move(c));
}

DifferentialForm DifferentialForm::basis(ChartPtr chart, MultiIndex idx) {
    const int k = static_cast<int>(idx.size());
    const int s = sort_with_sign(idx);
    if (s == 0) return zero(std::move(chart), k);
    return DifferentialForm(std::move(chart), k, {{idx, Expr(static_cast<double>(s))}});
}

DifferentialForm DifferentialForm::parse_one_form(
    ChartPtr chart, const std::map<std::string, std::string>& coefficients) {
    std::vector<Expr> comps(chart->dim(), Expr(0.0));
    for (const auto& [coord, text] : coefficients)
        comps[chart->require_index(coord)] = parse(text, std::span<const std::string>(chart->coords()));
    return one_form(std::move(chart), std::move(comps));
}

Expr DifferentialForm::coefficient(const MultiIndex& idx) const {
    auto it = coeffs_.find(idx);
    return it == coeffs_.end() ? Expr(0.0) : it->second;
}

Expr DifferentialForm::scalar() const {
    if (degree_ != 0) throw GeometryError("scalar() on a form of positive degree");
    return coefficient({});
}

FormValue DifferentialForm::at(std::span<const double> x) const {
    FormValue v(static_cast<int>(chart_->dim()), degree_);
    Binding b(chart_->coords(), x);
    for (const auto& [idx, c] : coeffs_) v.set(idx, eval(c, b));
    return v;
}

DifferentialForm DifferentialForm::operator+(const DifferentialForm& other) const {
    if (!chart_->same_as(*other.chart_)) throw GeometryError("chart mismatch in form sum");
    if (degree_ != other.degree_) throw GeometryError("degree mismatch in form sum");
    auto c = coeffs_;
    for (const auto& [idx, e] : other.coeffs_) {
        auto it = c.find(idx);
        if (it == c.end()) c.emplace(idx, e);
        else it->second = it->second + e;
    }
    return DifferentialForm(chart_, degree_, std::move(c));
}

DifferentialForm DifferentialForm::operator-() const {
    auto c = coeffs_;
    for (auto& [idx, e] : c) e = -e;
    return DifferentialForm(chart_, degree_, std::move(c));
}

DifferentialForm DifferentialForm::operator-(const DifferentialForm& other) const {
    return *this + (-other);
}

DifferentialForm DifferentialForm::scaled(const Expr& f) const {
    auto c = coeffs_;
    for (auto& [idx, e] : c) e = f * e;
    return DifferentialForm(chart_, degree_, std::move(c));
}

DifferentialForm DifferentialForm::rehomed(ChartPtr target,
                                           const std::map<std::string, Expr>& subst) const {
    if (target->dim() != chart_->dim()) throw GeometryError("rehome: dimension mismatch");
    auto c = coeffs_;
    for (auto& [idx, e] : c) e = substitute(e, subst);
    return DifferentialForm(std::move(target), degree_, std::move(c));
}

std::string DifferentialForm::to_string() const {
    if (coeffs_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [idx, c] : coeffs_) {
        if (!first) os << " + ";
        first = false;
        os << c.to_string();
        for (std::size_t i = 0; i < idx.size(); ++i)
            os << (i == 0 ? " d" : "^d") << chart_->coords()[idx[i]];
    }
    return os.str();
}

// ------------------------------------------------------------ PointwiseForm

PointwiseForm::PointwiseForm(ChartPtr chart, int degree, Evaluator eval)
    : chart_(std::move(chart)), degree_(degree), eval_(std::move(eval)) {}

PointwiseForm::PointwiseForm(const DifferentialForm& form)
    : chart_(form.chart()),
      degree_(form.degree()),
      eval_([form](std::span<const double> x) { return form.at(x); }),
      symbolic_(form) {}

}  // namespace contactkit
