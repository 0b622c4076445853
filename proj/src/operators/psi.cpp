#include "fracmono/operators/psi.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fracmono::operators {

PsiFunction PsiFunction::power(double m) {
    if (!(m > 0.0)) throw std::invalid_argument("PsiFunction::power: exponent must be positive");
    PsiFunction psi;
    psi.m_ = m;
    return psi;
}

PsiFunction PsiFunction::table(std::vector<double> nodes, std::vector<double> values) {
    if (nodes.size() < 2 || nodes.size() != values.size())
        throw std::invalid_argument("PsiFunction::table: need at least two (node, value) pairs");
    for (std::size_t k = 1; k < nodes.size(); ++k) {
        if (!(nodes[k] > nodes[k - 1])) throw std::invalid_argument("PsiFunction::table: nodes must strictly increase");
        if (values[k] < values[k - 1]) throw std::invalid_argument("PsiFunction::table: Psi must be non-decreasing");
    }
    PsiFunction psi;
    psi.m_ = 0.0;
    psi.nodes_ = std::move(nodes);
    psi.values_ = std::move(values);
    psi.cumulative_.assign(psi.nodes_.size(), 0.0);
    for (std::size_t k = 1; k < psi.nodes_.size(); ++k)
        psi.cumulative_[k] = psi.cumulative_[k - 1] +
                             0.5 * (psi.values_[k] + psi.values_[k - 1]) * (psi.nodes_[k] - psi.nodes_[k - 1]);
    psi.zero_offset_ = psi.integral_from_first_node(0.0);
    return psi;
}

double PsiFunction::value(double s) const {
    if (is_power()) return std::copysign(std::pow(std::fabs(s), m_), s);
    const auto& x = nodes_;
    std::size_t k = 0;
    if (s <= x.front())
        k = 0;
    else if (s >= x.back())
        k = x.size() - 2;
    else
        k = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), s) - x.begin()) - 1;
    const double slope = (values_[k + 1] - values_[k]) / (x[k + 1] - x[k]);
    return values_[k] + slope * (s - x[k]);
}

double PsiFunction::derivative(double s) const {
    if (is_power()) {
        if (m_ == 1.0) return 1.0;
        const double a = m_ < 1.0 ? std::max(std::fabs(s), 1e-12) : std::fabs(s);
        return m_ * std::pow(a, m_ - 1.0);
    }
    const auto& x = nodes_;
    std::size_t k = 0;
    if (s <= x.front())
        k = 0;
    else if (s >= x.back())
        k = x.size() - 2;
    else
        k = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), s) - x.begin()) - 1;
    return (values_[k + 1] - values_[k]) / (x[k + 1] - x[k]);
}

double PsiFunction::integral_from_first_node(double s) const {
    const auto& x = nodes_;
    if (s <= x.front()) {
        // linear extension to the left: integrate from s up to x0, negated
        const double v0 = values_.front();
        const double vs = value(s);
        return -0.5 * (v0 + vs) * (x.front() - s);
    }
    std::size_t k = s >= x.back() ? x.size() - 1
                                  : static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), s) - x.begin()) - 1;
    return cumulative_[k] + 0.5 * (values_[k] + value(s)) * (s - x[k]);
}

double PsiFunction::antiderivative(double s) const {
    if (is_power()) return std::pow(std::fabs(s), m_ + 1.0) / (m_ + 1.0);
    return integral_from_first_node(s) - zero_offset_;
}

} // namespace fracmono::operators
