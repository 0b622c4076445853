#pragma once

#include <vector>

namespace fracmono::operators {

/// Monotone nonlinearity Psi of the porous medium operator L Psi(u).
///
/// Either the power law Psi(s) = s |s|^(m-1) (m >= 1 slow/linear diffusion,
/// 0 < m < 1 fast diffusion), or a caller-supplied table interpolated
/// piecewise linearly and extended linearly beyond its end points.
class PsiFunction {
public:
    static PsiFunction power(double m);
    /// Throws std::invalid_argument unless nodes strictly increase, values do
    /// not decrease, and there are at least two nodes.
    static PsiFunction table(std::vector<double> nodes, std::vector<double> values);

    [[nodiscard]] double value(double s) const;
    /// Derivative for Newton Jacobians. For fast diffusion |s| is floored at
    /// 1e-12 so the slope stays finite.
    [[nodiscard]] double derivative(double s) const;
    /// int_0^s Psi(r) dr, the convex potential density.
    [[nodiscard]] double antiderivative(double s) const;

    [[nodiscard]] bool is_power() const noexcept { return nodes_.empty(); }
    [[nodiscard]] double exponent() const noexcept { return m_; }

private:
    double m_ = 1.0;
    std::vector<double> nodes_;
    std::vector<double> values_;
    std::vector<double> cumulative_; // int_{nodes_[0]}^{nodes_[k]} Psi
    double zero_offset_ = 0.0;       // int_{nodes_[0]}^{0} Psi

    [[nodiscard]] double integral_from_first_node(double s) const;
};

} // namespace fracmono::operators
