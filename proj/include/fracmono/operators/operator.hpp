#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "fracmono/operators/laplacian.hpp"
#include "fracmono/operators/psi.hpp"
#include "fracmono/operators/triple.hpp"

namespace fracmono::operators {

/// Constants of the coercivity and growth bounds
///   <A v, v> >= delta ||v||_V^exponent - g,
///   ||A v||_{V*} <= growth_offset + C ||v||_V^(exponent - 1).
struct StructuralConstants {
    double exponent = 2.0;
    double delta = 1.0;
    double g = 0.0;
    double C = 1.0;
    double growth_offset = 0.0;
};

/// Psi constants: s Psi(s) >= c1 |s|^p - c2 and |Psi(s)| <= c3 |s|^(p-1) + c4.
struct PsiConstants {
    double c1 = 1.0;
    double c2 = 0.0;
    double c3 = 1.0;
    double c4 = 0.0;
};

/// L Psi(u) with L = (-Delta_h)^alpha_frac. Psi defaults to s |s|^(p-2) with p
/// taken from the triple.
struct PorousMediumSpec {
    std::optional<PsiFunction> psi;
    std::optional<PsiConstants> psi_constants;
    double alpha_frac = 1.0;
};

/// -div_h(|D u|^(p-2) D u), optionally plus the zero-order term u |u|^(p-2).
struct PLaplaceSpec {
    bool zero_order_perturbation = false;
};

/// lambda u; treated on the Hilbert triple V = H.
struct LinearSpec {
    double lambda = 1.0;
};

struct OperatorSpec {
    std::variant<PorousMediumSpec, PLaplaceSpec, LinearSpec> kind = PorousMediumSpec{};
    /// Overrides the constants derived from the operator parameters.
    std::optional<StructuralConstants> constants;
};

/// Jacobian of the nodal map u -> A(t, u).
using Jacobian = std::variant<Tridiagonal, Eigen::MatrixXd>;

/// A monotone, hemicontinuous operator V -> V* on a discretised Gelfand
/// triple. Signed so that it enters the evolution equation
/// D^beta (u - x) + A(t, u) = f with a plus: <A u - A v, u - v> >= 0.
///
/// Every concrete operator is the H-gradient of a convex potential Phi, i.e.
/// <A(u), v>_H = Phi'(u) v, which lets the resolvent solver line-search on
/// an energy.
class MonotoneOperator {
public:
    explicit MonotoneOperator(TripleSpec triple);
    virtual ~MonotoneOperator() = default;

    [[nodiscard]] const TripleSpec& triple() const noexcept { return triple_; }
    [[nodiscard]] std::size_t dim() const noexcept { return triple_.grid.n_interior; }

    virtual void apply(double t, std::span<const double> u, std::span<double> out) const = 0;
    [[nodiscard]] std::vector<double> apply(double t, std::span<const double> u) const;
    [[nodiscard]] virtual double potential(double t, std::span<const double> u) const = 0;
    [[nodiscard]] virtual Jacobian jacobian(double t, std::span<const double> u) const = 0;
    [[nodiscard]] virtual StructuralConstants constants() const = 0;
    [[nodiscard]] virtual std::string name() const = 0;

    [[nodiscard]] virtual double inner_H(std::span<const double> u, std::span<const double> v) const;
    [[nodiscard]] double norm_H(std::span<const double> u) const;
    [[nodiscard]] virtual double norm_V(std::span<const double> v) const;
    [[nodiscard]] virtual double norm_Vstar(std::span<const double> w) const;
    /// <w, v>_{V*,V}; equals inner_H for nodal dual vectors.
    [[nodiscard]] double pairing(std::span<const double> w, std::span<const double> v) const { return inner_H(w, v); }

private:
    TripleSpec triple_;
};

/// Builds the operator after checking compatibility with the triple:
/// PorousMedium needs the porous-medium triple with pivot_order = alpha_frac,
/// PLaplace needs the p-Laplace triple. Throws std::invalid_argument otherwise.
std::unique_ptr<MonotoneOperator> make_operator(const OperatorSpec& spec, const TripleSpec& triple);

/// Constants implied by the operator parameters (the pure power porous medium
/// has delta = c1 = 1, g = 0, C = c3 = 1; the p-Laplacian has delta = 1 and
/// C = 1 in the gradient norm, C = 1 + length^p with the zero-order term).
StructuralConstants default_constants(const OperatorSpec& spec, const TripleSpec& triple);

/// Convenience wrapper: the discrete V*-representative A(t, u).
std::vector<double> apply_operator(const OperatorSpec& spec, const TripleSpec& triple, double t,
                                   std::span<const double> u);

} // namespace fracmono::operators
