#include "fracmono/operators/operator.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fracmono::operators {

MonotoneOperator::MonotoneOperator(TripleSpec triple) : triple_(std::move(triple)) { triple_.validate(); }

std::vector<double> MonotoneOperator::apply(double t, std::span<const double> u) const {
    std::vector<double> out(u.size());
    apply(t, u, out);
    return out;
}

double MonotoneOperator::inner_H(std::span<const double> u, std::span<const double> v) const {
    return h_inner(triple_, u, v);
}

double MonotoneOperator::norm_H(std::span<const double> u) const { return std::sqrt(std::max(0.0, inner_H(u, u))); }

double MonotoneOperator::norm_V(std::span<const double> v) const { return operators::norm_V(triple_, v); }

double MonotoneOperator::norm_Vstar(std::span<const double> w) const { return operators::norm_Vstar(triple_, w); }

namespace {

void check_length(const MonotoneOperator& op, std::span<const double> u) {
    if (u.size() != op.dim()) throw std::invalid_argument(op.name() + ": state length does not match the grid");
}

class PorousMediumOperator final : public MonotoneOperator {
public:
    PorousMediumOperator(const PorousMediumSpec& spec, const TripleSpec& triple,
                         std::optional<StructuralConstants> constants)
        : MonotoneOperator(triple),
          psi_(spec.psi.value_or(PsiFunction::power(triple.p - 1.0))),
          alpha_frac_(spec.alpha_frac),
          constants_(constants) {
        if (alpha_frac_ != 1.0) power_matrix_ = laplacian_power_matrix(triple.grid, alpha_frac_);
    }

    void apply(double, std::span<const double> u, std::span<double> out) const override {
        check_length(*this, u);
        std::vector<double> z(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) z[i] = psi_.value(u[i]);
        if (alpha_frac_ == 1.0) {
            dirichlet_laplacian_matrix(triple().grid).multiply(z, out);
            return;
        }
        Eigen::Map<const Eigen::VectorXd> zin(z.data(), static_cast<Eigen::Index>(z.size()));
        Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size())) = power_matrix_ * zin;
    }

    double potential(double, std::span<const double> u) const override {
        check_length(*this, u);
        double acc = 0.0;
        for (double s : u) acc += psi_.antiderivative(s);
        return triple().grid.h() * acc;
    }

    Jacobian jacobian(double, std::span<const double> u) const override {
        check_length(*this, u);
        const std::size_t n = u.size();
        std::vector<double> slope(n);
        for (std::size_t i = 0; i < n; ++i) slope[i] = psi_.derivative(u[i]);
        if (alpha_frac_ == 1.0) {
            const double inv_h2 = 1.0 / (triple().grid.h() * triple().grid.h());
            Tridiagonal j(n);
            for (std::size_t i = 0; i < n; ++i) {
                j.diag[i] = 2.0 * inv_h2 * slope[i];
                if (i > 0) j.lower[i] = -inv_h2 * slope[i - 1];
                if (i + 1 < n) j.upper[i] = -inv_h2 * slope[i + 1];
            }
            return j;
        }
        Eigen::Map<const Eigen::VectorXd> d(slope.data(), static_cast<Eigen::Index>(n));
        return Eigen::MatrixXd(power_matrix_ * d.asDiagonal());
    }

    StructuralConstants constants() const override {
        if (!constants_) throw std::invalid_argument("porous medium: structural constants are required for this Psi");
        return *constants_;
    }

    std::string name() const override { return "porous_medium"; }

private:
    PsiFunction psi_;
    double alpha_frac_;
    std::optional<StructuralConstants> constants_;
    Eigen::MatrixXd power_matrix_;
};

class PLaplaceOperator final : public MonotoneOperator {
public:
    PLaplaceOperator(const PLaplaceSpec& spec, const TripleSpec& triple, StructuralConstants constants)
        : MonotoneOperator(triple), perturbed_(spec.zero_order_perturbation), constants_(constants) {}

    void apply(double, std::span<const double> u, std::span<double> out) const override {
        check_length(*this, u);
        const double p = triple().p;
        const double inv_h = 1.0 / triple().grid.h();
        const auto du = difference_quotients(triple().grid, u);
        std::vector<double> flux(du.size());
        for (std::size_t e = 0; e < du.size(); ++e) flux[e] = std::pow(std::fabs(du[e]), p - 2.0) * du[e];
        for (std::size_t j = 0; j < u.size(); ++j) {
            out[j] = -(flux[j + 1] - flux[j]) * inv_h;
            if (perturbed_) out[j] += std::pow(std::fabs(u[j]), p - 2.0) * u[j];
        }
    }

    double potential(double, std::span<const double> u) const override {
        check_length(*this, u);
        const double p = triple().p;
        const auto du = difference_quotients(triple().grid, u);
        double acc = 0.0;
        for (double d : du) acc += std::pow(std::fabs(d), p);
        if (perturbed_)
            for (double s : u) acc += std::pow(std::fabs(s), p);
        return triple().grid.h() * acc / p;
    }

    Jacobian jacobian(double, std::span<const double> u) const override {
        check_length(*this, u);
        constexpr double kRegularization = 1e-12;
        const double p = triple().p;
        const double inv_h2 = 1.0 / (triple().grid.h() * triple().grid.h());
        const auto du = difference_quotients(triple().grid, u);
        std::vector<double> slope(du.size());
        for (std::size_t e = 0; e < du.size(); ++e)
            slope[e] = (p - 1.0) * std::pow(std::fabs(du[e]), p - 2.0) + kRegularization;
        const std::size_t n = u.size();
        Tridiagonal j(n);
        for (std::size_t i = 0; i < n; ++i) {
            j.diag[i] = (slope[i] + slope[i + 1]) * inv_h2;
            if (i > 0) j.lower[i] = -slope[i] * inv_h2;
            if (i + 1 < n) j.upper[i] = -slope[i + 1] * inv_h2;
            if (perturbed_) j.diag[i] += (p - 1.0) * std::pow(std::fabs(u[i]), p - 2.0);
        }
        return j;
    }

    StructuralConstants constants() const override { return constants_; }
    std::string name() const override { return perturbed_ ? "p_laplace_perturbed" : "p_laplace"; }

private:
    bool perturbed_;
    StructuralConstants constants_;
};

class LinearOperator final : public MonotoneOperator {
public:
    LinearOperator(const LinearSpec& spec, const TripleSpec& triple, StructuralConstants constants)
        : MonotoneOperator(triple), lambda_(spec.lambda), constants_(constants) {}

    void apply(double, std::span<const double> u, std::span<double> out) const override {
        check_length(*this, u);
        for (std::size_t i = 0; i < u.size(); ++i) out[i] = lambda_ * u[i];
    }

    double potential(double, std::span<const double> u) const override {
        return 0.5 * lambda_ * inner_H(u, u);
    }

    Jacobian jacobian(double, std::span<const double> u) const override {
        Tridiagonal j(u.size());
        for (auto& d : j.diag) d = lambda_;
        return j;
    }

    // Hilbert triple: V = H = V*.
    double norm_V(std::span<const double> v) const override { return norm_H(v); }
    double norm_Vstar(std::span<const double> w) const override { return norm_H(w); }

    StructuralConstants constants() const override { return constants_; }
    std::string name() const override { return "linear"; }

private:
    double lambda_;
    StructuralConstants constants_;
};

std::optional<StructuralConstants> porous_medium_constants(const PorousMediumSpec& spec, const TripleSpec& triple) {
    const double p = triple.p;
    const bool pure_power = !spec.psi || (spec.psi->is_power() && spec.psi->exponent() == p - 1.0);
    PsiConstants c;
    if (spec.psi_constants)
        c = *spec.psi_constants;
    else if (!pure_power)
        return std::nullopt;
    const double measure = triple.grid.length;
    return StructuralConstants{p, c.c1, c.c2 * measure, c.c3, c.c4 * std::pow(measure, (p - 1.0) / p)};
}

} // namespace

StructuralConstants default_constants(const OperatorSpec& spec, const TripleSpec& triple) {
    if (spec.constants) return *spec.constants;
    if (const auto* pm = std::get_if<PorousMediumSpec>(&spec.kind)) {
        auto c = porous_medium_constants(*pm, triple);
        if (!c) throw std::invalid_argument("porous medium: Psi constants c1..c4 are required for this Psi");
        return *c;
    }
    if (const auto* pl = std::get_if<PLaplaceSpec>(&spec.kind)) {
        const double p = triple.p;
        const double c = pl->zero_order_perturbation ? 1.0 + std::pow(triple.grid.length, p) : 1.0;
        return StructuralConstants{p, 1.0, 0.0, c, 0.0};
    }
    const double lambda = std::get<LinearSpec>(spec.kind).lambda;
    return StructuralConstants{2.0, lambda, 0.0, lambda, 0.0};
}

std::unique_ptr<MonotoneOperator> make_operator(const OperatorSpec& spec, const TripleSpec& triple) {
    triple.validate();
    if (const auto* pm = std::get_if<PorousMediumSpec>(&spec.kind)) {
        if (triple.kind != TripleKind::PorousMedium)
            throw std::invalid_argument("porous medium operator requires the porous-medium (H^-1) triple");
        if (!(pm->alpha_frac > 0.0 && pm->alpha_frac <= 1.0))
            throw std::invalid_argument("porous medium: alpha_frac must lie in (0,1]");
        if (triple.pivot_order != pm->alpha_frac)
            throw std::invalid_argument("porous medium: triple pivot_order must equal alpha_frac");
        std::optional<StructuralConstants> c = spec.constants;
        if (!c) c = porous_medium_constants(*pm, triple);
        return std::make_unique<PorousMediumOperator>(*pm, triple, c);
    }
    if (const auto* pl = std::get_if<PLaplaceSpec>(&spec.kind)) {
        if (triple.kind != TripleKind::PLaplace)
            throw std::invalid_argument("p-Laplace operator requires the p-Laplace (L^2 pivot) triple");
        return std::make_unique<PLaplaceOperator>(*pl, triple, default_constants(spec, triple));
    }
    const auto& lin = std::get<LinearSpec>(spec.kind);
    if (!(lin.lambda >= 0.0)) throw std::invalid_argument("linear operator: lambda must be non-negative");
    return std::make_unique<LinearOperator>(lin, triple, default_constants(spec, triple));
}

std::vector<double> apply_operator(const OperatorSpec& spec, const TripleSpec& triple, double t,
                                   std::span<const double> u) {
    const auto op = make_operator(spec, triple);
    if (u.size() != op->dim()) throw std::invalid_argument("apply_operator: state length does not match the grid");
    return op->apply(t, u);
}

} // namespace fracmono::operators
