#include "fracmono/operators/triple.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fracmono::operators {

namespace {

void require_length(const TripleSpec& triple, std::span<const double> v, const char* who) {
    if (v.size() != triple.grid.n_interior) throw std::invalid_argument(std::string(who) + ": length mismatch");
}

std::vector<double> inverse_pivot(const TripleSpec& triple, std::span<const double> w) {
    if (triple.pivot_order == 1.0) return invert_dirichlet_laplacian(triple.grid, w);
    return apply_laplacian_power(triple.grid, -triple.pivot_order, w);
}

/// Q_e = h sum_{i > e} w_i over edges e = 0..n (nodes are 1..n, edge e joins e and e+1).
std::vector<double> edge_flux(const Grid1D& grid, std::span<const double> w) {
    const std::size_t n = grid.n_interior;
    std::vector<double> q(n + 1, 0.0);
    double acc = 0.0;
    for (std::size_t e = n; e-- > 0;) {
        acc += grid.h() * w[e];
        q[e] = acc;
    }
    return q;
}

double lq_sum(std::span<const double> v, double q, double shift) {
    double acc = 0.0;
    for (double x : v) acc += std::pow(std::fabs(x - shift), q);
    return acc;
}

} // namespace

std::string_view to_string(TripleKind kind) {
    return kind == TripleKind::PorousMedium ? "porous_medium" : "p_laplace";
}

void TripleSpec::validate() const {
    if (grid.n_interior == 0) throw std::invalid_argument("triple: grid must have at least one interior node");
    if (!(grid.length > 0.0)) throw std::invalid_argument("triple: domain length must be positive");
    if (!(p >= 2.0)) throw std::invalid_argument("triple: p must be >= 2");
    if (!(pivot_order > 0.0 && pivot_order <= 1.0)) throw std::invalid_argument("triple: pivot_order must lie in (0,1]");
}

double lq_norm(std::span<const double> v, double q, double h) {
    return std::pow(h * lq_sum(v, q, 0.0), 1.0 / q);
}

double h_inner(const TripleSpec& triple, std::span<const double> u, std::span<const double> v) {
    require_length(triple, u, "h_inner");
    require_length(triple, v, "h_inner");
    const double h = triple.grid.h();
    if (triple.kind == TripleKind::PLaplace) return h * std::inner_product(u.begin(), u.end(), v.begin(), 0.0);
    const auto z = inverse_pivot(triple, v);
    return h * std::inner_product(u.begin(), u.end(), z.begin(), 0.0);
}

double norm_H(const TripleSpec& triple, std::span<const double> u) {
    return std::sqrt(std::max(0.0, h_inner(triple, u, u)));
}

double dual_pairing(const TripleSpec& triple, std::span<const double> w, std::span<const double> v) {
    require_length(triple, w, "dual_pairing");
    require_length(triple, v, "dual_pairing");
    const double h = triple.grid.h();
    if (triple.kind == TripleKind::PorousMedium) {
        const auto z = apply_laplacian_power(triple.grid, -triple.pivot_order, w);
        return h * std::inner_product(z.begin(), z.end(), v.begin(), 0.0);
    }
    const auto q = edge_flux(triple.grid, w);
    const auto dv = difference_quotients(triple.grid, v);
    return h * std::inner_product(q.begin(), q.end(), dv.begin(), 0.0);
}

std::vector<double> difference_quotients(const Grid1D& grid, std::span<const double> v) {
    const std::size_t n = grid.n_interior;
    if (v.size() != n) throw std::invalid_argument("difference_quotients: length mismatch");
    std::vector<double> d(n + 1);
    const double inv_h = 1.0 / grid.h();
    for (std::size_t e = 0; e <= n; ++e) {
        const double left = e == 0 ? 0.0 : v[e - 1];
        const double right = e == n ? 0.0 : v[e];
        d[e] = (right - left) * inv_h;
    }
    return d;
}

double norm_V(const TripleSpec& triple, std::span<const double> v) {
    require_length(triple, v, "norm_V");
    const double h = triple.grid.h();
    if (triple.kind == TripleKind::PorousMedium) return lq_norm(v, triple.p, h);
    return lq_norm(difference_quotients(triple.grid, v), triple.p, h);
}

double norm_Vstar(const TripleSpec& triple, std::span<const double> w) {
    require_length(triple, w, "norm_Vstar");
    const double h = triple.grid.h();
    const double q = triple.p / (triple.p - 1.0);
    if (triple.kind == TripleKind::PorousMedium) return lq_norm(inverse_pivot(triple, w), q, h);

    const auto flux = edge_flux(triple.grid, w);
    // phi(c) = sum |Q_e - c|^q is convex; its derivative is monotone in c and
    // changes sign inside [min Q, max Q].
    auto slope = [&](double c) {
        double acc = 0.0;
        for (double x : flux) {
            const double d = x - c;
            acc -= std::copysign(std::pow(std::fabs(d), q - 1.0), d);
        }
        return acc;
    };
    double lo = *std::min_element(flux.begin(), flux.end());
    double hi = *std::max_element(flux.begin(), flux.end());
    for (int it = 0; it < 200 && hi - lo > 1e-16 * (std::fabs(lo) + std::fabs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (slope(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    const double c = 0.5 * (lo + hi);
    return std::pow(h * lq_sum(flux, q, c), 1.0 / q);
}

} // namespace fracmono::operators
