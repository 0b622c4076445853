#include "fracmono/operators/laplacian.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace fracmono::operators {

void Tridiagonal::multiply(std::span<const double> x, std::span<double> y) const {
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
        double acc = diag[i] * x[i];
        if (i > 0) acc += lower[i] * x[i - 1];
        if (i + 1 < n) acc += upper[i] * x[i + 1];
        y[i] = acc;
    }
}

std::vector<double> thomas_solve(const Tridiagonal& m, std::span<const double> rhs) {
    const std::size_t n = m.size();
    if (rhs.size() != n) throw std::invalid_argument("thomas_solve: size mismatch");
    std::vector<double> c(n, 0.0);
    std::vector<double> d(n, 0.0);
    double pivot = m.diag[0];
    if (pivot == 0.0) throw std::runtime_error("thomas_solve: zero pivot");
    c[0] = n > 1 ? m.upper[0] / pivot : 0.0;
    d[0] = rhs[0] / pivot;
    for (std::size_t i = 1; i < n; ++i) {
        pivot = m.diag[i] - m.lower[i] * c[i - 1];
        if (pivot == 0.0 || !std::isfinite(pivot)) throw std::runtime_error("thomas_solve: zero pivot");
        c[i] = i + 1 < n ? m.upper[i] / pivot : 0.0;
        d[i] = (rhs[i] - m.lower[i] * d[i - 1]) / pivot;
    }
    std::vector<double> x(n);
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

Tridiagonal dirichlet_laplacian_matrix(const Grid1D& grid) {
    const std::size_t n = grid.n_interior;
    const double inv_h2 = 1.0 / (grid.h() * grid.h());
    Tridiagonal m(n);
    for (std::size_t i = 0; i < n; ++i) {
        m.diag[i] = 2.0 * inv_h2;
        m.lower[i] = i > 0 ? -inv_h2 : 0.0;
        m.upper[i] = i + 1 < n ? -inv_h2 : 0.0;
    }
    return m;
}

std::vector<double> apply_dirichlet_laplacian(const Grid1D& grid, std::span<const double> u) {
    if (u.size() != grid.n_interior) throw std::invalid_argument("apply_dirichlet_laplacian: length mismatch");
    std::vector<double> out(u.size());
    dirichlet_laplacian_matrix(grid).multiply(u, out);
    return out;
}

std::vector<double> invert_dirichlet_laplacian(const Grid1D& grid, std::span<const double> v) {
    if (v.size() != grid.n_interior) throw std::invalid_argument("invert_dirichlet_laplacian: length mismatch");
    return thomas_solve(dirichlet_laplacian_matrix(grid), v);
}

double dirichlet_eigenvalue(const Grid1D& grid, std::size_t k) {
    const double h = grid.h();
    const double s = std::sin(static_cast<double>(k) * std::numbers::pi * h / (2.0 * grid.length));
    return 4.0 * s * s / (h * h);
}

SineBasis::SineBasis(std::size_t n) : n_(n), sines_(n, n) {
    const double step = std::numbers::pi / static_cast<double>(n + 1);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            sines_(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) =
                std::sin(static_cast<double>((k + 1) * (i + 1)) * step);
}

std::vector<double> SineBasis::forward(std::span<const double> u) const {
    if (u.size() != n_) throw std::invalid_argument("SineBasis::forward: length mismatch");
    std::vector<double> out(n_);
    Eigen::Map<const Eigen::VectorXd> in(u.data(), static_cast<Eigen::Index>(n_));
    Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(n_)) = sines_ * in;
    return out;
}

std::vector<double> SineBasis::inverse(std::span<const double> coeffs) const {
    if (coeffs.size() != n_) throw std::invalid_argument("SineBasis::inverse: length mismatch");
    std::vector<double> out(n_);
    Eigen::Map<const Eigen::VectorXd> in(coeffs.data(), static_cast<Eigen::Index>(n_));
    Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(n_)) =
        (2.0 / static_cast<double>(n_ + 1)) * (sines_.transpose() * in);
    return out;
}

const SineBasis& SineBasis::cached(std::size_t n) {
    static std::mutex mutex;
    static std::map<std::size_t, std::unique_ptr<SineBasis>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<SineBasis>(n);
    return *slot;
}

std::vector<double> apply_laplacian_power(const Grid1D& grid, double power, std::span<const double> u) {
    if (u.size() != grid.n_interior) throw std::invalid_argument("apply_laplacian_power: length mismatch");
    const auto& basis = SineBasis::cached(grid.n_interior);
    auto coeffs = basis.forward(u);
    for (std::size_t k = 0; k < coeffs.size(); ++k) coeffs[k] *= std::pow(dirichlet_eigenvalue(grid, k + 1), power);
    return basis.inverse(coeffs);
}

std::vector<double> spectral_fractional_laplacian(const Grid1D& grid, double alpha_frac, std::span<const double> u) {
    if (!(alpha_frac > 0.0 && alpha_frac <= 1.0))
        throw std::invalid_argument("spectral_fractional_laplacian: alpha_frac must lie in (0,1]");
    return apply_laplacian_power(grid, alpha_frac, u);
}

Eigen::MatrixXd laplacian_power_matrix(const Grid1D& grid, double power) {
    const std::size_t n = grid.n_interior;
    const auto& s = SineBasis::cached(n).matrix();
    Eigen::VectorXd lambda(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k)
        lambda(static_cast<Eigen::Index>(k)) = std::pow(dirichlet_eigenvalue(grid, k + 1), power);
    return (2.0 / static_cast<double>(n + 1)) * (s.transpose() * lambda.asDiagonal() * s);
}

} // namespace fracmono::operators
