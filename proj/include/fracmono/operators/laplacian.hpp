#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace fracmono::operators {

/// Uniform grid on (0, length) with homogeneous Dirichlet boundary values;
/// interior node i (0-based) sits at x = (i + 1) h.
struct Grid1D {
    std::size_t n_interior = 1;
    double length = 1.0;

    [[nodiscard]] double h() const noexcept { return length / static_cast<double>(n_interior + 1); }
    [[nodiscard]] double x(std::size_t i) const noexcept { return static_cast<double>(i + 1) * h(); }
};

/// General tridiagonal matrix; lower[0] and upper[n-1] are unused.
struct Tridiagonal {
    std::vector<double> lower;
    std::vector<double> diag;
    std::vector<double> upper;

    explicit Tridiagonal(std::size_t n = 0) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0) {}
    [[nodiscard]] std::size_t size() const noexcept { return diag.size(); }
    void multiply(std::span<const double> x, std::span<double> y) const;
};

/// Thomas algorithm without pivoting; requires a nonsingular, column or row
/// diagonally dominant matrix. Throws std::runtime_error on a zero pivot.
std::vector<double> thomas_solve(const Tridiagonal& m, std::span<const double> rhs);

/// The symmetric positive definite Dirichlet matrix L = -Delta_h:
/// (L u)_i = (2 u_i - u_{i-1} - u_{i+1}) / h^2.
Tridiagonal dirichlet_laplacian_matrix(const Grid1D& grid);
std::vector<double> apply_dirichlet_laplacian(const Grid1D& grid, std::span<const double> u);

/// Solves L w = v in O(n).
std::vector<double> invert_dirichlet_laplacian(const Grid1D& grid, std::span<const double> v);

/// k-th (1-based) eigenvalue of L: (2 - 2 cos(k pi h / length)) / h^2.
double dirichlet_eigenvalue(const Grid1D& grid, std::size_t k);

/// Discrete sine basis of L on n interior nodes. Eigenvector k (1-based) has
/// entries sin(k i pi / (n + 1)), i = 1..n, and squared norm (n + 1) / 2.
class SineBasis {
public:
    explicit SineBasis(std::size_t n);

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    /// Coefficients c_k = sum_i sin(k i pi/(n+1)) u_i.
    [[nodiscard]] std::vector<double> forward(std::span<const double> u) const;
    /// Inverse of forward.
    [[nodiscard]] std::vector<double> inverse(std::span<const double> coeffs) const;
    [[nodiscard]] const Eigen::MatrixXd& matrix() const noexcept { return sines_; }

    /// Shared immutable basis per size; safe to call from several threads.
    static const SineBasis& cached(std::size_t n);

private:
    std::size_t n_;
    Eigen::MatrixXd sines_;
};

/// Applies f(L) through the sine eigenbasis: eigenvalue lambda_k scaled by
/// lambda_k^power.
std::vector<double> apply_laplacian_power(const Grid1D& grid, double power, std::span<const double> u);

/// Spectral fractional Laplacian (-Delta_h)^alpha_frac for alpha_frac in (0, 1].
std::vector<double> spectral_fractional_laplacian(const Grid1D& grid, double alpha_frac, std::span<const double> u);

/// Dense matrix of L^power.
Eigen::MatrixXd laplacian_power_matrix(const Grid1D& grid, double power);

} // namespace fracmono::operators
