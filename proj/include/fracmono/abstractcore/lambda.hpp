#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fracmono/series.hpp"

namespace fracmono::abstractcore {

/// Discrete Lambda = -D^beta on a space-time grid: a lower-triangular Toeplitz
/// convolution in time with first column -dt^-beta * (GL weights), applied to
/// every spatial degree of freedom. Row k of a space-time vector is the state
/// at t_{k+1} = (k+1) dt; the initial state is zero.
class DiscreteLambda {
public:
    DiscreteLambda(double beta, double dt, std::size_t n_time);

    [[nodiscard]] double beta() const noexcept { return beta_; }
    [[nodiscard]] double dt() const noexcept { return dt_; }
    [[nodiscard]] std::size_t n_time() const noexcept { return column_.size(); }
    [[nodiscard]] const std::vector<double>& column() const noexcept { return column_; }

    [[nodiscard]] NodalSeries apply(const NodalSeries& u) const;

private:
    double beta_;
    double dt_;
    std::vector<double> column_;
};

/// Throws std::invalid_argument for n_time = 0, dt <= 0 or beta outside (0, 1].
DiscreteLambda build_discrete_lambda(double beta, double dt, std::size_t n_time);

/// Lower-triangular Toeplitz product y_k = sum_{j<=k} column[j] u_{k-j}.
NodalSeries toeplitz_apply(std::span<const double> column, const NodalSeries& u);

/// Solves the Toeplitz system with the given first column by forward substitution.
NodalSeries toeplitz_solve(std::span<const double> column, const NodalSeries& v);

/// V_alpha v = (alpha - Lambda)^-1 v. Throws std::invalid_argument unless alpha > 0.
NodalSeries resolvent(const DiscreteLambda& lambda, double alpha, const NodalSeries& v);

/// First column of V_alpha.
std::vector<double> resolvent_column(const DiscreteLambda& lambda, double alpha);

/// First column of the Yosida approximation Lambda_alpha = alpha (alpha V_alpha - I).
std::vector<double> yosida_column(const DiscreteLambda& lambda, double alpha);

NodalSeries apply_yosida(const DiscreteLambda& lambda, double alpha, const NodalSeries& u);

/// Flattened Euclidean pairing of two space-time vectors.
double flat_inner(const NodalSeries& a, const NodalSeries& b);

/// Largest normalised <T u, u> / |u|^2 over random samples, where T is the
/// Toeplitz operator with the given column. Nonpositive for dissipative T.
double max_dissipativity(std::span<const double> column, std::size_t n_dof, std::size_t samples,
                         std::uint64_t seed);

/// Spectral norm of alpha V_alpha (on one degree of freedom) by power
/// iteration on (alpha V_alpha)^T (alpha V_alpha).
double resolvent_contraction(const DiscreteLambda& lambda, double alpha, std::size_t iterations = 500);

/// Discrete GL symbol -(1 - e^{-i omega dt})^beta / dt^beta.
std::complex<double> discrete_symbol(double beta, double dt, double omega);

/// Continuum symbol -(i omega)^beta = -|omega|^beta e^{i beta pi/2 sgn omega}.
std::complex<double> continuum_symbol(double beta, double omega);

/// max over omegas of |discrete - continuum| / |continuum| (0 at omega = 0).
/// Throws std::invalid_argument when |omega| dt >= pi or beta is outside (0, 1].
double symbol_error(double beta, double dt, std::span<const double> omegas);

} // namespace fracmono::abstractcore
