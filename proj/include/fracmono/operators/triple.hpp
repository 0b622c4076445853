#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "fracmono/operators/laplacian.hpp"

namespace fracmono::operators {

enum class TripleKind {
    /// V = discrete L^p, H = dual of the form domain of L^pivot_order
    /// (pivot_order = 1 is the discrete H^-1), V* = L^pivot_order(L^p').
    PorousMedium,
    /// V = discrete W^{1,p}_0 normed by the L^p norm of the difference
    /// quotients, H = discrete L^2.
    PLaplace,
};

std::string_view to_string(TripleKind kind);

/// Discretised Gelfand triple V in H in V*.
///
/// Every dual vector w is stored nodally; its pairing with v in V is the
/// H-inner product <w, v>_H, which is how V* extends H.
struct TripleSpec {
    Grid1D grid;
    TripleKind kind = TripleKind::PorousMedium;
    double p = 2.0;
    /// Order of the Laplacian power that defines the porous-medium pivot space.
    double pivot_order = 1.0;

    /// Throws std::invalid_argument when p < 2, pivot_order is outside (0, 1],
    /// or the grid is empty.
    void validate() const;
};

/// <u, v>_H. PorousMedium: h u . L^-pivot v (Thomas solve for pivot 1, sine
/// basis otherwise). PLaplace: h u . v.
double h_inner(const TripleSpec& triple, std::span<const double> u, std::span<const double> v);
double norm_H(const TripleSpec& triple, std::span<const double> u);

/// <w, v>_{V*,V} evaluated through the V*-representation of w:
/// PorousMedium: w = L^pivot z with z computed in the sine eigenbasis, pairing
/// h z . v. PLaplace: w is rewritten as an edge flux Q with
/// h sum_i w_i v_i = h sum_e Q_e (D v)_e and paired against the difference
/// quotients of v. Agrees with h_inner up to rounding.
double dual_pairing(const TripleSpec& triple, std::span<const double> w, std::span<const double> v);

/// Forward difference quotients (D v)_e = (v_{e+1} - v_e) / h on the n+1 edges,
/// with zero ghost values at both ends.
std::vector<double> difference_quotients(const Grid1D& grid, std::span<const double> v);

double norm_V(const TripleSpec& triple, std::span<const double> v);

/// Dual norm sup_v <w, v> / ||v||_V, evaluated exactly:
/// PorousMedium: ||L^-pivot w||_{L^p'} (discrete Holder is sharp).
/// PLaplace: min over constants c of ||Q - c||_{L^p'} over edges, the
/// quotient norm dual to the zero-sum range of the difference operator.
double norm_Vstar(const TripleSpec& triple, std::span<const double> w);

/// Discrete L^q norm (h sum |v_i|^q)^(1/q).
double lq_norm(std::span<const double> v, double q, double h);

} // namespace fracmono::operators
