#pragma once

namespace fracmono::kernels {

/// One-parameter Mittag-Leffler function E_beta(z) = sum_k z^k / Gamma(beta k + 1)
/// for real z and beta in (0, 2].
///
/// Evaluation branches:
///  - closed forms for beta = 1 (exp) and beta = 2 (cos / cosh);
///  - power series in extended precision for z >= 0, for |z| <= 1, and for
///    beta >= 1 with |z| <= 10;
///  - for 0 < beta < 1 and -10 <= z < -1, the completely monotone Laplace-type
///    representation integrated by adaptive Gauss-Kronrod;
///  - for z < -10, the algebraic asymptotic expansion
///    -sum_k z^-k / Gamma(1 - beta k) (plus the decaying oscillatory pair for
///    beta in (1,2)).
///
/// Throws std::invalid_argument for beta outside (0,2] and std::overflow_error
/// when the result exceeds the double range.
double mittag_leffler(double beta, double z);

} // namespace fracmono::kernels
