#pragma once

#include "lbfgsm/secant_store.hpp"
#include "lbfgsm/space.hpp"

#include <cstddef>
#include <span>

namespace lbfgsm {

/// d = -H grad, where H is the L-BFGS operator built from the seed gamma*I
/// and `active` (oldest first, so the newest pair is the outermost update).
/// All scalar products are taken in `space`.
Vector two_loop(const Space& space, std::span<const SecantPair* const> active, double gamma,
                const Vector& grad);

/// Largest dimension for which the dense oracles will materialize matrices.
inline constexpr std::size_t kDenseOracleMaxDim = 2000;

/// Explicit matrix of the inverse update recursion
///   H^{(j+1)} = V_j^* H^{(j)} V_j + rho_j s_j s_j^*,  V_j = I - rho_j y_j s_j^*,
/// with H^{(0)} = gamma*I and adjoints taken in the weighted product.
Matrix dense_H(const Space& space, std::span<const SecantPair* const> pairs, double gamma);

/// Explicit matrix of the direct update recursion
///   B^{(j+1)} = B - (B s)(B s)^* / (B s, s) + y y^* / (y, s),
/// with B^{(0)} = gamma^{-1} I. Inverse of dense_H on the same inputs.
Matrix dense_B(const Space& space, std::span<const SecantPair* const> pairs, double gamma);

/// Adjoint of a matrix operator with respect to the weighted product.
Matrix weighted_adjoint(const Space& space, const Matrix& M);

/// Operator norms of a self-adjoint positive definite operator.
struct OperatorNorms {
    double norm = 0.0;     ///< |H|, largest eigenvalue
    double inv_norm = 0.0; ///< |H^{-1}|, reciprocal of the smallest eigenvalue
};

/// Norms induced by the weighted product; H must be self-adjoint in `space`.
OperatorNorms operator_norms(const Space& space, const Matrix& H);

/// Result of auditing an L-BFGS operator against its a priori bounds.
struct BoundsReport {
    OperatorNorms norms;
    double inv_bound = 0.0; ///< |(H0)^{-1}| + M kappa2
    double norm_bound = 0.0; ///< 5^M max{1,|H0|} max{1, kappa1^M, (kappa1 kappa2)^M}
    bool inv_ok = false;
    bool norm_ok = false;
    bool ok() const noexcept { return inv_ok && norm_ok; }
};

/// Checks H (built from M pairs and seed gamma*I, with (s,y)/(s,s) >= 1/kappa1
/// and (s,y)/(y,y) >= 1/kappa2 for every pair) against the two a priori
/// bounds on |H^{-1}| and |H|.
BoundsReport check_bounds(const Space& space, const Matrix& H, double gamma, double kappa1,
                          double kappa2, std::size_t M);

/// Bounds valid along a cautious run: |H_k^{-1}| <= (m+1)/omega_k and
/// |H_k| <= 5^m max{1, omega_k^{-(2m+1)}}.
struct CautiousBounds {
    double inv_bound;
    double norm_bound;
};
CautiousBounds cautious_bounds(double omega_k, std::size_t m);

/// Comparison with a relative allowance of a few ulps for eigenvalue rounding.
bool within_bound(double value, double bound) noexcept;

} // namespace lbfgsm
