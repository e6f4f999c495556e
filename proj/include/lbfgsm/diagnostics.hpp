#pragma once

#include "lbfgsm/solver.hpp"
#include "lbfgsm/space.hpp"

#include <cstddef>
#include <map>
#include <span>
#include <vector>

namespace lbfgsm {

/// Maximal quotient e_k / e_{k-1} over 1 <= k <= K, and over the final three.
struct QFactor {
    double all = 0.0;
    double last3 = 0.0;
    std::size_t skipped = 0; ///< quotients skipped for a zero denominator
};

/// Max of e_k / e_{k-1} for k = 1..K and for k = K-2..K. Quotients with a
/// zero denominator are skipped and counted.
QFactor q_factor(std::span<const double> errors);

struct LStep {
    bool holds = false;
    double kappa = 0.0;
};

struct RateReport {
    QFactor qf; ///< objective errors f(x_k) - f*
    QFactor qx; ///< iterate errors |x_k - x*|
    QFactor qg; ///< gradient norms |grad f(x_k)|
    std::map<std::size_t, LStep> lstep; ///< l -> l-step q-linear check on |x_k - x*|
};

/// Q-factors of a run against a reference solution. Iterate factors need
/// report.iterates (keep_iterates); without them qx stays zero.
RateReport q_factors(const SolveReport& report, double f_star, const Vector& x_star, const Space& space,
                     std::size_t max_l = 8);

/// kappa_l = max_{k >= k_start} e_{k+l} / e_k. holds iff kappa_l < 1 and the
/// sample shows decay toward zero, e_last <= min_decay * e_{k_start}; a finite
/// window cannot otherwise tell slow convergence from a positive limit.
/// Throws std::invalid_argument with fewer than l + 1 terms after k_start.
LStep lstep_qlinear(std::span<const double> errors, std::size_t l, std::size_t k_start = 0,
                    double min_decay = 1e-3);

/// Strong-convexity modulus, gradient Lipschitz constant and Armijo slope
/// governing the local linear rate.
struct RateConstants {
    double mu = 1.0;
    double L = 1.0;
    double sigma = 1e-4;
    double kappa() const noexcept { return L / mu; }
};

struct NuReport {
    std::vector<double> nu;        ///< nu_k = 1 - 2 sigma alpha_k mu / |H_k^{-1}|
    double nu_sup = 0.0;           ///< sup over k >= k1
    std::size_t checked = 0;       ///< iterations k >= k1 tested for the decrease estimate
    std::size_t held = 0;          ///< of those, where f_{k+1} - f* <= nu_k (f_k - f*)
    /// Per l = 1..5: fraction of k >= k1 with |x_{k+l} - x*| <= sqrt(kappa nu^l) |x_k - x*|
    /// (NaN when iterates were not kept) and with
    /// |g_{k+l}| <= kappa sqrt(nu^l) |g_k|.
    std::map<std::size_t, double> x_envelope;
    std::map<std::size_t, double> g_envelope;

    double fraction_held() const noexcept { return checked ? double(held) / double(checked) : 1.0; }
};

/// nu_k = 1 - 2 sigma alpha_k mu / |H_k^{-1}|.
double nu_value(double sigma, double alpha, double mu, double h_inv_norm);

/// Checks the q-linear objective estimate and the l-step envelopes on a run
/// audited with the dense oracle. `h_inv_norms` defaults to the audited
/// values in the trace when empty. Throws when norms are missing.
NuReport nu_check(const SolveReport& report, const RateConstants& constants, std::span<const double> h_inv_norms,
                  double f_star, std::size_t k1, const Vector* x_star = nullptr, const Space* space = nullptr);

} // namespace lbfgsm
