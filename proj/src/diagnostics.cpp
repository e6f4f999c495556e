#include "lbfgsm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lbfgsm {

QFactor q_factor(std::span<const double> errors)
{
    QFactor q;
    const std::size_t K = errors.empty() ? 0 : errors.size() - 1;
    q.all = -std::numeric_limits<double>::infinity();
    q.last3 = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= K; ++k) {
        if (errors[k - 1] == 0.0) {
            ++q.skipped;
            continue;
        }
        const double ratio = errors[k] / errors[k - 1];
        q.all = std::max(q.all, ratio);
        if (k + 2 >= K) q.last3 = std::max(q.last3, ratio);
    }
    if (!std::isfinite(q.all)) q.all = std::numeric_limits<double>::quiet_NaN();
    if (!std::isfinite(q.last3)) q.last3 = std::numeric_limits<double>::quiet_NaN();
    return q;
}

LStep lstep_qlinear(std::span<const double> errors, std::size_t l, std::size_t k_start, double min_decay)
{
    if (l < 1) throw std::invalid_argument("lstep_qlinear: l must be >= 1");
    if (errors.size() < k_start + l + 1) throw std::invalid_argument("lstep_qlinear: sequence too short");
    LStep out;
    out.kappa = -std::numeric_limits<double>::infinity();
    for (std::size_t k = k_start; k + l < errors.size(); ++k) {
        if (!(errors[k] > 0.0)) throw std::invalid_argument("lstep_qlinear: errors must be positive");
        out.kappa = std::max(out.kappa, errors[k + l] / errors[k]);
    }
    if (!(errors.back() > 0.0)) throw std::invalid_argument("lstep_qlinear: errors must be positive");
    out.holds = out.kappa < 1.0 && errors.back() <= min_decay * errors[k_start];
    return out;
}

RateReport q_factors(const SolveReport& report, double f_star, const Vector& x_star, const Space& space,
                     std::size_t max_l)
{
    RateReport rep;
    std::vector<double> ef;
    for (double f : report.objective_history()) ef.push_back(f - f_star);
    rep.qf = q_factor(ef);
    rep.qg = q_factor(report.gradient_norm_history());

    if (!report.iterates.empty()) {
        std::vector<double> ex;
        for (const auto& x : report.iterates) ex.push_back(space.norm(x - x_star));
        rep.qx = q_factor(ex);
        // Trailing zeros (exact solution) end the positive part of the sequence.
        while (!ex.empty() && ex.back() == 0.0) ex.pop_back();
        for (std::size_t l = 1; l <= max_l && ex.size() >= l + 1; ++l) {
            if (std::find(ex.begin(), ex.end(), 0.0) != ex.end()) break;
            rep.lstep[l] = lstep_qlinear(ex, l, 0);
        }
    }
    return rep;
}

double nu_value(double sigma, double alpha, double mu, double h_inv_norm)
{
    return 1.0 - 2.0 * sigma * alpha * mu / h_inv_norm;
}

NuReport nu_check(const SolveReport& report, const RateConstants& constants, std::span<const double> h_inv_norms,
                  double f_star, std::size_t k1, const Vector* x_star, const Space* space)
{
    const auto& trace = report.trace;
    std::vector<double> norms(h_inv_norms.begin(), h_inv_norms.end());
    if (norms.empty()) {
        for (const auto& r : trace) {
            if (!r.audited) throw std::invalid_argument("nu_check: trace lacks operator norms");
            norms.push_back(r.h_inv_norm);
        }
    }
    if (norms.size() < trace.size()) throw std::invalid_argument("nu_check: missing operator norms");

    NuReport rep;
    const auto fh = report.objective_history();
    rep.nu.resize(trace.size());
    rep.nu_sup = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < trace.size(); ++k) {
        rep.nu[k] = nu_value(constants.sigma, trace[k].alpha, constants.mu, norms[k]);
        if (k < k1) continue;
        rep.nu_sup = std::max(rep.nu_sup, rep.nu[k]);
        ++rep.checked;
        if (fh[k + 1] - f_star <= rep.nu[k] * (fh[k] - f_star)) ++rep.held;
    }

    const double kappa = constants.kappa();
    const auto gh = report.gradient_norm_history();
    std::vector<double> ex;
    if (x_star && space && !report.iterates.empty())
        for (const auto& x : report.iterates) ex.push_back(space->norm(x - *x_star));

    for (std::size_t l = 1; l <= 5; ++l) {
        const double nul = std::pow(rep.nu_sup, static_cast<double>(l));
        std::size_t n = 0, okx = 0, okg = 0;
        for (std::size_t k = k1; k + l < gh.size(); ++k) {
            ++n;
            if (gh[k + l] <= kappa * std::sqrt(nul) * gh[k]) ++okg;
            if (!ex.empty() && ex[k + l] <= std::sqrt(kappa * nul) * ex[k]) ++okx;
        }
        const double denom = n ? double(n) : 1.0;
        rep.g_envelope[l] = n ? double(okg) / denom : 1.0;
        rep.x_envelope[l] = ex.empty() ? std::numeric_limits<double>::quiet_NaN() : (n ? double(okx) / denom : 1.0);
    }
    return rep;
}

} // namespace lbfgsm
