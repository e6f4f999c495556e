#include "lbfgsm/linesearch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace lbfgsm {

std::string_view to_string(LineSearchKind kind) noexcept
{
    switch (kind) {
    case LineSearchKind::armijo: return "armijo";
    case LineSearchKind::wolfe: return "wolfe";
    case LineSearchKind::more_thuente: return "mt";
    case LineSearchKind::gll: return "gll";
    }
    return "?";
}

LineSearchKind parse_linesearch(std::string_view name)
{
    if (name == "armijo") return LineSearchKind::armijo;
    if (name == "wolfe") return LineSearchKind::wolfe;
    if (name == "mt" || name == "more-thuente") return LineSearchKind::more_thuente;
    if (name == "gll") return LineSearchKind::gll;
    throw std::invalid_argument("unknown line search: " + std::string(name));
}

std::string_view to_string(LineSearchStatus status) noexcept
{
    switch (status) {
    case LineSearchStatus::success: return "success";
    case LineSearchStatus::maxfev: return "maxfev";
    case LineSearchStatus::stpmax: return "stpmax";
    case LineSearchStatus::stpmin: return "stpmin";
    case LineSearchStatus::xtol: return "xtol";
    case LineSearchStatus::rounding: return "rounding";
    }
    return "?";
}

void LineSearchParams::validate(LineSearchKind kind) const
{
    if (!(sigma > 0.0 && sigma < 1.0)) throw std::invalid_argument("line search: sigma must lie in (0, 1)");
    if (maxfev < 1) throw std::invalid_argument("line search: maxfev must be positive");
    switch (kind) {
    case LineSearchKind::armijo:
    case LineSearchKind::gll:
        if (!(beta1 > 0.0 && beta1 <= beta2 && beta2 < 1.0))
            throw std::invalid_argument("line search: need 0 < beta1 <= beta2 < 1");
        if (kind == LineSearchKind::gll && gll_memory < 1)
            throw std::invalid_argument("line search: gll memory must be >= 1");
        break;
    case LineSearchKind::wolfe:
    case LineSearchKind::more_thuente:
        if (!(eta > sigma && eta < 1.0)) throw std::invalid_argument("line search: need sigma < eta < 1");
        if (!(stpmin >= 0.0 && stpmax > stpmin))
            throw std::invalid_argument("line search: need 0 <= stpmin < stpmax");
        if (!(xtol >= 0.0)) throw std::invalid_argument("line search: xtol must be nonnegative");
        break;
    }
}

ScalarLine::ScalarLine(std::function<double(double)> phi, std::function<double(double)> dphi)
    : phi_{std::move(phi)}, dphi_{std::move(dphi)}
{}

double ScalarLine::value(double alpha) { return phi_(alpha); }

std::pair<double, double> ScalarLine::value_and_slope(double alpha)
{
    if (!dphi_) throw std::logic_error("ScalarLine: no derivative supplied");
    return {phi_(alpha), dphi_(alpha)};
}

namespace {

void require_descent(double dphi0)
{
    if (!(dphi0 < 0.0)) throw std::invalid_argument("line search: phi'(0) must be negative");
}

void certify(LineSearchOutcome& out, double phi0, double dphi0, const LineSearchParams& params)
{
    out.certificate.armijo = out.phi <= phi0 + out.alpha * params.sigma * dphi0;
    if (out.has_slope) {
        out.certificate.weak_curvature = out.dphi >= params.eta * dphi0;
        out.certificate.strong_curvature = std::abs(out.dphi) <= params.eta * std::abs(dphi0);
    }
}

LineSearchOutcome backtrack(LineFunction& line, double fref, double dphi0, const LineSearchParams& params)
{
    LineSearchOutcome out;
    out.dphi = std::numeric_limits<double>::quiet_NaN();
    double alpha = 1.0;
    while (out.n_feval < params.maxfev) {
        const double phi = line.value(alpha);
        ++out.n_feval;
        out.trials.push_back(alpha);
        out.alpha = alpha;
        out.phi = phi;
        if (phi <= fref + alpha * params.sigma * dphi0) return out;

        double next = params.beta1 * alpha;
        if (params.beta1 < params.beta2 && std::isfinite(phi)) {
            // Minimizer of the quadratic through phi(0), phi'(0), phi(alpha).
            const double curv = phi - fref - dphi0 * alpha;
            if (curv > 0.0) next = -dphi0 * alpha * alpha / (2.0 * curv);
            next = std::clamp(next, params.beta1 * alpha, params.beta2 * alpha);
        }
        alpha = next;
    }
    out.status = LineSearchStatus::maxfev;
    return out;
}

} // namespace

LineSearchOutcome armijo_backtrack(LineFunction& line, double phi0, double dphi0,
                                   const LineSearchParams& params)
{
    require_descent(dphi0);
    auto out = backtrack(line, phi0, dphi0, params);
    certify(out, phi0, dphi0, params);
    return out;
}

LineSearchOutcome gll_nonmonotone(LineFunction& line, double dphi0, std::span<const double> history,
                                  const LineSearchParams& params)
{
    require_descent(dphi0);
    if (history.empty()) throw std::invalid_argument("gll: history must be nonempty");
    const double fref = *std::max_element(history.begin(), history.end());
    auto out = backtrack(line, fref, dphi0, params);
    certify(out, history.back(), dphi0, params);
    out.certificate.nonmonotone = out.phi <= fref + out.alpha * params.sigma * dphi0;
    return out;
}

LineSearchOutcome wolfe_weak(LineFunction& line, double phi0, double dphi0,
                             const LineSearchParams& params)
{
    require_descent(dphi0);
    LineSearchOutcome out;
    out.has_slope = true;
    const double inf = std::numeric_limits<double>::infinity();
    double lo = 0.0;
    double hi = inf;
    double alpha = std::min(1.0, params.stpmax);

    while (true) {
        if (out.n_feval >= params.maxfev) {
            out.status = LineSearchStatus::maxfev;
            break;
        }
        const auto [phi, dphi] = line.value_and_slope(alpha);
        ++out.n_feval;
        ++out.n_geval;
        out.trials.push_back(alpha);
        out.alpha = alpha;
        out.phi = phi;
        out.dphi = dphi;

        if (!(phi <= phi0 + alpha * params.sigma * dphi0)) {
            hi = alpha;
        } else if (dphi < params.eta * dphi0) {
            lo = alpha;
        } else {
            break;
        }

        if (hi < inf) {
            alpha = 0.5 * (lo + hi);
        } else if (alpha >= params.stpmax) {
            out.status = LineSearchStatus::stpmax;
            break;
        } else {
            alpha = std::min(2.0 * alpha, params.stpmax);
        }
    }
    certify(out, phi0, dphi0, params);
    return out;
}

namespace {

// Safeguarded step of the More-Thuente search. (stx, fx, dx) is the best
// step so far, (sty, fy, dy) the other endpoint of the uncertainty interval,
// (stp, fp, dp) the current trial. Updates the interval and returns the next
// trial in stp. Returns false on inconsistent input.
struct StepState {
    double stx, fx, dx;
    double sty, fy, dy;
    bool brackt;
};

bool cstep(StepState& st, double& stp, double fp, double dp, double stpmin, double stpmax)
{
    double& stx = st.stx;
    double& fx = st.fx;
    double& dx = st.dx;
    double& sty = st.sty;
    double& fy = st.fy;
    double& dy = st.dy;

    if ((st.brackt && (stp <= std::min(stx, sty) || stp >= std::max(stx, sty))) ||
        dx * (stp - stx) >= 0.0 || stpmax < stpmin)
        return false;

    const double sgnd = dp * (dx / std::abs(dx));
    bool bound = false;
    double stpf = stp;

    if (fp > fx) {
        // Higher function value: the minimum is bracketed.
        bound = true;
        const double theta = 3.0 * (fx - fp) / (stp - stx) + dx + dp;
        const double s = std::max({std::abs(theta), std::abs(dx), std::abs(dp)});
        double gamma = s * std::sqrt((theta / s) * (theta / s) - (dx / s) * (dp / s));
        if (stp < stx) gamma = -gamma;
        const double p = (gamma - dx) + theta;
        const double q = ((gamma - dx) + gamma) + dp;
        const double stpc = stx + (p / q) * (stp - stx);
        const double stpq = stx + ((dx / ((fx - fp) / (stp - stx) + dx)) / 2.0) * (stp - stx);
        stpf = std::abs(stpc - stx) < std::abs(stpq - stx) ? stpc : stpc + (stpq - stpc) / 2.0;
        st.brackt = true;
    } else if (sgnd < 0.0) {
        // Lower function value, derivatives of opposite sign.
        const double theta = 3.0 * (fx - fp) / (stp - stx) + dx + dp;
        const double s = std::max({std::abs(theta), std::abs(dx), std::abs(dp)});
        double gamma = s * std::sqrt((theta / s) * (theta / s) - (dx / s) * (dp / s));
        if (stp > stx) gamma = -gamma;
        const double p = (gamma - dp) + theta;
        const double q = ((gamma - dp) + gamma) + dx;
        const double stpc = stp + (p / q) * (stx - stp);
        const double stpq = stp + (dp / (dp - dx)) * (stx - stp);
        stpf = std::abs(stpc - stp) > std::abs(stpq - stp) ? stpc : stpq;
        st.brackt = true;
    } else if (std::abs(dp) < std::abs(dx)) {
        // Lower function value, same sign, derivative magnitude decreases.
        bound = true;
        const double theta = 3.0 * (fx - fp) / (stp - stx) + dx + dp;
        const double s = std::max({std::abs(theta), std::abs(dx), std::abs(dp)});
        // gamma = 0 only if the cubic does not tend to infinity along the step.
        double gamma = s * std::sqrt(std::max(0.0, (theta / s) * (theta / s) - (dx / s) * (dp / s)));
        if (stp > stx) gamma = -gamma;
        const double p = (gamma - dp) + theta;
        const double q = (gamma + (dx - dp)) + gamma;
        const double r = p / q;
        double stpc;
        if (r < 0.0 && gamma != 0.0)
            stpc = stp + r * (stx - stp);
        else if (stp > stx)
            stpc = stpmax;
        else
            stpc = stpmin;
        const double stpq = stp + (dp / (dp - dx)) * (stx - stp);
        if (st.brackt)
            stpf = std::abs(stp - stpc) < std::abs(stp - stpq) ? stpc : stpq;
        else
            stpf = std::abs(stp - stpc) > std::abs(stp - stpq) ? stpc : stpq;
    } else {
        // Lower function value, same sign, derivative magnitude does not decrease.
        if (st.brackt) {
            const double theta = 3.0 * (fp - fy) / (sty - stp) + dy + dp;
            const double s = std::max({std::abs(theta), std::abs(dy), std::abs(dp)});
            double gamma = s * std::sqrt((theta / s) * (theta / s) - (dy / s) * (dp / s));
            if (stp > sty) gamma = -gamma;
            const double p = (gamma - dp) + theta;
            const double q = ((gamma - dp) + gamma) + dy;
            stpf = stp + (p / q) * (sty - stp);
        } else if (stp > stx) {
            stpf = stpmax;
        } else {
            stpf = stpmin;
        }
    }

    if (fp > fx) {
        sty = stp;
        fy = fp;
        dy = dp;
    } else {
        if (sgnd < 0.0) {
            sty = stx;
            fy = fx;
            dy = dx;
        }
        stx = stp;
        fx = fp;
        dx = dp;
    }

    stpf = std::max(stpmin, std::min(stpmax, stpf));
    stp = stpf;
    if (st.brackt && bound) {
        if (sty > stx)
            stp = std::min(stx + 0.66 * (sty - stx), stp);
        else
            stp = std::max(stx + 0.66 * (sty - stx), stp);
    }
    return true;
}

} // namespace

LineSearchOutcome more_thuente(LineFunction& line, double phi0, double dphi0,
                               const LineSearchParams& params, double alpha0)
{
    require_descent(dphi0);
    if (!(alpha0 > 0.0)) throw std::invalid_argument("more_thuente: initial step must be positive");
    constexpr double xtrapf = 4.0;

    LineSearchOutcome out;
    out.has_slope = true;

    const double ftol = params.sigma;
    const double gtol = params.eta;
    const double dgtest = ftol * dphi0;
    double width = params.stpmax - params.stpmin;
    double width1 = 2.0 * width;

    StepState st{0.0, phi0, dphi0, 0.0, phi0, dphi0, false};
    bool stage1 = true;
    bool infoc = true;
    double stp = alpha0;

    while (true) {
        double stmin, stmax;
        if (st.brackt) {
            stmin = std::min(st.stx, st.sty);
            stmax = std::max(st.stx, st.sty);
        } else {
            stmin = st.stx;
            stmax = stp + xtrapf * (stp - st.stx);
        }

        stp = std::max(stp, params.stpmin);
        stp = std::min(stp, params.stpmax);

        // Unusual termination ahead: fall back to the best step obtained.
        if ((st.brackt && (stp <= stmin || stp >= stmax)) || out.n_feval >= params.maxfev - 1 || !infoc ||
            (st.brackt && stmax - stmin <= params.xtol * stmax))
            stp = st.stx;

        const auto [f, dg] = line.value_and_slope(stp);
        ++out.n_feval;
        ++out.n_geval;
        out.trials.push_back(stp);
        out.alpha = stp;
        out.phi = f;
        out.dphi = dg;

        const double ftest1 = phi0 + stp * dgtest;
        bool done = false;
        LineSearchStatus status = LineSearchStatus::success;
        if ((st.brackt && (stp <= stmin || stp >= stmax)) || !infoc) {
            status = LineSearchStatus::rounding;
            done = true;
        }
        if (stp == params.stpmax && f <= ftest1 && dg <= dgtest) {
            status = LineSearchStatus::stpmax;
            done = true;
        }
        if (stp == params.stpmin && (f > ftest1 || dg >= dgtest)) {
            status = LineSearchStatus::stpmin;
            done = true;
        }
        if (out.n_feval >= params.maxfev) {
            status = LineSearchStatus::maxfev;
            done = true;
        }
        if (st.brackt && stmax - stmin <= params.xtol * stmax) {
            status = LineSearchStatus::xtol;
            done = true;
        }
        if (f <= ftest1 && std::abs(dg) <= gtol * (-dphi0)) {
            status = LineSearchStatus::success;
            done = true;
        }
        if (done) {
            out.status = status;
            break;
        }

        if (stage1 && f <= ftest1 && dg >= std::min(ftol, gtol) * dphi0) stage1 = false;

        if (stage1 && f <= st.fx && f > ftest1) {
            // Work with the modified function psi(a) = phi(a) - phi(0) - ftol a phi'(0)
            // until a step with nonpositive psi and nonnegative psi' is found.
            StepState mod{st.stx, st.fx - st.stx * dgtest, st.dx - dgtest,
                          st.sty, st.fy - st.sty * dgtest, st.dy - dgtest, st.brackt};
            infoc = cstep(mod, stp, f - stp * dgtest, dg - dgtest, stmin, stmax);
            st.stx = mod.stx;
            st.sty = mod.sty;
            st.fx = mod.fx + mod.stx * dgtest;
            st.fy = mod.fy + mod.sty * dgtest;
            st.dx = mod.dx + dgtest;
            st.dy = mod.dy + dgtest;
            st.brackt = mod.brackt;
        } else {
            infoc = cstep(st, stp, f, dg, stmin, stmax);
        }

        // Force sufficient decrease of the interval width.
        if (st.brackt) {
            if (std::abs(st.sty - st.stx) >= 0.66 * width1) stp = st.stx + 0.5 * (st.sty - st.stx);
            width1 = width;
            width = std::abs(st.sty - st.stx);
        }
    }

    certify(out, phi0, dphi0, params);
    return out;
}

} // namespace lbfgsm
