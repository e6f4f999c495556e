#include "lbfgsm/solver.hpp"

#include "lbfgsm/direction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lbfgsm {

std::string_view to_string(Mode mode) noexcept
{
    return mode == Mode::cautious ? "cautious" : "classical";
}

std::string_view to_string(SolveStatus status) noexcept
{
    switch (status) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iter: return "max_iter";
    case SolveStatus::linesearch_failure: return "linesearch_failure";
    case SolveStatus::nonfinite: return "nonfinite";
    }
    return "?";
}

SolverConfig SolverConfig::defaults(std::size_t m, LineSearchKind ls)
{
    SolverConfig c;
    c.cautious = CautiousParams::defaults_for(m);
    c.linesearch = ls;
    return c;
}

void SolverConfig::validate() const
{
    cautious.validate();
    ls.validate(linesearch);
    if (!(grad_tol > 0.0)) throw std::invalid_argument("solver: grad_tol must be positive");
    if (max_iter < 1) throw std::invalid_argument("solver: max_iter must be >= 1");
}

nlohmann::json to_json(const IterationRecord& rec)
{
    nlohmann::json j = {
        {"k", rec.k},
        {"f", rec.f},
        {"grad_norm", rec.grad_norm},
        {"omega", rec.omega},
        {"gamma", rec.gamma},
        {"n_active", rec.n_active},
        {"n_stored", rec.n_stored},
        {"alpha", rec.alpha},
        {"sy", rec.sy},
        {"pair_stored", rec.pair_stored},
        {"n_feval_ls", rec.n_feval_ls},
        {"n_geval_ls", rec.n_geval_ls},
    };
    if (rec.audited) {
        j["h_norm"] = rec.h_norm;
        j["h_inv_norm"] = rec.h_inv_norm;
        j["bounds_ok"] = rec.bounds_ok;
    }
    if (!rec.storage.is_null()) j["storage"] = rec.storage;
    return j;
}

Counters recount(const std::vector<IterationRecord>& trace)
{
    Counters c;
    c.iterations = trace.size();
    c.g_evals = 1;
    if (trace.empty()) return c;
    c.alpha_max = -std::numeric_limits<double>::infinity();
    c.alpha_min = std::numeric_limits<double>::infinity();
    for (const auto& r : trace) {
        c.f_evals += static_cast<std::size_t>(r.n_feval_ls);
        c.g_evals += static_cast<std::size_t>(r.n_geval_ls);
        c.pairs += r.pair_stored ? 1 : 0;
        c.unit_steps += r.alpha == 1.0 ? 1 : 0;
        c.alpha_max = std::max(c.alpha_max, r.alpha);
        c.alpha_min = std::min(c.alpha_min, r.alpha);
    }
    return c;
}

std::vector<double> SolveReport::objective_history() const
{
    std::vector<double> out;
    out.reserve(trace.size() + 1);
    for (const auto& r : trace) out.push_back(r.f);
    out.push_back(f_final);
    return out;
}

std::vector<double> SolveReport::gradient_norm_history() const
{
    std::vector<double> out;
    out.reserve(trace.size() + 1);
    for (const auto& r : trace) out.push_back(r.grad_norm);
    out.push_back(grad_norm_final);
    return out;
}

namespace {

bool all_finite(const Vector& v) { return v.allFinite(); }

// phi(a) = f(x + a d). Remembers the last trial so the accepted point's
// gradient is not recomputed when the search already evaluated it.
class RayLine final : public LineFunction {
  public:
    RayLine(const Problem& problem, const Vector& x, const Vector& d)
        : problem_{problem}, space_{problem.space()}, x_{x}, d_{d}
    {}

    double value(double alpha) override
    {
        point_ = x_ + alpha * d_;
        last_alpha_ = alpha;
        has_grad_ = false;
        return problem_.value(point_);
    }

    std::pair<double, double> value_and_slope(double alpha) override
    {
        point_ = x_ + alpha * d_;
        last_alpha_ = alpha;
        const double f = problem_.value_and_gradient(point_, grad_);
        has_grad_ = true;
        return {f, space_.inner(grad_, d_)};
    }

    bool has_gradient_at(double alpha) const { return has_grad_ && last_alpha_ == alpha; }
    const Vector& gradient() const { return grad_; }

  private:
    const Problem& problem_;
    const Space& space_;
    const Vector& x_;
    const Vector& d_;
    Vector point_;
    Vector grad_;
    double last_alpha_ = std::numeric_limits<double>::quiet_NaN();
    bool has_grad_ = false;
};

} // namespace

Solver::Solver(const Problem& problem, Vector x0, SolverConfig config)
    : problem_{problem}, space_{problem.space()}, config_{std::move(config)}, store_{config_.cautious.m},
      x_{std::move(x0)}
{
    config_.validate();
    space_.check(x_);

    const bool armijo_like =
        config_.linesearch == LineSearchKind::armijo || config_.linesearch == LineSearchKind::gll;
    if (config_.mode == Mode::cautious && !config_.cautious.satisfies_rate_calibration(armijo_like))
        warnings_.push_back("c2 exceeds the calibration bound for the linear rate");

    f_ = problem_.value_and_gradient(x_, g_);
    g_evals_ = 1;
    f_window_.push_back(f_);
    if (config_.keep_iterates) iterates_.push_back(x_);
    if (!std::isfinite(f_) || !all_finite(g_)) fail(SolveStatus::nonfinite, "nonfinite objective at x0");
}

void Solver::fail(SolveStatus status, std::string message)
{
    status_ = status;
    message_ = std::move(message);
}

std::optional<IterationRecord> Solver::step()
{
    if (status_) return std::nullopt;

    const double gnorm = space_.norm(g_);
    if (gnorm <= config_.grad_tol) {
        fail(SolveStatus::converged, "");
        return std::nullopt;
    }
    if (k_ >= config_.max_iter) {
        fail(SolveStatus::max_iter, "iteration limit reached");
        return std::nullopt;
    }

    IterationRecord rec;
    rec.k = k_;
    rec.f = f_;
    rec.grad_norm = gnorm;
    rec.omega = omega(gnorm, config_.cautious);

    const bool cautious = config_.mode == Mode::cautious;
    rec.gamma = cautious ? choose_gamma(store_, rec.omega) : choose_gamma_classical(store_);
    const auto active = cautious ? active_pairs(store_, rec.omega) : all_pairs(store_);
    rec.n_active = active.size();

    const Vector d = two_loop(space_, active, rec.gamma, g_);

    if (config_.oracle_checks && space_.dim() <= config_.oracle_max_dim) {
        const Matrix H = dense_H(space_, active, rec.gamma);
        const auto norms = operator_norms(space_, H);
        rec.audited = true;
        rec.h_norm = norms.norm;
        rec.h_inv_norm = norms.inv_norm;
        if (cautious) {
            const auto b = cautious_bounds(rec.omega, config_.cautious.m);
            rec.bounds_ok = within_bound(norms.inv_norm, b.inv_bound) && within_bound(norms.norm, b.norm_bound);
            if (!rec.bounds_ok) ++bound_violations_;
        }
    }

    const double dphi0 = space_.inner(g_, d);
    if (!(dphi0 < 0.0)) {
        fail(SolveStatus::linesearch_failure, "search direction is not a descent direction");
        return std::nullopt;
    }

    RayLine line{problem_, x_, d};
    LineSearchOutcome ls;
    switch (config_.linesearch) {
    case LineSearchKind::armijo: ls = armijo_backtrack(line, f_, dphi0, config_.ls); break;
    case LineSearchKind::wolfe: ls = wolfe_weak(line, f_, dphi0, config_.ls); break;
    case LineSearchKind::more_thuente: ls = more_thuente(line, f_, dphi0, config_.ls); break;
    case LineSearchKind::gll: {
        const std::vector<double> hist(f_window_.begin(), f_window_.end());
        ls = gll_nonmonotone(line, dphi0, hist, config_.ls);
        break;
    }
    }
    g_evals_ += static_cast<std::size_t>(ls.n_geval);
    if (!ls.ok()) {
        fail(SolveStatus::linesearch_failure,
             "line search " + std::string(to_string(config_.linesearch)) + " ended with status " +
                 std::string(to_string(ls.status)) + " at k = " + std::to_string(k_));
        return std::nullopt;
    }

    rec.alpha = ls.alpha;
    rec.n_feval_ls = ls.n_feval;
    rec.n_geval_ls = ls.n_geval;

    const Vector s = ls.alpha * d;
    Vector x_new = x_ + s;
    Vector g_new;
    double f_new = ls.phi;
    if (line.has_gradient_at(ls.alpha)) {
        g_new = line.gradient();
    } else {
        f_new = problem_.value_and_gradient(x_new, g_new);
        ++g_evals_;
        ++rec.n_geval_ls;
    }
    if (!std::isfinite(f_new) || !all_finite(g_new)) {
        x_ = std::move(x_new);
        fail(SolveStatus::nonfinite, "nonfinite objective or gradient at k = " + std::to_string(k_ + 1));
        return std::nullopt;
    }

    const Vector y = g_new - g_;
    rec.sy = space_.inner(s, y);
    rec.pair_stored = store_.push(space_, s, y, k_);
    rec.n_stored = store_.size();
    if (config_.record_storage) rec.storage = storage_to_json(store_);

    x_ = std::move(x_new);
    g_ = std::move(g_new);
    f_ = f_new;
    ++k_;

    f_window_.push_back(f_);
    while (f_window_.size() > static_cast<std::size_t>(std::max(1, config_.ls.gll_memory))) f_window_.pop_front();
    if (config_.keep_iterates) iterates_.push_back(x_);

    trace_.push_back(rec);
    return rec;
}

SolveReport Solver::report() const
{
    SolveReport r;
    r.status = status_.value_or(SolveStatus::max_iter);
    r.message = message_;
    r.x_final = x_;
    r.f_final = f_;
    r.grad_norm_final = g_.size() == x_.size() ? space_.norm(g_) : std::numeric_limits<double>::quiet_NaN();
    r.trace = trace_;
    r.iterates = iterates_;
    r.counters = recount(trace_);
    r.counters.g_evals = g_evals_;
    r.bound_violations = bound_violations_;
    r.warnings = warnings_;
    return r;
}

SolveReport minimize(const Problem& problem, const Vector& x0, const SolverConfig& config)
{
    Solver solver{problem, x0, config};
    while (solver.step()) {
    }
    return solver.report();
}

namespace {

bool same(double a, double b, double rel_tol)
{
    if (a == b) return true;
    if (rel_tol == 0.0) return false;
    return std::abs(a - b) <= rel_tol * std::max(std::abs(a), std::abs(b));
}

} // namespace

std::optional<std::size_t> compare_traces(const SolveReport& a, const SolveReport& b, const TraceComparison& how)
{
    const std::size_t n = std::min(a.trace.size(), b.trace.size());
    for (std::size_t k = 0; k < n; ++k) {
        const auto& ra = a.trace[k];
        const auto& rb = b.trace[k];
        if (!same(ra.gamma, rb.gamma, how.rel_tol) || !same(ra.alpha, rb.alpha, how.rel_tol) ||
            (how.compare_active && ra.n_active != rb.n_active))
            return k;
    }
    if (a.trace.size() != b.trace.size()) return n;
    if (a.x_final.size() != b.x_final.size()) return n;
    for (Eigen::Index i = 0; i < a.x_final.size(); ++i)
        if (!same(a.x_final[i], b.x_final[i], how.rel_tol)) return n;
    return std::nullopt;
}

} // namespace lbfgsm
