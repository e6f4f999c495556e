#pragma once

#include "lbfgsm/linesearch.hpp"
#include "lbfgsm/problem.hpp"
#include "lbfgsm/secant_store.hpp"

#include <json.hpp>

#include <cstddef>
#include <deque>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lbfgsm {

enum class Mode {
    cautious,  ///< modified L-BFGS: pair filter q_j >= omega_k, gamma in [omega, 1/omega]
    classical, ///< L-BFGS / BB: all stored pairs, gamma = gamma^- unclamped
};

std::string_view to_string(Mode mode) noexcept;

struct SolverConfig {
    Mode mode = Mode::cautious;
    CautiousParams cautious;
    LineSearchKind linesearch = LineSearchKind::armijo;
    LineSearchParams ls;
    double grad_tol = 1e-9;
    std::size_t max_iter = 50000;
    /// Materialize H_k each iteration and audit its norms (dim <= oracle_max_dim).
    bool oracle_checks = false;
    std::size_t oracle_max_dim = 400;
    /// Keep x_0, ..., x_K in the report (needed for iterate q-factors).
    bool keep_iterates = false;
    /// Attach the storage scalars to each iteration record.
    bool record_storage = false;

    /// Memory m with the cautious constants c0 = 1e-4, c1 = 1, c2 = 1/(2m+3)
    /// and line-search constants sigma = 1e-4, beta = 0.5, eta = 0.9,
    /// maxfev = 20, stpmax = 1000, stpmin = 0, xtol = 1e-7.
    static SolverConfig defaults(std::size_t m, LineSearchKind ls);

    void validate() const;
};

struct IterationRecord {
    std::size_t k = 0;
    double f = 0.0;         ///< f(x_k)
    double grad_norm = 0.0; ///< |grad f(x_k)|
    double omega = 0.0;
    double gamma = 0.0;
    std::size_t n_active = 0;
    std::size_t n_stored = 0; ///< pairs in storage after the update
    double alpha = 0.0;
    double sy = 0.0;
    bool pair_stored = false;
    int n_feval_ls = 0;
    int n_geval_ls = 0;

    bool audited = false;
    double h_norm = 0.0;
    double h_inv_norm = 0.0;
    bool bounds_ok = true; ///< cautious-mode operator bounds (audited iterations only)

    nlohmann::json storage; ///< null unless record_storage
};

nlohmann::json to_json(const IterationRecord& rec);

enum class SolveStatus { converged, max_iter, linesearch_failure, nonfinite };

std::string_view to_string(SolveStatus status) noexcept;

/// Aggregate statistics of a run, recomputable from the trace.
struct Counters {
    std::size_t iterations = 0;  ///< K
    std::size_t f_evals = 0;     ///< objective evaluations in line searches
    std::size_t g_evals = 0;     ///< gradient evaluations, including x_0
    std::size_t pairs = 0;       ///< iterations that stored their pair
    std::size_t unit_steps = 0;  ///< iterations with alpha = 1
    double alpha_max = 0.0;
    double alpha_min = 0.0;
};

Counters recount(const std::vector<IterationRecord>& trace);

struct SolveReport {
    SolveStatus status = SolveStatus::converged;
    std::string message;
    Vector x_final;
    double f_final = 0.0;
    double grad_norm_final = 0.0;
    std::vector<IterationRecord> trace;
    std::vector<Vector> iterates; ///< x_0..x_K when keep_iterates
    Counters counters;
    std::size_t bound_violations = 0;
    std::vector<std::string> warnings;

    bool converged() const noexcept { return status == SolveStatus::converged; }
    /// f(x_0), ..., f(x_K).
    std::vector<double> objective_history() const;
    /// |grad f(x_0)|, ..., |grad f(x_K)|.
    std::vector<double> gradient_norm_history() const;
};

/// One run of the (cautious or classical) L-BFGS iteration. step() performs
/// a single pass of the loop body; minimize() drives it to termination.
class Solver {
  public:
    Solver(const Problem& problem, Vector x0, SolverConfig config);

    /// Performs one iteration and returns its record, or nullopt once the run
    /// has terminated (converged, iteration cap, or failure).
    std::optional<IterationRecord> step();

    bool finished() const noexcept { return status_.has_value(); }
    const Storage& storage() const noexcept { return store_; }
    const Vector& x() const noexcept { return x_; }
    const Vector& gradient() const noexcept { return g_; }

    /// Snapshot of the run so far (final once finished()).
    SolveReport report() const;

  private:
    void fail(SolveStatus status, std::string message);

    const Problem& problem_;
    const Space& space_;
    SolverConfig config_;
    Storage store_;

    Vector x_;
    Vector g_;
    double f_ = 0.0;
    std::size_t k_ = 0;
    std::size_t g_evals_ = 0;
    std::deque<double> f_window_;

    std::optional<SolveStatus> status_;
    std::string message_;
    std::vector<IterationRecord> trace_;
    std::vector<Vector> iterates_;
    std::size_t bound_violations_ = 0;
    std::vector<std::string> warnings_;
};

SolveReport minimize(const Problem& problem, const Vector& x0, const SolverConfig& config);

/// How two runs are compared by compare_traces.
struct TraceComparison {
    double rel_tol = 0.0;        ///< 0 demands bitwise-equal scalars
    bool compare_active = true;  ///< also compare the number of active pairs
};

/// First iteration at which gamma, alpha or the active-pair count differ, or
/// the trace length if only the final iterates differ; nullopt if identical.
std::optional<std::size_t> compare_traces(const SolveReport& a, const SolveReport& b,
                                          const TraceComparison& how = {});

} // namespace lbfgsm
