#pragma once

#include "lbfgsm/diagnostics.hpp"
#include "lbfgsm/problems.hpp"
#include "lbfgsm/solver.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lbfgsm {

enum class ProblemId { rosenbrock, pwquad, ocp };

std::string_view to_string(ProblemId id) noexcept;
ProblemId parse_problem(std::string_view name);

/// One row of an experiment: memory size, line search and method variant.
struct RunSpec {
    std::size_t m = 2;
    LineSearchKind linesearch = LineSearchKind::armijo;
    Mode mode = Mode::cautious;
};

struct ExperimentSpec {
    ProblemId problem = ProblemId::rosenbrock;
    std::size_t pw_blocks = 100; ///< N for pwquad (d = 3N)
    unsigned mesh_j = 4;         ///< ocp grid M = 2^j
    std::vector<RunSpec> configs;

    double grad_tol = 1e-9;
    std::size_t max_iter = 50000;
    LineSearchParams ls;
    /// Armijo slope for More-Thuente; unset means ls.sigma.
    std::optional<double> mt_sigma;
    double c0 = 1e-4;
    double c1 = 1.0;
    /// Unset means c2 = 1/(2m+3) per row.
    std::optional<double> c2;
    bool oracle_checks = false;
    std::uint64_t seed = 1;

    /// Presets: "t2" (Rosenbrock), "t3" (piecewise quadratic), "t4" (control
    /// problem, one mesh), "t5" (control problem, mesh study configurations).
    static ExperimentSpec table(std::string_view name);
    /// Problem defaults (tolerance, MT slope) with an empty configuration list.
    static ExperimentSpec for_problem(ProblemId id);
};

SolverConfig make_config(const ExperimentSpec& spec, const RunSpec& run);
std::unique_ptr<Problem> make_problem(const ExperimentSpec& spec);
/// x_0: (-1.2, 1) for Rosenbrock, b for pwquad, 0 for the control problem.
Vector default_start(const ExperimentSpec& spec, const Problem& problem);

struct Reference {
    Vector x_star;
    double f_star = 0.0;
    bool exact = false; ///< analytic, as opposed to a tight-tolerance run
};

/// Analytic solution where known, else an LBFGSM run (m = 10, Armijo) to
/// |grad f| <= 1e-12, cached per mesh.
Reference reference_solution(const ExperimentSpec& spec, const Problem& problem);

struct TableRow {
    RunSpec run;
    SolveReport report;
    RateReport rates;
};

std::vector<TableRow> run_table(const ExperimentSpec& spec);

/// |v| < 1e-3 (nonzero) in scientific notation, else shortest %g form.
std::string format_number(double v);

/// Columns: problem,linesearch,m,mode,status,it,f,P,alpha1,alpha_max,alpha_min,
/// Qf,Qf3,Qx,Qx3,Qg,Qg3
void write_table_csv(std::ostream& out, const ExperimentSpec& spec, const std::vector<TableRow>& rows);

/// One JSON object per iteration record.
void write_trace_jsonl(std::ostream& out, const SolveReport& report);

struct MeshStudy {
    std::vector<unsigned> levels;
    std::vector<RunSpec> configs;
    /// iterations[c][l]; -1 marks a failed cell.
    std::vector<std::vector<long>> iterations;
    std::vector<std::vector<bool>> all_unit_steps;
    std::vector<std::vector<bool>> all_pairs_stored;
};

MeshStudy mesh_study(const ExperimentSpec& spec, const std::vector<unsigned>& levels);
void write_mesh_csv(std::ostream& out, const MeshStudy& study);

struct RandomStartRow {
    RunSpec run;
    std::size_t runs = 0;
    std::size_t successes = 0;
    double mean_iterations = 0.0;
    double success_rate() const noexcept { return runs ? double(successes) / double(runs) : 0.0; }
};

/// Runs every configuration of `spec` (pwquad) from n_runs standard-normal
/// starts; start r draws from CounterRng(seed + r). With fixed_start, every
/// run starts there instead.
std::vector<RandomStartRow> random_start_study(const ExperimentSpec& spec, std::size_t n_runs,
                                               const std::optional<Vector>& fixed_start = std::nullopt);
void write_random_csv(std::ostream& out, const std::vector<RandomStartRow>& rows);

/// Nodes of a control-problem grid with y_d, state and control per node.
void write_grid_csv(std::ostream& out, const OcpGrid& grid, const Vector& control);

} // namespace lbfgsm
