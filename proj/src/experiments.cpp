#include "lbfgsm/experiments.hpp"

#include "lbfgsm/random.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <utility>

namespace lbfgsm {

std::string_view to_string(ProblemId id) noexcept
{
    switch (id) {
    case ProblemId::rosenbrock: return "rosenbrock";
    case ProblemId::pwquad: return "pwquad";
    case ProblemId::ocp: return "ocp";
    }
    return "?";
}

ProblemId parse_problem(std::string_view name)
{
    if (name == "rosenbrock") return ProblemId::rosenbrock;
    if (name == "pwquad") return ProblemId::pwquad;
    if (name == "ocp") return ProblemId::ocp;
    throw std::invalid_argument("unknown problem '" + std::string(name) + "'");
}

ExperimentSpec ExperimentSpec::for_problem(ProblemId id)
{
    ExperimentSpec s;
    s.problem = id;
    switch (id) {
    case ProblemId::rosenbrock: s.grad_tol = 1e-9; break;
    case ProblemId::pwquad: s.grad_tol = 1e-5; break;
    case ProblemId::ocp:
        s.grad_tol = 1e-9;
        s.mt_sigma = 1e-8;
        break;
    }
    return s;
}

ExperimentSpec ExperimentSpec::table(std::string_view name)
{
    auto pairs_of = [](std::initializer_list<std::size_t> ms, LineSearchKind a, LineSearchKind b) {
        std::vector<RunSpec> out;
        for (auto m : ms) {
            out.push_back({m, a, Mode::cautious});
            out.push_back({m, b, Mode::cautious});
        }
        return out;
    };
    if (name == "t2") {
        auto s = for_problem(ProblemId::rosenbrock);
        s.configs = pairs_of({0, 1, 2, 3, 4}, LineSearchKind::armijo, LineSearchKind::more_thuente);
        return s;
    }
    if (name == "t3") {
        auto s = for_problem(ProblemId::pwquad);
        s.configs = pairs_of({0, 5, 10}, LineSearchKind::armijo, LineSearchKind::wolfe);
        return s;
    }
    if (name == "t4" || name == "t5") {
        auto s = for_problem(ProblemId::ocp);
        s.configs = pairs_of({0, 5, 10}, LineSearchKind::armijo, LineSearchKind::more_thuente);
        return s;
    }
    throw std::invalid_argument("unknown table '" + std::string(name) + "'");
}

SolverConfig make_config(const ExperimentSpec& spec, const RunSpec& run)
{
    SolverConfig c = SolverConfig::defaults(run.m, run.linesearch);
    c.mode = run.mode;
    c.cautious.c0 = spec.c0;
    c.cautious.c1 = spec.c1;
    if (spec.c2) c.cautious.c2 = *spec.c2;
    c.ls = spec.ls;
    if (run.linesearch == LineSearchKind::more_thuente && spec.mt_sigma) c.ls.sigma = *spec.mt_sigma;
    c.grad_tol = spec.grad_tol;
    c.max_iter = spec.max_iter;
    c.oracle_checks = spec.oracle_checks;
    return c;
}

std::unique_ptr<Problem> make_problem(const ExperimentSpec& spec)
{
    switch (spec.problem) {
    case ProblemId::rosenbrock: return std::make_unique<Rosenbrock>();
    case ProblemId::pwquad: return std::make_unique<PiecewiseQuadratic>(spec.pw_blocks);
    case ProblemId::ocp: return std::make_unique<OptimalControl>(OcpGrid::with_level(spec.mesh_j));
    }
    throw std::logic_error("make_problem: unhandled problem");
}

Vector default_start(const ExperimentSpec& spec, const Problem& problem)
{
    switch (spec.problem) {
    case ProblemId::rosenbrock: return Rosenbrock::start();
    case ProblemId::pwquad: return dynamic_cast<const PiecewiseQuadratic&>(problem).b();
    case ProblemId::ocp: return Vector::Zero(static_cast<Eigen::Index>(problem.space().dim()));
    }
    throw std::logic_error("default_start: unhandled problem");
}

namespace {

std::mutex reference_mutex;
std::map<std::size_t, Reference> ocp_references; // keyed by M; y_d and nu are the standard ones

} // namespace

Reference reference_solution(const ExperimentSpec& spec, const Problem& problem)
{
    switch (spec.problem) {
    case ProblemId::rosenbrock: return {Rosenbrock::minimizer(), 0.0, true};
    case ProblemId::pwquad: {
        const auto& pw = dynamic_cast<const PiecewiseQuadratic&>(problem);
        return {pw.minimizer(), pw.min_value(), true};
    }
    case ProblemId::ocp: break;
    }

    const auto& ocp = dynamic_cast<const OptimalControl&>(problem);
    const std::size_t M = ocp.grid().M;
    {
        const std::lock_guard lock{reference_mutex};
        if (auto it = ocp_references.find(M); it != ocp_references.end()) return it->second;
    }
    SolverConfig c = SolverConfig::defaults(10, LineSearchKind::armijo);
    c.grad_tol = 1e-12;
    const auto rep = minimize(problem, default_start(spec, problem), c);
    Reference ref{rep.x_final, rep.f_final, false};
    const std::lock_guard lock{reference_mutex};
    ocp_references.emplace(M, ref);
    return ref;
}

std::vector<TableRow> run_table(const ExperimentSpec& spec)
{
    std::vector<TableRow> rows;
    if (spec.configs.empty()) return rows;
    const auto problem = make_problem(spec);
    const Vector x0 = default_start(spec, *problem);
    const Reference ref = reference_solution(spec, *problem);
    for (const auto& run : spec.configs) {
        SolverConfig c = make_config(spec, run);
        c.keep_iterates = true;
        TableRow row{run, minimize(*problem, x0, c), {}};
        row.rates = q_factors(row.report, ref.f_star, ref.x_star, problem->space());
        row.report.iterates.clear(); // only needed for the rates
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string format_number(double v)
{
    char buf[64];
    if (v != 0.0 && std::isfinite(v) && std::abs(v) < 1e-3)
        std::snprintf(buf, sizeof buf, "%.3e", v);
    else
        std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void write_table_csv(std::ostream& out, const ExperimentSpec& spec, const std::vector<TableRow>& rows)
{
    out << "problem,linesearch,m,mode,status,it,f,P,alpha1,alpha_max,alpha_min,Qf,Qf3,Qx,Qx3,Qg,Qg3\n";
    for (const auto& r : rows) {
        const auto& c = r.report.counters;
        out << to_string(spec.problem) << ',' << to_string(r.run.linesearch) << ',' << r.run.m << ','
            << to_string(r.run.mode) << ',' << to_string(r.report.status) << ',' << c.iterations << ','
            << c.f_evals << ',' << c.pairs << ',' << c.unit_steps << ',' << format_number(c.alpha_max) << ','
            << format_number(c.alpha_min) << ',' << format_number(r.rates.qf.all) << ','
            << format_number(r.rates.qf.last3) << ',' << format_number(r.rates.qx.all) << ','
            << format_number(r.rates.qx.last3) << ',' << format_number(r.rates.qg.all) << ','
            << format_number(r.rates.qg.last3) << '\n';
    }
}

void write_trace_jsonl(std::ostream& out, const SolveReport& report)
{
    for (const auto& rec : report.trace) out << to_json(rec).dump() << '\n';
}

MeshStudy mesh_study(const ExperimentSpec& spec, const std::vector<unsigned>& levels)
{
    MeshStudy study;
    study.levels = levels;
    study.configs = spec.configs;
    const std::size_t nc = spec.configs.size();
    study.iterations.assign(nc, std::vector<long>(levels.size(), -1));
    study.all_unit_steps.assign(nc, std::vector<bool>(levels.size(), false));
    study.all_pairs_stored.assign(nc, std::vector<bool>(levels.size(), false));

    for (std::size_t l = 0; l < levels.size(); ++l) {
        ExperimentSpec level_spec = spec;
        level_spec.problem = ProblemId::ocp;
        level_spec.mesh_j = levels[l];
        const auto problem = make_problem(level_spec);
        const Vector x0 = default_start(level_spec, *problem);
        for (std::size_t c = 0; c < nc; ++c) {
            const auto rep = minimize(*problem, x0, make_config(level_spec, spec.configs[c]));
            if (!rep.converged()) continue;
            const auto& cnt = rep.counters;
            study.iterations[c][l] = static_cast<long>(cnt.iterations);
            study.all_unit_steps[c][l] = cnt.unit_steps == cnt.iterations;
            study.all_pairs_stored[c][l] = cnt.pairs == cnt.iterations;
        }
    }
    return study;
}

void write_mesh_csv(std::ostream& out, const MeshStudy& study)
{
    out << "linesearch,m";
    for (auto j : study.levels) out << ",j" << j;
    out << '\n';
    for (std::size_t c = 0; c < study.configs.size(); ++c) {
        out << to_string(study.configs[c].linesearch) << ',' << study.configs[c].m;
        for (std::size_t l = 0; l < study.levels.size(); ++l) {
            out << ',';
            if (study.iterations[c][l] >= 0) out << study.iterations[c][l];
            else out << "fail";
        }
        out << '\n';
    }
}

std::vector<RandomStartRow> random_start_study(const ExperimentSpec& spec, std::size_t n_runs,
                                               const std::optional<Vector>& fixed_start)
{
    if (spec.problem != ProblemId::pwquad)
        throw std::invalid_argument("random_start_study: defined for the piecewise quadratic");
    const auto problem = make_problem(spec);
    const auto dim = static_cast<Eigen::Index>(problem->space().dim());

    std::vector<RandomStartRow> rows;
    for (const auto& run : spec.configs) rows.push_back({run, 0, 0, 0.0});
    std::vector<double> iter_sum(rows.size(), 0.0);

    for (std::size_t r = 0; r < n_runs; ++r) {
        Vector x0;
        if (fixed_start) {
            x0 = *fixed_start;
        } else {
            CounterRng rng{spec.seed + r};
            x0.resize(dim);
            for (Eigen::Index i = 0; i < dim; ++i) x0[i] = rng.normal();
        }
        for (std::size_t c = 0; c < rows.size(); ++c) {
            const auto rep = minimize(*problem, x0, make_config(spec, rows[c].run));
            ++rows[c].runs;
            if (rep.converged()) {
                ++rows[c].successes;
                iter_sum[c] += static_cast<double>(rep.counters.iterations);
            }
        }
    }
    for (std::size_t c = 0; c < rows.size(); ++c)
        rows[c].mean_iterations = rows[c].successes ? iter_sum[c] / double(rows[c].successes) : 0.0;
    return rows;
}

void write_random_csv(std::ostream& out, const std::vector<RandomStartRow>& rows)
{
    out << "linesearch,m,mode,runs,successes,success_rate,mean_it\n";
    for (const auto& r : rows)
        out << to_string(r.run.linesearch) << ',' << r.run.m << ',' << to_string(r.run.mode) << ',' << r.runs << ','
            << r.successes << ',' << format_number(r.success_rate()) << ',' << format_number(r.mean_iterations)
            << '\n';
}

void write_grid_csv(std::ostream& out, const OcpGrid& grid, const Vector& control)
{
    const Vector state = ocp_state_solve(grid, control);
    const std::size_t n = grid.M - 1;
    const double h = 1.0 / static_cast<double>(grid.M);
    out << "i,j,x1,x2,y_d,y,u\n";
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const auto idx = static_cast<Eigen::Index>(i * n + j);
            out << i + 1 << ',' << j + 1 << ',' << format_number(double(i + 1) * h) << ','
                << format_number(double(j + 1) * h) << ',' << format_number(grid.y_d[idx]) << ','
                << format_number(state[idx]) << ',' << format_number(control[idx]) << '\n';
        }
    }
}

} // namespace lbfgsm
