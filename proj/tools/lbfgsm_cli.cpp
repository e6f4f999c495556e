#include "lbfgsm/experiments.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

using namespace lbfgsm;

namespace {

struct Options {
    std::string problem = "rosenbrock";
    std::size_t blocks = 100;
    unsigned mesh_j = 4;
    std::size_t m = 2;
    std::string ls = "armijo";
    int gll_mem = 10;
    std::optional<double> tol, c0, c1, c2, sigma, eta, beta;
    bool classic = false;
    std::size_t max_iter = 50000;
    std::uint64_t seed = 1;
    std::size_t runs = 0;
    std::string csv, trace, table, dump_grid;
    std::vector<unsigned> j_list{4, 5, 6, 7};
    bool oracle = false;
};

// Output goes to `path`, or stdout when it is empty.
class Sink {
  public:
    explicit Sink(const std::string& path)
    {
        if (path.empty()) return;
        file_ = std::make_unique<std::ofstream>(path);
        if (!*file_) throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

  private:
    std::unique_ptr<std::ofstream> file_;
};

void apply_overrides(ExperimentSpec& spec, const Options& o)
{
    spec.pw_blocks = o.blocks;
    spec.mesh_j = o.mesh_j;
    spec.max_iter = o.max_iter;
    spec.seed = o.seed;
    spec.oracle_checks = o.oracle;
    spec.ls.gll_memory = o.gll_mem;
    if (o.tol) spec.grad_tol = *o.tol;
    if (o.c0) spec.c0 = *o.c0;
    if (o.c1) spec.c1 = *o.c1;
    if (o.c2) spec.c2 = *o.c2;
    if (o.sigma) {
        spec.ls.sigma = *o.sigma;
        spec.mt_sigma.reset();
    }
    if (o.eta) spec.ls.eta = *o.eta;
    if (o.beta) spec.ls.beta1 = spec.ls.beta2 = *o.beta;
    if (o.classic)
        for (auto& c : spec.configs) c.mode = Mode::classical;
}

int run(const Options& o)
{
    if (!o.table.empty()) {
        ExperimentSpec spec = ExperimentSpec::table(o.table);
        apply_overrides(spec, o);
        Sink out{o.csv};
        if (o.table == "t5") {
            write_mesh_csv(out.stream(), mesh_study(spec, o.j_list));
            return 0;
        }
        const auto rows = run_table(spec);
        write_table_csv(out.stream(), spec, rows);
        for (const auto& r : rows)
            if (!r.report.converged()) return 1;
        return 0;
    }

    ExperimentSpec spec = ExperimentSpec::for_problem(parse_problem(o.problem));
    spec.configs = {{o.m, parse_linesearch(o.ls), Mode::cautious}};
    apply_overrides(spec, o);

    if (o.runs > 0) {
        const auto rows = random_start_study(spec, o.runs);
        Sink out{o.csv};
        write_random_csv(out.stream(), rows);
        return rows.front().successes == rows.front().runs ? 0 : 1;
    }

    const auto rows = run_table(spec);
    const auto& report = rows.front().report;
    {
        Sink out{o.csv};
        write_table_csv(out.stream(), spec, rows);
    }
    if (!o.trace.empty()) {
        Sink out{o.trace};
        write_trace_jsonl(out.stream(), report);
    }
    if (!o.dump_grid.empty()) {
        if (spec.problem != ProblemId::ocp) throw std::invalid_argument("--dump-grid requires --problem ocp");
        Sink out{o.dump_grid};
        write_grid_csv(out.stream(), OcpGrid::with_level(spec.mesh_j), report.x_final);
    }
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
    if (!report.converged()) {
        std::cerr << "lbfgsm: " << to_string(report.status) << ": " << report.message << '\n';
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Cautious limited-memory BFGS with Barzilai-Borwein scaling"};
    app.set_config("--config", "", "flat key = value file; flags on the command line take precedence");
    Options o;

    app.add_option("--problem", o.problem, "Test problem")->check(CLI::IsMember({"rosenbrock", "pwquad", "ocp"}));
    app.add_option("--n", o.blocks, "Blocks of the piecewise quadratic (dimension 3n)")->check(CLI::PositiveNumber);
    app.add_option("--mesh-j", o.mesh_j, "Control problem mesh level, M = 2^j")->check(CLI::Range(1u, 12u));
    app.add_option("--m", o.m, "Memory size");
    app.add_option("--ls", o.ls, "Line search")->check(CLI::IsMember({"armijo", "wolfe", "mt", "more-thuente", "gll"}));
    app.add_option("--gll-mem", o.gll_mem, "Nonmonotone window length")->check(CLI::PositiveNumber);
    app.add_option("--tol", o.tol, "Stop when the gradient norm is at most this");
    app.add_option("--c0", o.c0, "Cautious threshold cap");
    app.add_option("--c1", o.c1, "Cautious threshold factor");
    app.add_option("--c2", o.c2, "Cautious threshold exponent (default 1/(2m+3))");
    app.add_flag("--classic", o.classic, "Use every stored pair and the unclamped scaling");
    app.add_option("--sigma", o.sigma, "Armijo slope");
    app.add_option("--eta", o.eta, "Curvature parameter");
    app.add_option("--beta", o.beta, "Backtracking factor");
    app.add_option("--max-iter", o.max_iter, "Iteration limit")->check(CLI::PositiveNumber);
    app.add_option("--seed", o.seed, "Seed for random starts");
    app.add_option("--runs", o.runs, "Random-start runs (piecewise quadratic)");
    app.add_option("--csv", o.csv, "Summary CSV path (stdout when omitted)");
    app.add_option("--trace", o.trace, "JSONL iteration trace path");
    app.add_option("--table", o.table, "Experiment preset")->check(CLI::IsMember({"t2", "t3", "t4", "t5"}));
    app.add_option("--j-list", o.j_list, "Mesh levels for t5")->check(CLI::Range(1u, 12u));
    app.add_option("--dump-grid", o.dump_grid, "CSV of y_d, state and control at the final control");
    app.add_flag("--oracle", o.oracle, "Audit every iteration against the dense operator");

    CLI11_PARSE(app, argc, argv);
    try {
        return run(o);
    } catch (const std::exception& e) {
        std::cerr << "lbfgsm: " << e.what() << '\n';
        return 2;
    }
}
