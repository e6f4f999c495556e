#include "lbfgsm/problems.hpp"

#include "lbfgsm/random.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace lbfgsm {

// ---- Rosenbrock -------------------------------------------------------------

Rosenbrock::Rosenbrock() : space_{Space::euclidean(2)} {}

Vector Rosenbrock::start() { return Vector{{-1.2, 1.0}}; }
Vector Rosenbrock::minimizer() { return Vector{{1.0, 1.0}}; }

double Rosenbrock::value(const Vector& x) const
{
    space_.check(x);
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    return a * a + 100.0 * b * b;
}

double Rosenbrock::value_and_gradient(const Vector& x, Vector& grad) const
{
    space_.check(x);
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    grad.resize(2);
    grad[0] = -2.0 * a - 400.0 * x[0] * b;
    grad[1] = 200.0 * b;
    return a * a + 100.0 * b * b;
}

// ---- piecewise quadratic ----------------------------------------------------

PiecewiseQuadratic::PiecewiseQuadratic(std::size_t blocks)
    : blocks_{blocks}, space_{Space::euclidean(3 * std::max<std::size_t>(blocks, 1))}, b_(3 * blocks)
{
    if (blocks == 0) throw std::invalid_argument("pwquad: need at least one block");
    for (std::size_t i = 0; i < blocks; ++i) b_.segment(static_cast<Eigen::Index>(3 * i), 3) << 1.0, -1.0, 0.0;
}

Vector PiecewiseQuadratic::minimizer() const
{
    Vector x(b_.size());
    for (std::size_t i = 0; i < blocks_; ++i) x.segment(static_cast<Eigen::Index>(3 * i), 3) << 0.01, -1.0, 0.0;
    return x;
}

double PiecewiseQuadratic::min_value() const
{
    // Per block: 1/2 (0.01 - 1)^2 + 99/2 (0.01)^2 = 0.495.
    return value(minimizer());
}

double PiecewiseQuadratic::value(const Vector& x) const
{
    space_.check(x);
    const Vector pos = x.cwiseMax(0.0);
    return 0.5 * (x - b_).squaredNorm() + 49.5 * pos.squaredNorm();
}

double PiecewiseQuadratic::value_and_gradient(const Vector& x, Vector& grad) const
{
    space_.check(x);
    const Vector pos = x.cwiseMax(0.0);
    grad = x - b_ + 99.0 * pos;
    return 0.5 * (x - b_).squaredNorm() + 49.5 * pos.squaredNorm();
}

// ---- optimal control --------------------------------------------------------

namespace {

Eigen::SparseMatrix<double> five_point_laplacian(std::size_t M)
{
    const auto n = static_cast<Eigen::Index>(M - 1);
    const double h = 1.0 / static_cast<double>(M);
    const double c = 1.0 / (h * h);
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(5 * n * n));
    auto idx = [n](Eigen::Index i, Eigen::Index j) { return i * n + j; };
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const auto row = idx(i, j);
            t.emplace_back(row, row, 4.0 * c);
            if (i > 0) t.emplace_back(row, idx(i - 1, j), -c);
            if (i + 1 < n) t.emplace_back(row, idx(i + 1, j), -c);
            if (j > 0) t.emplace_back(row, idx(i, j - 1), -c);
            if (j + 1 < n) t.emplace_back(row, idx(i, j + 1), -c);
        }
    }
    Eigen::SparseMatrix<double> A(n * n, n * n);
    A.setFromTriplets(t.begin(), t.end());
    return A;
}

Eigen::SparseMatrix<double> linearized(const OcpGrid& grid, const Vector& y)
{
    Eigen::SparseMatrix<double> J = grid.laplacian;
    for (Eigen::Index i = 0; i < y.size(); ++i) J.coeffRef(i, i) += std::exp(y[i]);
    return J;
}

double grid_norm(const OcpGrid& grid, const Vector& v)
{
    return v.norm() / static_cast<double>(grid.M);
}

} // namespace

OcpGrid::OcpGrid(std::size_t M_, double nu_, Vector y_d_) : M{M_}, nu{nu_}, y_d{std::move(y_d_)}
{
    if (M < 2) throw std::invalid_argument("ocp: grid requires M >= 2");
    if (!(nu > 0.0)) throw std::invalid_argument("ocp: nu must be positive");
    if (static_cast<std::size_t>(y_d.size()) != n()) throw std::invalid_argument("ocp: y_d has wrong size");
    laplacian = five_point_laplacian(M);
}

OcpGrid OcpGrid::standard(std::size_t M)
{
    if (M < 2) throw std::invalid_argument("ocp: grid requires M >= 2");
    const std::size_t n = M - 1;
    const double h = 1.0 / static_cast<double>(M);
    Vector yd(static_cast<Eigen::Index>(n * n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double x1 = static_cast<double>(i + 1) * h;
            const double x2 = static_cast<double>(j + 1) * h;
            yd[static_cast<Eigen::Index>(i * n + j)] =
                std::sin(2.0 * std::numbers::pi * x1) * std::cos(2.0 * std::numbers::pi * x2);
        }
    }
    return OcpGrid{M, 1e-3, std::move(yd)};
}

OcpGrid OcpGrid::with_level(unsigned j)
{
    if (j < 1 || j > 12) throw std::invalid_argument("ocp: mesh level out of range");
    return standard(std::size_t{1} << j);
}

double ocp_state_residual(const OcpGrid& grid, const Vector& y, const Vector& u)
{
    return grid_norm(grid, grid.laplacian * y + y.array().exp().matrix() - u);
}

Vector ocp_state_solve(const OcpGrid& grid, const Vector& u)
{
    if (static_cast<std::size_t>(u.size()) != grid.n()) throw std::invalid_argument("ocp: control has wrong size");
    if (!u.allFinite()) throw std::invalid_argument("ocp: nonfinite control");

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    Vector y = Vector::Zero(u.size());
    const double u_norm = grid_norm(grid, u);

    for (int it = 0; it <= grid.newton_max; ++it) {
        const Vector Ay = grid.laplacian * y;
        const Vector R = Ay + y.array().exp().matrix() - u;
        const double rn = grid_norm(grid, R);
        const double scale = std::max({1.0, u_norm, grid_norm(grid, Ay)});
        if (rn <= grid.newton_tol * scale) return y;
        if (it == grid.newton_max) break;

        const auto J = linearized(grid, y);
        if (it == 0) solver.analyzePattern(J);
        solver.factorize(J);
        if (solver.info() != Eigen::Success) throw std::runtime_error("ocp: Newton factorization failed");
        const Vector delta = solver.solve(-R);

        double t = 1.0;
        bool decreased = false;
        for (int halvings = 0; halvings < 40; ++halvings, t *= 0.5) {
            const Vector trial = y + t * delta;
            if (ocp_state_residual(grid, trial, u) < rn) {
                y = trial;
                decreased = true;
                break;
            }
        }
        if (!decreased) throw std::runtime_error("ocp: damped Newton stalled");
    }
    throw std::runtime_error("ocp: Newton did not converge");
}

Vector ocp_adjoint_solve(const OcpGrid& grid, const Vector& y, const Vector& y_d)
{
    const auto J = linearized(grid, y);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(J);
    if (solver.info() != Eigen::Success) throw std::runtime_error("ocp: adjoint factorization failed");
    Vector p = solver.solve(y - y_d);
    if (solver.info() != Eigen::Success) throw std::runtime_error("ocp: adjoint solve failed");
    return p;
}

OptimalControl::OptimalControl(OcpGrid grid) : grid_{std::move(grid)}, space_{grid_.space()} {}

double OptimalControl::value(const Vector& u) const
{
    space_.check(u);
    const Vector y = ocp_state_solve(grid_, u);
    const double w = space_.weight();
    return 0.5 * w * (y - grid_.y_d).squaredNorm() + 0.5 * grid_.nu * w * u.squaredNorm();
}

double OptimalControl::value_and_gradient(const Vector& u, Vector& grad) const
{
    space_.check(u);
    const Vector y = ocp_state_solve(grid_, u);
    const Vector p = ocp_adjoint_solve(grid_, y, grid_.y_d);
    grad = grid_.nu * u + p;
    const double w = space_.weight();
    return 0.5 * w * (y - grid_.y_d).squaredNorm() + 0.5 * grid_.nu * w * u.squaredNorm();
}

// ---- finite differences -----------------------------------------------------

double fd_gradient_check(const Problem& problem, const Vector& x, std::size_t n_dirs, double t, std::uint64_t seed)
{
    const Space& space = problem.space();
    Vector g;
    problem.value_and_gradient(x, g);
    const double gnorm = space.norm(g);

    CounterRng rng{seed};
    double worst = 0.0;
    for (std::size_t k = 0; k < n_dirs; ++k) {
        Vector v(x.size());
        for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
        v /= space.norm(v);
        const double fd = (problem.value(x + t * v) - problem.value(x - t * v)) / (2.0 * t);
        const double exact = space.inner(g, v);
        const double denom = std::max(std::abs(exact), 1e-3 * gnorm);
        if (denom == 0.0) {
            worst = std::max(worst, std::abs(fd));
            continue;
        }
        worst = std::max(worst, std::abs(fd - exact) / denom);
    }
    return worst;
}

} // namespace lbfgsm
