#pragma once

#include "lbfgsm/problem.hpp"
#include "lbfgsm/space.hpp"

#include <Eigen/SparseCore>

#include <cstddef>
#include <cstdint>

namespace lbfgsm {

/// f(x) = (1 - x1)^2 + 100 (x2 - x1^2)^2 on Euclidean R^2.
class Rosenbrock final : public Problem {
  public:
    Rosenbrock();
    const Space& space() const override { return space_; }
    std::string name() const override { return "rosenbrock"; }
    double value(const Vector& x) const override;
    double value_and_gradient(const Vector& x, Vector& grad) const override;

    static Vector start();    ///< (-1.2, 1)
    static Vector minimizer(); ///< (1, 1)

  private:
    Space space_;
};

/// f(x) = 1/2 |x - b|^2 + 99/2 sum max{0, x_i}^2 on R^{3N}, with b the
/// N-fold repetition of (1, -1, 0). 1-strongly convex, gradient
/// 100-Lipschitz, unique minimizer the repetition of (0.01, -1, 0).
class PiecewiseQuadratic final : public Problem {
  public:
    explicit PiecewiseQuadratic(std::size_t blocks);
    const Space& space() const override { return space_; }
    std::string name() const override { return "pwquad"; }
    double value(const Vector& x) const override;
    double value_and_gradient(const Vector& x, Vector& grad) const override;

    std::size_t blocks() const noexcept { return blocks_; }
    const Vector& b() const noexcept { return b_; }
    Vector minimizer() const;
    double min_value() const;

  private:
    std::size_t blocks_;
    Space space_;
    Vector b_;
};

/// Discretization of  min 1/2 |y_u - y_d|^2 + nu/2 |u|^2  subject to
/// -Lap y + exp(y) = u in the unit square, y = 0 on the boundary, with the
/// 5-point stencil on a uniform grid with M + 1 points per direction.
/// Vectors hold the (M-1)^2 interior nodes, node (i, j) at (i h, j h) stored
/// at (i - 1)(M - 1) + (j - 1).
struct OcpGrid {
    std::size_t M = 16;
    double nu = 1e-3;
    Vector y_d;
    double newton_tol = 1e-12;
    int newton_max = 50;
    Eigen::SparseMatrix<double> laplacian; ///< 5-point stencil scaled by 1/h^2

    /// nu = 1e-3 and y_d(x1, x2) = sin(2 pi x1) cos(2 pi x2).
    static OcpGrid standard(std::size_t M);
    /// Grid with M = 2^j.
    static OcpGrid with_level(unsigned j);

    OcpGrid(std::size_t M, double nu, Vector y_d);
    Space space() const { return Space::grid(M); }
    std::size_t n() const noexcept { return (M - 1) * (M - 1); }
};

/// Solves A y + exp(y) = u by damped Newton (residual halving). Converged
/// when |A y + exp(y) - u| <= newton_tol * max{1, |u|, |A y|} in the grid
/// norm. Throws std::runtime_error when Newton fails.
Vector ocp_state_solve(const OcpGrid& grid, const Vector& u);

/// Grid norm of the state residual A y + exp(y) - u.
double ocp_state_residual(const OcpGrid& grid, const Vector& y, const Vector& u);

/// Solves (A + diag(exp(y))) p = y - y_d.
Vector ocp_adjoint_solve(const OcpGrid& grid, const Vector& y, const Vector& y_d);

class OptimalControl final : public Problem {
  public:
    explicit OptimalControl(OcpGrid grid);
    const Space& space() const override { return space_; }
    std::string name() const override { return "ocp"; }
    double value(const Vector& u) const override;
    /// grad = nu u + p, the Riesz representative in the grid product.
    double value_and_gradient(const Vector& u, Vector& grad) const override;

    const OcpGrid& grid() const noexcept { return grid_; }
    Vector state(const Vector& u) const { return ocp_state_solve(grid_, u); }

  private:
    OcpGrid grid_;
    Space space_;
};

/// Max over `n_dirs` random unit directions v of
///   |(f(x + t v) - f(x - t v)) / (2t) - (grad, v)| / max{|(grad, v)|, 1e-3 |grad| |v|}.
double fd_gradient_check(const Problem& problem, const Vector& x, std::size_t n_dirs, double t,
                         std::uint64_t seed = 1);

} // namespace lbfgsm
