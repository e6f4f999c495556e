#pragma once

#include <Eigen/Core>

#include <cstddef>

namespace lbfgsm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A finite-dimensional real vector space with a uniformly weighted inner
/// product (u, v) = w * sum_i u_i v_i.
///
/// w = 1 gives the Euclidean product; w = h^2 mimics L^2 on a uniform grid.
/// Every quasi-Newton formula in this library is written against inner(),
/// never against raw dot products.
class Space {
  public:
    /// Euclidean space of dimension `dim`.
    static Space euclidean(std::size_t dim);
    /// Space of interior nodes of a uniform (M+1)x(M+1) grid on the unit
    /// square: dim = (M-1)^2, weight = 1/M^2. Requires M >= 2.
    static Space grid(std::size_t M);

    Space(std::size_t dim, double weight);

    std::size_t dim() const noexcept { return dim_; }
    double weight() const noexcept { return weight_; }

    double inner(const Vector& u, const Vector& v) const;
    double norm(const Vector& u) const;

    /// Throws std::invalid_argument when u does not have length dim().
    void check(const Vector& u) const;

  private:
    std::size_t dim_;
    double weight_;
};

Space make_grid_space(std::size_t M);

} // namespace lbfgsm
