#include "lbfgsm/direction.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace lbfgsm {

namespace {

void require_curvature(const SecantPair& p)
{
    if (!(p.sy > 0.0)) throw std::invalid_argument("secant pair with nonpositive (s, y)");
}

void require_dense(const Space& space)
{
    if (space.dim() > kDenseOracleMaxDim)
        throw std::invalid_argument("dense oracle: dimension exceeds guard");
}

} // namespace

Vector two_loop(const Space& space, std::span<const SecantPair* const> active, double gamma,
                const Vector& grad)
{
    if (!(gamma > 0.0)) throw std::invalid_argument("two_loop: gamma must be positive");
    space.check(grad);

    const std::size_t r = active.size();
    std::vector<double> alpha(r);
    Vector q = grad;
    for (std::size_t i = r; i-- > 0;) {
        const SecantPair& p = *active[i];
        require_curvature(p);
        alpha[i] = space.inner(p.s, q) / p.sy;
        q -= alpha[i] * p.y;
    }
    q *= gamma;
    for (std::size_t i = 0; i < r; ++i) {
        const SecantPair& p = *active[i];
        const double beta = space.inner(p.y, q) / p.sy;
        q += (alpha[i] - beta) * p.s;
    }
    return -q;
}

Matrix weighted_adjoint(const Space& /*space*/, const Matrix& M)
{
    // W^{-1} M^T W; the weight is a multiple of the identity and commutes.
    return M.transpose();
}

Matrix dense_H(const Space& space, std::span<const SecantPair* const> pairs, double gamma)
{
    require_dense(space);
    if (!(gamma > 0.0)) throw std::invalid_argument("dense_H: gamma must be positive");
    const auto n = static_cast<Eigen::Index>(space.dim());
    const double w = space.weight();
    const Matrix I = Matrix::Identity(n, n);

    Matrix H = gamma * I;
    for (const SecantPair* p : pairs) {
        require_curvature(*p);
        const double rho = 1.0 / p->sy;
        // u v^* acts as x -> u (v, x) = w u v^T x.
        const Matrix V = I - rho * w * p->y * p->s.transpose();
        H = weighted_adjoint(space, V) * H * V + rho * w * p->s * p->s.transpose();
    }
    return H;
}

Matrix dense_B(const Space& space, std::span<const SecantPair* const> pairs, double gamma)
{
    require_dense(space);
    if (!(gamma > 0.0)) throw std::invalid_argument("dense_B: gamma must be positive");
    const auto n = static_cast<Eigen::Index>(space.dim());
    const double w = space.weight();

    Matrix B = Matrix::Identity(n, n) / gamma;
    for (const SecantPair* p : pairs) {
        require_curvature(*p);
        const Vector Bs = B * p->s;
        const double sBs = space.inner(Bs, p->s);
        if (!(sBs > 0.0)) throw std::logic_error("dense_B: (B s, s) <= 0");
        B += -(w / sBs) * Bs * Bs.transpose() + (w / p->sy) * p->y * p->y.transpose();
    }
    return B;
}

OperatorNorms operator_norms(const Space& space, const Matrix& H)
{
    require_dense(space);
    // With a uniform weight, W^{1/2} H W^{-1/2} = H, so the weighted spectrum
    // is that of the symmetric part of H.
    const Matrix S = 0.5 * (H + weighted_adjoint(space, H));
    Eigen::SelfAdjointEigenSolver<Matrix> eig(S, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) throw std::runtime_error("operator_norms: eigensolver failed");
    const double lmin = eig.eigenvalues().minCoeff();
    const double lmax = eig.eigenvalues().maxCoeff();
    OperatorNorms out;
    out.norm = std::max(std::abs(lmin), std::abs(lmax));
    out.inv_norm = lmin > 0.0 ? 1.0 / lmin : std::numeric_limits<double>::infinity();
    return out;
}

bool within_bound(double value, double bound) noexcept
{
    return value <= bound * (1.0 + 64.0 * std::numeric_limits<double>::epsilon());
}

BoundsReport check_bounds(const Space& space, const Matrix& H, double gamma, double kappa1,
                          double kappa2, std::size_t M)
{
    BoundsReport rep;
    rep.norms = operator_norms(space, H);
    const double Md = static_cast<double>(M);
    rep.inv_bound = 1.0 / gamma + Md * kappa2;
    rep.norm_bound = std::pow(5.0, Md) * std::max(1.0, gamma) *
                     std::max({1.0, std::pow(kappa1, Md), std::pow(kappa1 * kappa2, Md)});
    rep.inv_ok = within_bound(rep.norms.inv_norm, rep.inv_bound);
    rep.norm_ok = within_bound(rep.norms.norm, rep.norm_bound);
    return rep;
}

CautiousBounds cautious_bounds(double omega_k, std::size_t m)
{
    const double md = static_cast<double>(m);
    return {(md + 1.0) / omega_k, std::pow(5.0, md) * std::max(1.0, std::pow(omega_k, -(2.0 * md + 1.0)))};
}

} // namespace lbfgsm
