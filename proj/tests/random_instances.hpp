#pragma once

// Random quasi-Newton instances shared by the unit and acceptance tests, and
// an inverse-BFGS oracle written independently of the library's dense_H.

#include "lbfgsm/direction.hpp"
#include "lbfgsm/random.hpp"
#include "lbfgsm/secant_store.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <vector>

namespace lbfgsm::testing {

inline Vector random_vector(CounterRng& rng, Eigen::Index n)
{
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal();
    return v;
}

/// Random SPD matrix Q diag(lambda) Q^T with log-uniform eigenvalues in [lo, hi].
inline Matrix random_spd(CounterRng& rng, Eigen::Index n, double lo, double hi)
{
    Matrix A(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) A(i, j) = rng.normal();
    const Eigen::HouseholderQR<Matrix> qr(A);
    const Matrix Q = qr.householderQ();
    Vector lambda(n);
    for (Eigen::Index i = 0; i < n; ++i) lambda[i] = lo * std::pow(hi / lo, rng.uniform());
    return Q * lambda.asDiagonal() * Q.transpose();
}

struct Instance {
    Space space{1, 1.0};
    Storage store{0};
    double gamma = 1.0;
    Vector grad;

    std::vector<const SecantPair*> pairs() const { return all_pairs(store); }
};

/// dim in [1, 8], 0..5 pairs with y = B s for a random SPD B (eigenvalues in
/// [0.1, 10]), gamma log-uniform in [0.1, 10]; every other instance uses a
/// weighted product.
inline Instance random_instance(CounterRng& rng, std::size_t trial)
{
    Instance in;
    const auto n = static_cast<Eigen::Index>(1 + rng.next_u64() % 8);
    const double w = trial % 2 == 0 ? 1.0 : std::exp(-4.0 * rng.uniform());
    in.space = Space{static_cast<std::size_t>(n), w};
    const auto M = static_cast<std::size_t>(rng.next_u64() % 6);
    in.store = Storage{M};
    const Matrix B = random_spd(rng, n, 0.1, 10.0);
    while (in.store.size() < M) {
        const Vector s = random_vector(rng, n);
        in.store.push(in.space, s, B * s);
    }
    in.gamma = 0.1 * std::pow(100.0, rng.uniform());
    in.grad = random_vector(rng, n);
    return in;
}

/// Inverse BFGS recursion H <- V^T H V + rho w s s^T, V = I - rho w y s^T,
/// from H = gamma I; the matrix form of the update in the product w u^T v.
inline Matrix oracle_inverse(const Instance& in)
{
    const auto n = static_cast<Eigen::Index>(in.space.dim());
    const double w = in.space.weight();
    Matrix H = in.gamma * Matrix::Identity(n, n);
    for (const auto* p : in.pairs()) {
        const double rho = 1.0 / (w * p->s.dot(p->y));
        const Matrix V = Matrix::Identity(n, n) - rho * w * p->y * p->s.transpose();
        H = V.transpose() * H * V + rho * w * p->s * p->s.transpose();
    }
    return H;
}

} // namespace lbfgsm::testing
