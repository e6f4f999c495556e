#include "lbfgsm/space.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lbfgsm {

Space::Space(std::size_t dim, double weight) : dim_{dim}, weight_{weight}
{
    if (dim == 0) throw std::invalid_argument("Space: dimension must be positive");
    if (!(weight > 0.0) || !std::isfinite(weight))
        throw std::invalid_argument("Space: weight must be positive and finite");
}

Space Space::euclidean(std::size_t dim) { return Space{dim, 1.0}; }

Space Space::grid(std::size_t M)
{
    if (M < 2) throw std::invalid_argument("grid space requires M >= 2");
    const double h = 1.0 / static_cast<double>(M);
    return Space{(M - 1) * (M - 1), h * h};
}

Space make_grid_space(std::size_t M) { return Space::grid(M); }

void Space::check(const Vector& u) const
{
    if (static_cast<std::size_t>(u.size()) != dim_)
        throw std::invalid_argument("dimension mismatch: expected " + std::to_string(dim_) +
                                    ", got " + std::to_string(u.size()));
}

double Space::inner(const Vector& u, const Vector& v) const
{
    check(u);
    check(v);
    return weight_ * u.dot(v);
}

double Space::norm(const Vector& u) const { return std::sqrt(inner(u, u)); }

} // namespace lbfgsm
