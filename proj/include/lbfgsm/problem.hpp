#pragma once

#include "lbfgsm/space.hpp"

#include <string>

namespace lbfgsm {

/// Smooth objective on a Space. The gradient is the Riesz representative
/// with respect to space().inner(): f'(x) v = inner(grad, v).
///
/// Implementations must be pure so that independent solver runs can share
/// one instance.
class Problem {
  public:
    virtual ~Problem() = default;
    virtual const Space& space() const = 0;
    virtual std::string name() const = 0;
    virtual double value(const Vector& x) const = 0;
    /// Writes the gradient into `grad` (resized as needed), returns f(x).
    virtual double value_and_gradient(const Vector& x, Vector& grad) const = 0;
};

} // namespace lbfgsm
