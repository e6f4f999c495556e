#pragma once

#include <functional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace lbfgsm {

enum class LineSearchKind {
    armijo,       ///< backtracking on the Armijo condition
    wolfe,        ///< weak Wolfe-Powell by doubling and bisection
    more_thuente, ///< strong Wolfe-Powell, More-Thuente
    gll,          ///< nonmonotone Armijo of Grippo, Lampariello and Lucidi
};

std::string_view to_string(LineSearchKind kind) noexcept;
/// Accepts armijo, wolfe, mt (or more-thuente) and gll.
LineSearchKind parse_linesearch(std::string_view name);

struct LineSearchParams {
    double sigma = 1e-4; ///< sufficient-decrease slope
    double eta = 0.9;    ///< curvature constant
    double beta1 = 0.5;  ///< backtracking window [beta1*a, beta2*a]
    double beta2 = 0.5;
    int maxfev = 20;
    double stpmin = 0.0;
    double stpmax = 1000.0;
    double xtol = 1e-7;
    int gll_memory = 10;

    /// Throws std::invalid_argument on inconsistent constants for `kind`.
    void validate(LineSearchKind kind) const;
};

enum class LineSearchStatus {
    success,
    maxfev,        ///< evaluation budget exhausted
    stpmax,        ///< step clipped at stpmax without satisfying the conditions
    stpmin,        ///< step clipped at stpmin without satisfying the conditions
    xtol,          ///< uncertainty interval below xtol
    rounding,      ///< rounding errors prevent progress
};

std::string_view to_string(LineSearchStatus status) noexcept;

/// Conditions verified at the returned step.
struct Certificate {
    bool armijo = false;           ///< phi(a) <= phi(0) + sigma a phi'(0)
    bool nonmonotone = false;      ///< phi(a) <= max(history) + sigma a phi'(0)
    bool weak_curvature = false;   ///< phi'(a) >= eta phi'(0)
    bool strong_curvature = false; ///< |phi'(a)| <= eta |phi'(0)|
};

struct LineSearchOutcome {
    LineSearchStatus status = LineSearchStatus::success;
    double alpha = 0.0;
    double phi = 0.0;
    double dphi = 0.0;        ///< NaN when the slope was not evaluated at alpha
    bool has_slope = false;
    int n_feval = 0;
    int n_geval = 0;
    Certificate certificate;
    std::vector<double> trials; ///< every step evaluated, in order

    bool ok() const noexcept { return status == LineSearchStatus::success; }
};

/// phi(a) = f(x + a d) and phi'(a) = (grad f(x + a d), d).
class LineFunction {
  public:
    virtual ~LineFunction() = default;
    virtual double value(double alpha) = 0;
    virtual std::pair<double, double> value_and_slope(double alpha) = 0;
};

/// LineFunction over plain callables; the slope callable may be empty for
/// value-only searches.
class ScalarLine final : public LineFunction {
  public:
    ScalarLine(std::function<double(double)> phi, std::function<double(double)> dphi = {});
    double value(double alpha) override;
    std::pair<double, double> value_and_slope(double alpha) override;

  private:
    std::function<double(double)> phi_;
    std::function<double(double)> dphi_;
};

/// Backtracking from a = 1; each rejected trial contracts into
/// [beta1 a, beta2 a] (safeguarded quadratic interpolation when beta1 < beta2).
LineSearchOutcome armijo_backtrack(LineFunction& line, double phi0, double dphi0,
                                   const LineSearchParams& params);

/// Same ladder as armijo_backtrack, accepting against max(history). The last
/// entry of `history` is phi(0).
LineSearchOutcome gll_nonmonotone(LineFunction& line, double dphi0, std::span<const double> history,
                                  const LineSearchParams& params);

/// Weak Wolfe-Powell step: double a until the Armijo condition fails or the
/// curvature condition holds, then bisect the bracket.
LineSearchOutcome wolfe_weak(LineFunction& line, double phi0, double dphi0,
                             const LineSearchParams& params);

/// Strong Wolfe-Powell step by the More-Thuente algorithm, started at alpha0.
LineSearchOutcome more_thuente(LineFunction& line, double phi0, double dphi0,
                               const LineSearchParams& params, double alpha0 = 1.0);

} // namespace lbfgsm
