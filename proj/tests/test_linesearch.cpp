#include "lbfgsm/linesearch.hpp"

#include "random_lines.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace lbfgsm;
using namespace lbfgsm::testing;

namespace {

ScalarLine value_line(double (*phi)(double)) { return ScalarLine{phi}; }

// First step of the ladder 1, beta, beta^2, ... meeting the Armijo condition.
double armijo_oracle(double (*phi)(double), double dphi0, double sigma, double beta)
{
    const double phi0 = phi(0.0);
    for (double a = 1.0;; a *= beta)
        if (phi(a) <= phi0 + sigma * a * dphi0) return a;
}

double quad_bowl(double a) { return (1.0 - a) * (1.0 - a); }
double steep(double a) { return 1.0 - a + 10.0 * a * a; }

} // namespace

TEST_CASE("armijo accepts the unit step on (1 - a)^2")
{
    auto line = value_line(quad_bowl);
    const auto out = armijo_backtrack(line, 1.0, -2.0, LineSearchParams{});
    CHECK(out.ok());
    CHECK(out.alpha == 1.0);
    CHECK(out.n_feval == 1);
    CHECK(out.certificate.armijo);
}

TEST_CASE("armijo ladder on 1 - a + 10 a^2")
{
    const double expected = armijo_oracle(steep, -1.0, 1e-4, 0.5);
    CHECK(expected == 0.0625);
    auto line = value_line(steep);
    const auto out = armijo_backtrack(line, 1.0, -1.0, LineSearchParams{});
    CHECK(out.ok());
    CHECK(out.alpha == expected);
    CHECK(out.n_feval == 5);
    CHECK(out.trials == std::vector<double>{1.0, 0.5, 0.25, 0.125, 0.0625});
}

TEST_CASE("armijo budget and preconditions")
{
    auto line = value_line(steep);
    LineSearchParams p;
    p.maxfev = 3;
    const auto out = armijo_backtrack(line, 1.0, -1.0, p);
    CHECK(out.status == LineSearchStatus::maxfev);
    CHECK(out.n_feval == 3);
    CHECK_THROWS_AS(armijo_backtrack(line, 1.0, 0.0, LineSearchParams{}), std::invalid_argument);
    CHECK_THROWS_AS(wolfe_weak(line, 1.0, 1.0, LineSearchParams{}), std::invalid_argument);
    CHECK_THROWS_AS(more_thuente(line, 1.0, 0.0, LineSearchParams{}), std::invalid_argument);
}

TEST_CASE("interpolating backtracking stays inside the contraction window")
{
    LineSearchParams p;
    p.beta1 = 0.1;
    p.beta2 = 0.5;
    auto line = value_line(steep);
    const auto out = armijo_backtrack(line, 1.0, -1.0, p);
    REQUIRE(out.ok());
    for (std::size_t i = 1; i < out.trials.size(); ++i) {
        CHECK(out.trials[i] >= 0.1 * out.trials[i - 1]);
        CHECK(out.trials[i] <= 0.5 * out.trials[i - 1]);
    }
    CHECK(steep(out.alpha) <= 1.0 - 1e-4 * out.alpha);
}

TEST_CASE("weak wolfe on (1 - a)^2 accepts a = 1")
{
    ScalarLine line{quad_bowl, [](double a) { return -2.0 * (1.0 - a); }};
    const auto out = wolfe_weak(line, 1.0, -2.0, LineSearchParams{});
    CHECK(out.ok());
    CHECK(out.alpha == 1.0);
    CHECK(out.certificate.armijo);
    CHECK(out.certificate.weak_curvature);
}

TEST_CASE("weak wolfe reports unbounded descent at stpmax")
{
    ScalarLine line{[](double a) { return -a; }, [](double) { return -1.0; }};
    LineSearchParams p;
    p.stpmax = 1e6;
    p.maxfev = 100;
    const auto out = wolfe_weak(line, 0.0, -1.0, p);
    CHECK(out.status == LineSearchStatus::stpmax);
    CHECK(out.alpha == 1e6);
}

TEST_CASE("more-thuente certificates on smooth examples")
{
    {
        ScalarLine line{[](double a) { return a * a * a * a / 4.0 - a; }, [](double a) { return a * a * a - 1.0; }};
        const auto out = more_thuente(line, 0.0, -1.0, LineSearchParams{});
        REQUIRE(out.ok());
        CHECK(out.alpha * out.alpha * out.alpha * out.alpha / 4.0 - out.alpha <= -1e-4 * out.alpha);
        CHECK(std::abs(out.alpha * out.alpha * out.alpha - 1.0) <= 0.9);
        CHECK(out.certificate.armijo);
        CHECK(out.certificate.strong_curvature);
    }
    {
        ScalarLine line{[](double a) { return 0.5 * (a - 1.0) * (a - 1.0); }, [](double a) { return a - 1.0; }};
        const auto out = more_thuente(line, 0.5, -1.0, LineSearchParams{});
        REQUIRE(out.ok());
        CHECK(out.alpha == 1.0);
        CHECK(out.dphi == 0.0);
        CHECK(out.n_feval == 1);
    }
}

TEST_CASE("more-thuente extrapolation ladder")
{
    // Linear descent until far out: trials extrapolate by a factor of 4 of the
    // previous increment, 1, 5, 21, 85, 341, ...
    ScalarLine line{[](double a) { return a < 300.0 ? -a : -300.0 + (a - 300.0) * (a - 300.0); },
                    [](double a) { return a < 300.0 ? -1.0 : 2.0 * (a - 300.0); }};
    const auto out = more_thuente(line, 0.0, -1.0, LineSearchParams{});
    REQUIRE(out.trials.size() >= 5);
    CHECK(out.trials[0] == 1.0);
    CHECK(out.trials[1] == 5.0);
    CHECK(out.trials[2] == 21.0);
    CHECK(out.trials[3] == 85.0);
    CHECK(out.trials[4] == 341.0);
}

TEST_CASE("more-thuente stops at the evaluation budget")
{
    // A steep narrow valley far out: the strong curvature window is tiny, so
    // many evaluations are needed. Count them with a generous budget first.
    auto phi = [](double a) { return -a + 5e3 * std::pow(std::max(0.0, a - 700.0), 2.5); };
    auto dphi = [](double a) { return -1.0 + 1.25e4 * std::pow(std::max(0.0, a - 700.0), 1.5); };
    LineSearchParams p;
    p.eta = 1e-3;
    p.xtol = 0.0;
    p.maxfev = 200;
    ScalarLine probe{phi, dphi};
    const auto full = more_thuente(probe, 0.0, -1.0, p);
    REQUIRE(full.ok());
    const int needed = full.n_feval;
    REQUIRE(needed > 20);

    p.maxfev = 20;
    ScalarLine line{phi, dphi};
    const auto out = more_thuente(line, 0.0, -1.0, p);
    CHECK(out.status == LineSearchStatus::maxfev);
    CHECK(out.n_feval == 20);
}

TEST_CASE("gll reduces to armijo with a one-entry window")
{
    CounterRng rng{5};
    for (int i = 0; i < 200; ++i) {
        const auto r = random_line(rng);
        auto l1 = r.line();
        auto l2 = r.line();
        const double phi0 = r.phi(0.0);
        const double hist[] = {phi0};
        const auto a = armijo_backtrack(l1, phi0, r.dphi(0.0), LineSearchParams{});
        const auto g = gll_nonmonotone(l2, r.dphi(0.0), hist, LineSearchParams{});
        CHECK(a.alpha == g.alpha);
        CHECK(a.n_feval == g.n_feval);
        CHECK(a.status == g.status);
    }
    auto line = value_line(steep);
    const double hist[] = {1.0};
    CHECK(gll_nonmonotone(line, -1.0, hist, LineSearchParams{}).alpha == 0.0625);
}

TEST_CASE("gll accepts a nonmonotone step")
{
    // phi(0) = 1 is the latest value, 5 an older one; phi(1) = 4 > phi(0).
    ScalarLine line{[](double a) { return 1.0 + 3.0 * a; }};
    const double hist[] = {5.0, 1.0};
    const auto out = gll_nonmonotone(line, -1e-3, hist, LineSearchParams{});
    CHECK(out.ok());
    CHECK(out.alpha == 1.0);
    CHECK(out.phi == 4.0);
    CHECK(out.certificate.nonmonotone);
    CHECK(!out.certificate.armijo);
}

TEST_CASE("accepted steps re-verify their conditions on random lines")
{
    CounterRng rng{77};
    const LineSearchParams p;
    for (int i = 0; i < 1000; ++i) {
        const auto r = random_line(rng);
        const double phi0 = r.phi(0.0);
        const double d0 = r.dphi(0.0);
        {
            auto line = r.line();
            const auto out = armijo_backtrack(line, phi0, d0, p);
            if (out.ok()) CHECK(r.phi(out.alpha) <= phi0 + p.sigma * out.alpha * d0);
        }
        {
            auto line = r.line();
            const auto out = wolfe_weak(line, phi0, d0, p);
            if (out.ok()) {
                CHECK(r.phi(out.alpha) <= phi0 + p.sigma * out.alpha * d0);
                CHECK(r.dphi(out.alpha) >= p.eta * d0);
                CHECK(out.alpha * (r.dphi(out.alpha) - d0) > 0.0);
            }
        }
        {
            auto line = r.line();
            const auto out = more_thuente(line, phi0, d0, p);
            if (out.ok()) {
                CHECK(r.phi(out.alpha) <= phi0 + p.sigma * out.alpha * d0);
                CHECK(std::abs(r.dphi(out.alpha)) <= p.eta * std::abs(d0));
                CHECK(out.alpha * (r.dphi(out.alpha) - d0) > 0.0);
            }
        }
    }
}

TEST_CASE("parse and validate")
{
    CHECK(parse_linesearch("mt") == LineSearchKind::more_thuente);
    CHECK(parse_linesearch("more-thuente") == LineSearchKind::more_thuente);
    CHECK(parse_linesearch("gll") == LineSearchKind::gll);
    CHECK_THROWS_AS(parse_linesearch("newton"), std::invalid_argument);
    LineSearchParams p;
    p.eta = 1e-5;
    CHECK_THROWS_AS(p.validate(LineSearchKind::wolfe), std::invalid_argument);
    CHECK_NOTHROW(p.validate(LineSearchKind::armijo));
}
