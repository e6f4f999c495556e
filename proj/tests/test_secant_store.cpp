#include "lbfgsm/secant_store.hpp"

#include "lbfgsm/random.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

using namespace lbfgsm;

namespace {

const Space E2 = Space::euclidean(2);

Vector v2(double a, double b) { return Vector{{a, b}}; }

Vector random_vector(CounterRng& rng, Eigen::Index n)
{
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal();
    return v;
}

} // namespace

TEST_CASE("q_metric")
{
    CHECK(q_metric(E2, v2(1, 0), v2(1, 0)) == 1.0);
    CHECK(q_metric(E2, v2(1, 0), v2(2, 0)) == 0.5);
    CHECK(q_metric(E2, v2(1, 0), v2(0, 0)) == 0.0);
    CHECK(q_metric(E2, v2(0, 0), v2(1, 0)) == 0.0);
    CHECK(q_metric(E2, v2(1, 0), v2(-1, 0)) == -1.0);
}

TEST_CASE("q_metric is bounded by one (Cauchy-Schwarz)")
{
    CounterRng rng{11};
    const Space W{5, 0.01};
    for (int i = 0; i < 1000; ++i) {
        const Vector s = random_vector(rng, 5);
        const Vector y = random_vector(rng, 5);
        const double q = q_metric(W, s, y);
        CHECK(q <= 1.0 + 1e-15);
        if (W.inner(s, y) > 0.0) {
            const auto [gm, gp] = bb_scalars(W, s, y);
            CHECK(gm <= gp * (1 + 1e-15));
        }
    }
}

TEST_CASE("omega")
{
    CautiousParams p;
    p.c0 = 1e-4;
    p.c1 = 1.0;
    p.c2 = 1.0 / 7.0;
    CHECK(omega(1.0, p) == 1e-4);
    CHECK(omega(1e-35, p) == doctest::Approx(1e-5).epsilon(1e-12));
    CautiousParams q{1.0, 2.0, 1.0, 0};
    CHECK(omega(0.25, q) == 0.5);
    CHECK_THROWS_AS(omega(0.0, p), std::logic_error);
}

TEST_CASE("omega is monotone in the gradient norm")
{
    const auto p = CautiousParams::defaults_for(3);
    double prev = 0.0;
    for (double g = 1e-40; g < 1e3; g *= 3.0) {
        const double w = omega(g, p);
        CHECK(w >= prev);
        CHECK(w <= p.c0);
        prev = w;
    }
}

TEST_CASE("cautious defaults and calibration")
{
    const auto p = CautiousParams::defaults_for(2);
    CHECK(p.c0 == 1e-4);
    CHECK(p.c1 == 1.0);
    CHECK(p.c2 == doctest::Approx(1.0 / 7.0));
    CHECK(p.satisfies_rate_calibration(true));
    CHECK(p.satisfies_rate_calibration(false));
    CautiousParams loose{1e-4, 1.0, 0.2, 2};
    CHECK(!loose.satisfies_rate_calibration(true));
    CautiousParams bad{2.0, 1.0, 0.1, 2};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("bb_scalars")
{
    auto [gm, gp] = bb_scalars(E2, v2(1, 0), v2(2, 0));
    CHECK(gm == 0.5);
    CHECK(gp == 0.5);
    std::tie(gm, gp) = bb_scalars(E2, v2(1, 1), v2(1, 2));
    CHECK(gm == doctest::Approx(0.6));
    CHECK(gp == doctest::Approx(2.0 / 3.0));
    CHECK_THROWS_AS(bb_scalars(E2, v2(1, 0), v2(-1, 0)), std::invalid_argument);
}

TEST_CASE("bb scalars lie in the inverse Hessian spectrum of a quadratic")
{
    // f = 1/2 x^T diag(1, 4) x, so y = diag(1, 4) s and the spectrum of the
    // inverse Hessian is [0.25, 1].
    CounterRng rng{3};
    for (int i = 0; i < 500; ++i) {
        const Vector s = random_vector(rng, 2);
        const Vector y = v2(s[0], 4.0 * s[1]);
        const auto [gm, gp] = bb_scalars(E2, s, y);
        CHECK(gm >= 0.25 - 1e-15);
        CHECK(gp <= 1.0 + 1e-15);
        CHECK(gm <= gp);
    }
}

TEST_CASE("storage push, eviction and retention")
{
    Storage st{2};
    CHECK(st.interval_degenerate());
    CHECK(st.push(E2, v2(1, 0), v2(1, 0)));
    CHECK(st.size() == 1);
    CHECK(st.gamma_minus() == 1.0);
    CHECK(st.gamma_plus() == 1.0);

    CHECK(st.push(E2, v2(0, 1), v2(0, 2)));
    CHECK(st.push(E2, v2(1, 1), v2(1, 2)));
    CHECK(st.size() == 2);
    CHECK(st.pairs().front().index == 1);
    CHECK(st.pairs().back().index == 2);

    const auto before = storage_to_json(st).dump();
    CHECK(!st.push(E2, v2(1, 0), v2(-1, 0)));
    CHECK(storage_to_json(st).dump() == before);
    CHECK(st.interval_degenerate());
    CHECK(st.gamma_minus() == 0.0);
    CHECK(std::isinf(st.gamma_plus()));

    // Indices keep advancing across a skipped push.
    CHECK(st.push(E2, v2(1, 0), v2(1, 0)));
    CHECK(st.pairs().back().index == 4);
    CHECK_THROWS_AS(st.push(E2, v2(1, 0), v2(1, 0), 2), std::invalid_argument);
}

TEST_CASE("capacity zero keeps no pairs but tracks the BB interval")
{
    Storage st{0};
    CHECK(st.push(E2, v2(1, 0), v2(2, 0)));
    CHECK(st.size() == 0);
    CHECK(st.gamma_minus() == 0.5);
}

TEST_CASE("storage invariants under random pushes")
{
    CounterRng rng{19};
    const Space W{4, 0.5};
    for (std::size_t m : {0u, 1u, 3u, 5u}) {
        Storage st{m};
        for (int i = 0; i < 300; ++i) {
            const Vector s = random_vector(rng, 4);
            const Vector y = random_vector(rng, 4);
            const bool stored = st.push(W, s, y);
            CHECK(stored == (W.inner(s, y) > 0.0));
            CHECK(st.size() <= m);
            std::size_t last = 0;
            bool first = true;
            for (const auto& p : st.pairs()) {
                CHECK(p.sy > 0.0);
                CHECK(p.q == q_metric(W, p.s, p.y));
                if (!first) CHECK(p.index > last);
                last = p.index;
                first = false;
            }
            if (stored) {
                CHECK(st.gamma_minus() > 0.0);
                CHECK(st.gamma_minus() <= st.gamma_plus());
            } else {
                CHECK(st.interval_degenerate());
            }
        }
    }
}

TEST_CASE("active pair selection")
{
    // Pairs constructed with q = 0.5, 1e-6 and 0.3 (s = e1, y = (1/q) e1 gives q = q).
    Storage st{3};
    for (double q : {0.5, 1e-6, 0.3}) st.push(E2, v2(1, 0), v2(1.0 / q, 0));
    REQUIRE(st.size() == 3);
    CHECK(st.pairs()[1].q == doctest::Approx(1e-6));

    const auto act = active_pairs(st, 1e-4);
    REQUIRE(act.size() == 2);
    CHECK(act[0]->index == 0);
    CHECK(act[1]->index == 2);
    CHECK(active_pairs(st, 1e-7).size() == 3);
    CHECK(active_pairs(Storage{2}, 1e-4).empty());
    CHECK(all_pairs(st).size() == 3);
}

TEST_CASE("active set shrinks as omega grows")
{
    CounterRng rng{23};
    Storage st{6};
    while (st.size() < 6) st.push(E2, random_vector(rng, 2), random_vector(rng, 2));
    std::size_t prev = st.size();
    for (double w = 1e-8; w <= 1.0; w *= 1.7) {
        const auto act = active_pairs(st, w);
        CHECK(act.size() <= prev);
        prev = act.size();
    }
}

namespace {

Storage store_with_interval(double gm, double gp)
{
    // s = (1, 0), y = (a, b) gives sy = a, ss = 1, yy = a^2 + b^2.
    // gamma^+ = 1/a, gamma^- = a/(a^2 + b^2).
    const double a = 1.0 / gp;
    const double b = std::sqrt(a / gm - a * a);
    Storage st{2};
    st.push(E2, v2(1, 0), v2(a, b));
    return st;
}

} // namespace

TEST_CASE("choose_gamma")
{
    const auto st = store_with_interval(0.5, 0.5);
    CHECK(choose_gamma(st, 1e-4) == doctest::Approx(0.5));

    CHECK(choose_gamma(Storage{2}, 0.1, 1.0) == 1.0);
    CHECK(choose_gamma(Storage{2}, 0.1, 50.0) == 10.0);

    const auto tiny = store_with_interval(1e-6, 1e-5);
    CHECK(tiny.gamma_minus() == doctest::Approx(1e-6));
    CHECK(tiny.gamma_plus() == doctest::Approx(1e-5));
    CHECK(choose_gamma(tiny, 1e-4) == 1e-4);
    CHECK(choose_gamma_classical(tiny) == doctest::Approx(1e-6));
    CHECK(choose_gamma_classical(Storage{1}) == 1.0);
}

TEST_CASE("choose_gamma stays in [omega, 1/omega] and in the BB interval when possible")
{
    CounterRng rng{29};
    for (int i = 0; i < 2000; ++i) {
        Storage st{1};
        const Vector s = random_vector(rng, 2) * std::exp(3 * rng.normal());
        const Vector y = random_vector(rng, 2);
        st.push(E2, s, y);
        const double w = std::exp(-10.0 * rng.uniform());
        const double g = choose_gamma(st, w);
        CHECK(g >= w);
        CHECK(g <= 1.0 / w);
        if (!st.interval_degenerate() && std::max(st.gamma_minus(), w) <= std::min(st.gamma_plus(), 1.0 / w)) {
            CHECK(g >= st.gamma_minus());
            CHECK(g <= st.gamma_plus());
        }
    }
}
