#include "lbfgsm/secant_store.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lbfgsm {

CautiousParams CautiousParams::defaults_for(std::size_t m)
{
    CautiousParams p;
    p.m = m;
    p.c2 = 1.0 / static_cast<double>(2 * m + 3);
    return p;
}

void CautiousParams::validate() const
{
    if (!(c0 > 0.0 && c0 <= 1.0)) throw std::invalid_argument("cautious: c0 must lie in (0, 1]");
    if (!(c1 > 0.0)) throw std::invalid_argument("cautious: c1 must be positive");
    if (!(c2 > 0.0)) throw std::invalid_argument("cautious: c2 must be positive");
}

bool CautiousParams::satisfies_rate_calibration(bool armijo_backtracking) const
{
    const double denom = static_cast<double>(2 * m + (armijo_backtracking ? 1 : 2));
    return c2 < 1.0 / denom;
}

double q_metric(const Space& space, const Vector& s, const Vector& y)
{
    const double ss = space.inner(s, s);
    const double yy = space.inner(y, y);
    if (ss == 0.0 || yy == 0.0) return 0.0;
    const double sy = space.inner(s, y);
    return std::min(sy / ss, sy / yy);
}

double omega(double grad_norm, const CautiousParams& params)
{
    if (!(grad_norm > 0.0))
        throw std::logic_error("omega: gradient norm must be positive (termination should have fired)");
    return std::min(params.c0, params.c1 * std::pow(grad_norm, params.c2));
}

std::pair<double, double> bb_scalars(const Space& space, const Vector& s, const Vector& y)
{
    const double sy = space.inner(s, y);
    if (!(sy > 0.0)) throw std::invalid_argument("bb_scalars: requires (s, y) > 0");
    return {sy / space.inner(y, y), space.inner(s, s) / sy};
}

Storage::Storage(std::size_t capacity) : capacity_{capacity} {}

bool Storage::interval_degenerate() const noexcept
{
    return gamma_minus_ == 0.0 && std::isinf(gamma_plus_);
}

bool Storage::push(const Space& space, const Vector& s, const Vector& y)
{
    return push(space, s, y, next_index_);
}

bool Storage::push(const Space& space, const Vector& s, const Vector& y, std::size_t index)
{
    space.check(s);
    space.check(y);
    if (!pairs_.empty() && index <= pairs_.back().index)
        throw std::invalid_argument("Storage::push: pair indices must increase");
    next_index_ = index + 1;

    const double sy = space.inner(s, y);
    if (!(sy > 0.0)) {
        gamma_minus_ = 0.0;
        gamma_plus_ = std::numeric_limits<double>::infinity();
        return false;
    }

    SecantPair pair;
    pair.s = s;
    pair.y = y;
    pair.sy = sy;
    pair.ss = space.inner(s, s);
    pair.yy = space.inner(y, y);
    pair.q = std::min(sy / pair.ss, sy / pair.yy);
    pair.index = index;

    gamma_minus_ = sy / pair.yy;
    gamma_plus_ = pair.ss / sy;

    pairs_.push_back(std::move(pair));
    if (pairs_.size() > capacity_) pairs_.pop_front();
    return true;
}

std::vector<const SecantPair*> active_pairs(const Storage& store, double omega_k)
{
    std::vector<const SecantPair*> out;
    for (const auto& p : store.pairs())
        if (p.q >= omega_k) out.push_back(&p);
    return out;
}

std::vector<const SecantPair*> all_pairs(const Storage& store)
{
    std::vector<const SecantPair*> out;
    for (const auto& p : store.pairs()) out.push_back(&p);
    return out;
}

double choose_gamma(const Storage& store, double omega_k, double fallback)
{
    const double target = store.interval_degenerate() ? fallback : store.gamma_minus();
    const double lo = std::max(store.gamma_minus(), omega_k);
    const double hi = std::min(store.gamma_plus(), 1.0 / omega_k);
    if (lo <= hi) return std::clamp(target, lo, hi);
    return std::clamp(target, omega_k, 1.0 / omega_k);
}

double choose_gamma_classical(const Storage& store, double fallback)
{
    return store.interval_degenerate() ? fallback : store.gamma_minus();
}

nlohmann::json storage_to_json(const Storage& store)
{
    auto arr = nlohmann::json::array();
    for (const auto& p : store.pairs())
        arr.push_back({{"index", p.index}, {"sy", p.sy}, {"ss", p.ss}, {"yy", p.yy}, {"q", p.q}});
    return arr;
}

} // namespace lbfgsm
