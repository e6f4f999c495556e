#pragma once

#include "lbfgsm/space.hpp"

#include <json.hpp>

#include <cstddef>
#include <deque>
#include <limits>
#include <utility>
#include <vector>

namespace lbfgsm {

/// A stored secant pair s_k = x_{k+1} - x_k, y_k = g_{k+1} - g_k together
/// with the scalars derived from it at push time. The pair is immutable once
/// stored, so q is never recomputed.
struct SecantPair {
    Vector s;
    Vector y;
    double sy = 0.0;
    double ss = 0.0;
    double yy = 0.0;
    double q = 0.0;
    std::size_t index = 0;
};

/// Constants of the cautious threshold omega_k = min{c0, c1 * |g_k|^c2}.
struct CautiousParams {
    double c0 = 1e-4;
    double c1 = 1.0;
    double c2 = 1.0 / 7.0;
    std::size_t m = 2;

    /// c0 = 1e-4, c1 = 1, c2 = 1/(2m+3).
    static CautiousParams defaults_for(std::size_t m);

    /// Throws std::invalid_argument unless c0 in (0,1], c1 > 0, c2 > 0.
    void validate() const;

    /// Whether c2 satisfies the calibration needed for the linear rate:
    /// c2 < 1/(2m+1) with Armijo backtracking, c2 < 1/(2m+2) otherwise.
    bool satisfies_rate_calibration(bool armijo_backtracking) const;
};

/// min{ (s,y)/(s,s), (s,y)/(y,y) } if s != 0 and y != 0, else exactly 0.
double q_metric(const Space& space, const Vector& s, const Vector& y);

/// omega_k = min{c0, c1 * grad_norm^c2}. grad_norm must be positive.
double omega(double grad_norm, const CautiousParams& params);

/// Barzilai-Borwein scalars (gamma^-, gamma^+) = ((s,y)/(y,y), (s,s)/(s,y)).
/// Requires (s,y) > 0.
std::pair<double, double> bb_scalars(const Space& space, const Vector& s, const Vector& y);

/// Bounded FIFO of secant pairs with the BB interval of the latest update.
class Storage {
  public:
    explicit Storage(std::size_t capacity);

    /// Stores (s, y) if (s,y) > 0, evicting the oldest pair on overflow, and
    /// refreshes (gamma^-, gamma^+). Otherwise leaves the pairs untouched and
    /// resets the interval to (0, +inf). Returns whether the pair was stored.
    /// `index` is the iteration of origin and must exceed every stored index.
    bool push(const Space& space, const Vector& s, const Vector& y, std::size_t index);
    /// Same, with index one past the last index pushed.
    bool push(const Space& space, const Vector& s, const Vector& y);

    const std::deque<SecantPair>& pairs() const noexcept { return pairs_; }
    std::size_t size() const noexcept { return pairs_.size(); }
    std::size_t capacity() const noexcept { return capacity_; }
    double gamma_minus() const noexcept { return gamma_minus_; }
    double gamma_plus() const noexcept { return gamma_plus_; }
    /// True while (gamma^-, gamma^+) = (0, inf): at start or after a skip.
    bool interval_degenerate() const noexcept;

  private:
    std::size_t capacity_;
    std::deque<SecantPair> pairs_;
    double gamma_minus_ = 0.0;
    double gamma_plus_ = std::numeric_limits<double>::infinity();
    std::size_t next_index_ = 0;
};

/// Stored pairs with q >= omega_k, oldest first.
std::vector<const SecantPair*> active_pairs(const Storage& store, double omega_k);
/// All stored pairs, oldest first.
std::vector<const SecantPair*> all_pairs(const Storage& store);

/// Seed scaling of the cautious method. Target gamma^- (or `fallback` while
/// the interval is degenerate), clamped into [gamma^-, gamma^+] n [w, 1/w]
/// when that is nonempty, else into [w, 1/w].
double choose_gamma(const Storage& store, double omega_k, double fallback = 1.0);

/// Seed scaling of classical L-BFGS/BB: gamma^- unclamped, `fallback` while
/// the interval is degenerate.
double choose_gamma_classical(const Storage& store, double fallback = 1.0);

/// Scalars of every stored pair (index, sy, ss, yy, q); s and y are omitted.
nlohmann::json storage_to_json(const Storage& store);

} // namespace lbfgsm
