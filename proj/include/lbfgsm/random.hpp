#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace lbfgsm {

/// Counter-based 64-bit generator (splitmix64 finalizer over seed + counter)
/// with Box-Muller normals. Output depends only on (seed, draw index), so
/// streams are reproducible across platforms and standard libraries.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed) noexcept : seed_{seed} {}

    std::uint64_t next_u64() noexcept
    {
        std::uint64_t z = seed_ + 0x9e3779b97f4a7c15ULL * ++counter_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform on (0, 1).
    double uniform() noexcept { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    double normal() noexcept
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double theta = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

  private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace lbfgsm
