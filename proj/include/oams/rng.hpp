#pragma once

#include <cmath>
#include <cstdint>

namespace oams {

/// Counter-based stream: the i-th draw is splitmix64(key, i). Two streams
/// with different keys never share state, and a stream can be replayed from
/// any counter position.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0) noexcept
        : key_(mix(key ^ 0x6a09e667f3bcc909ULL)), counter_(counter) {}

    std::uint64_t next() noexcept { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n); n > 0.
    std::uint64_t below(std::uint64_t n) noexcept {
        // Lemire's multiply-shift; the bias is < n / 2^64.
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    /// Exponential(1), used for flat-Dirichlet weights.
    double exponential() noexcept { return -std::log1p(-uniform()); }

    std::uint64_t counter() const noexcept { return counter_; }

private:
    static std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_;
};

} // namespace oams
