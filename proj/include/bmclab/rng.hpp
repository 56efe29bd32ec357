#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

// Counter-based random numbers (Philox 2x64-10, Salmon et al., SC 2011).
// Every draw is a pure function of (seed, stream, counter), so replicas and
// per-site draws are reproducible regardless of traversal or thread order.

namespace bmclab {

namespace detail {

constexpr std::uint64_t kPhiloxM2x64 = 0xD2B74407B1CE6E93ULL;
constexpr std::uint64_t kPhiloxW64   = 0x9E3779B97F4A7C15ULL;

inline void mulhilo64(std::uint64_t a, std::uint64_t b,
                      std::uint64_t& hi, std::uint64_t& lo) {
    __uint128_t p = static_cast<__uint128_t>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
}

} // namespace detail

/// One Philox 2x64-10 block: 128 bits of output for a (counter, stream) pair
/// under a 64-bit key.
inline std::array<std::uint64_t, 2> philox2x64(std::uint64_t counter,
                                               std::uint64_t stream,
                                               std::uint64_t key) {
    std::uint64_t c0 = counter;
    std::uint64_t c1 = stream;
    std::uint64_t k = key;
    for (int round = 0; round < 10; ++round) {
        std::uint64_t hi, lo;
        detail::mulhilo64(detail::kPhiloxM2x64, c0, hi, lo);
        c0 = hi ^ k ^ c1;
        c1 = lo;
        k += detail::kPhiloxW64;
    }
    return {c0, c1};
}

/// Map 64 random bits to a double in [0, 1).
inline double u64_to_unit_double(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

// Stream-id namespaces. Environment sampling, frozen-run replicas and
// probe replicas must never share a stream under the same seed.
constexpr std::uint64_t kEnvironmentStream = 0x01;
constexpr std::uint64_t kReplicaStreamBase = 0x100000000ULL;
constexpr std::uint64_t kProbeStreamBase = 0x200000000ULL;

/// Stateful view of one Philox stream: (seed, stream) fixed, counter advances.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream) {}

    std::uint64_t next_u64() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        auto block = philox2x64(counter_++, stream_, seed_);
        spare_ = block[1];
        have_spare_ = true;
        return block[0];
    }

    double next_unit() { return u64_to_unit_double(next_u64()); }

    /// Index into a cumulative probability vector by inverse CDF.
    /// `cdf` must be non-decreasing with back() == 1 (within rounding).
    std::size_t pick(std::span<const double> cdf) {
        double u = next_unit();
        std::size_t lo = 0, hi = cdf.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (u < cdf[mid])
                hi = mid;
            else
                lo = mid + 1;
        }
        return lo;
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::uint64_t spare_ = 0;
    bool have_spare_ = false;
};

/// Build a cumulative vector from weights (no normalization; callers validate).
inline std::vector<double> cumulative(std::span<const double> weights) {
    std::vector<double> cdf(weights.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        cdf[i] = acc;
    }
    if (!cdf.empty()) cdf.back() = 1.0;
    return cdf;
}

} // namespace bmclab
