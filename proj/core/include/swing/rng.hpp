#pragma once

#include <cstdint>

namespace swing {

/// 64-bit avalanche mixer (SplitMix64 finalizer).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives an independent child seed from a parent seed and a tag.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept {
    return mix64(seed ^ mix64(tag + 0x632be59bd9b4e019ULL));
}

/// Counter-based generator: the stream is a pure function of
/// (seed, stream, substream, counter), so draws for a given path and date do
/// not depend on the order in which paths are simulated.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream = 0) noexcept;

    std::uint64_t next_u64() noexcept;

    /// Uniform on the open interval (0, 1).
    double uniform() noexcept;

    /// Standard normal via Box-Muller; the spare variate is cached.
    double normal() noexcept;

    /// Exponential with unit rate.
    double exponential() noexcept;

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace swing
