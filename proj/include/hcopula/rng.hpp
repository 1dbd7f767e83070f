#pragma once

#include <cstdint>
#include <random>

// Seeded, stream-indexed random number generation. Every sampling routine in
// the library draws from a StreamRng keyed by (seed, stream index), so a
// sample path depends only on its own index. Batches are therefore identical
// no matter how the work is split across threads, and extending a path to
// more coordinates never disturbs the values already drawn.

namespace hcopula {

/// One mixing step of the splitmix64 generator (Vigna); also used to spread
/// (seed, stream) pairs into well-separated mt19937_64 seeds.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed;
    const std::uint64_t a = splitmix64_next(s);
    s ^= stream * 0xD1342543DE82EF95ull + 0x2545F4914F6CDD1Dull;
    const std::uint64_t b = splitmix64_next(s);
    return a ^ (b + 0x9E3779B97F4A7C15ull);
}

/// Deterministic per-stream generator producing uniforms in the open (0,1).
class StreamRng {
  public:
    StreamRng(std::uint64_t seed, std::uint64_t stream)
        : engine_(mix_seed(seed, stream)) {}

    /// Uniform on the open interval: bin centers (j + 0.5) / 2^53, never 0 or 1.
    double uniform_open() {
        const std::uint64_t bits = engine_() >> 11;
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace hcopula
