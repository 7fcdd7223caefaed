#ifndef SRDA_RNG_HPP
#define SRDA_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "srda/error.hpp"

namespace srda {

/// splitmix64 hash step; used to derive independent seeds from a base seed.
std::uint64_t splitmix64(std::uint64_t x);

/// Deterministic seed derivation: same (base, tag) always gives the same seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag);

/// Seeded random source.
///
/// All draws come from a mt19937_64 engine, whose output stream is pinned
/// bit-for-bit by the C++ standard, so identical seeds give identical draws
/// on every platform. The distribution transforms (uniform doubles,
/// Box-Muller normals, rejection-sampled integers) are implemented here
/// rather than taken from <random>, where they are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal draw (Box-Muller; the second variate is cached).
    double normal();

    /// Uniform integer in [0, n); rejection sampling, no modulo bias.
    std::size_t index(std::size_t n);

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[index(i)]);
        }
    }

    /// Independent child stream. Depends only on the constructing seed and
    /// the tag, not on how many draws this stream has produced.
    Rng child(std::uint64_t tag) const { return Rng(derive_seed(seed_, tag)); }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace srda

#endif
