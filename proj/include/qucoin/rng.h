#ifndef QUCOIN_RNG_H
#define QUCOIN_RNG_H

#include <cstdint>
#include <random>

namespace qucoin {

/// Seeded random source passed explicitly to every randomized operation.
///
/// Built on std::mt19937_64, whose output sequence is fixed by the standard.
/// The helpers below avoid std::uniform_*_distribution because those are
/// implementation-defined and would make traces differ between toolchains.
class Rng {
   public:
    explicit Rng(uint64_t seed) : seed_(seed), engine_(seed) {
    }

    uint64_t seed() const {
        return seed_;
    }
    uint64_t next_u64() {
        return engine_();
    }
    bool bit() {
        return (engine_() >> 63) != 0;
    }
    /// Uniform integer in [0, n). n must be positive.
    uint64_t below(uint64_t n);
    /// Uniform double in [0, 1) with 53 bits of randomness.
    double unit() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Independent stream for sub-task `stream`, stable across runs.
    Rng derive(uint64_t stream) const;

   private:
    uint64_t seed_;
    std::mt19937_64 engine_;
};

uint64_t splitmix64(uint64_t x);

}  // namespace qucoin

#endif
