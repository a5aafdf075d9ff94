#include "qucoin/rng.h"

namespace qucoin {

uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

uint64_t Rng::below(uint64_t n) {
    if (n <= 1) {
        return 0;
    }
    // Rejection sampling on the top of the range keeps the result unbiased.
    uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t r;
    do {
        r = engine_();
    } while (r >= limit);
    return r % n;
}

Rng Rng::derive(uint64_t stream) const {
    return Rng(splitmix64(seed_ ^ splitmix64(stream + 0x5851F42D4C957F2DULL)));
}

}  // namespace qucoin
