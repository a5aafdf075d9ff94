#ifndef QUCOIN_TESTS_BRUTE_FORCE_H
#define QUCOIN_TESTS_BRUTE_FORCE_H

// Exhaustive reference implementations over plain integers, used as the
// independent oracle for the GF(2) and state-vector code at small lambda.

#include <bit>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "qucoin/f2linalg.h"

namespace qucoin::brute {

// Character i of the returned string is integer bit (lambda - 1 - i).
inline std::string bits_of(uint32_t v, size_t lambda) {
    std::string s(lambda, '0');
    for (size_t i = 0; i < lambda; i++) {
        if ((v >> (lambda - 1 - i)) & 1) {
            s[i] = '1';
        }
    }
    return s;
}

inline BitVec vec(uint32_t v, size_t lambda) {
    return BitVec::from_string(bits_of(v, lambda));
}

inline uint32_t to_int(const BitVec &v) {
    uint32_t out = 0;
    for (char c : v.str()) {
        out = (out << 1) | (c == '1' ? 1u : 0u);
    }
    return out;
}

// Closure of the generators under XOR.
inline std::set<uint32_t> span(const std::vector<uint32_t> &gens) {
    std::set<uint32_t> out{0};
    for (uint32_t g : gens) {
        std::set<uint32_t> next = out;
        for (uint32_t v : out) {
            next.insert(v ^ g);
        }
        out = std::move(next);
    }
    return out;
}

inline std::set<uint32_t> span_of(const Subspace &s) {
    std::vector<uint32_t> gens;
    for (const auto &row : s.basis().row_vectors()) {
        gens.push_back(to_int(row));
    }
    return span(gens);
}

inline std::set<uint32_t> orthogonal_complement(const std::set<uint32_t> &points, size_t lambda) {
    std::set<uint32_t> out;
    for (uint32_t t = 0; t < (1u << lambda); t++) {
        bool ok = true;
        for (uint32_t s : points) {
            if (std::popcount(t & s) & 1) {
                ok = false;
                break;
            }
        }
        if (ok) {
            out.insert(t);
        }
    }
    return out;
}

inline std::set<uint32_t> shifted(const std::set<uint32_t> &points, uint32_t shift) {
    std::set<uint32_t> out;
    for (uint32_t p : points) {
        out.insert(p ^ shift);
    }
    return out;
}

}  // namespace qucoin::brute

#endif
