#ifndef QUCOIN_F2LINALG_H
#define QUCOIN_F2LINALG_H

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qucoin/rng.h"

namespace qucoin {

/// A vector over GF(2), bit-packed into 64-bit words.
///
/// Bit 0 is the leftmost character of the textual form, so "1100" has bits 0
/// and 1 set. The hex form reads the same bits as a big-endian integer: bit 0
/// is the most significant bit, which makes "1100" at length 4 equal to "0xC".
/// The length is fixed at construction.
class BitVec {
   public:
    BitVec() = default;
    explicit BitVec(size_t length);

    static BitVec from_string(std::string_view bits);
    static BitVec from_hex(std::string_view hex, size_t length);
    /// Inverse of to_index(): index `i` maps to the binary expansion of i with
    /// bit 0 most significant.
    static BitVec from_index(uint64_t index, size_t length);

    size_t size() const {
        return length_;
    }
    bool get(size_t i) const {
        return (words_[i >> 6] >> (i & 63)) & 1;
    }
    bool operator[](size_t i) const {
        return get(i);
    }
    void set(size_t i, bool value);
    void flip(size_t i) {
        words_[i >> 6] ^= uint64_t{1} << (i & 63);
    }

    BitVec &operator^=(const BitVec &other);
    friend BitVec operator^(BitVec lhs, const BitVec &rhs) {
        lhs ^= rhs;
        return lhs;
    }

    /// Inner product mod 2.
    bool dot(const BitVec &other) const;
    bool is_zero() const;
    size_t popcount() const;
    std::optional<size_t> first_set() const;

    uint64_t to_index() const;
    std::string str() const;
    std::string hex() const;

    std::span<const uint64_t> words() const {
        return words_;
    }

    bool operator==(const BitVec &) const = default;
    auto operator<=>(const BitVec &) const = default;

   private:
    void check_same_length(const BitVec &other) const;

    size_t length_ = 0;
    std::vector<uint64_t> words_;
};

BitVec random_bitvec(size_t length, Rng &rng);

/// Rows of equal length over GF(2).
class F2Matrix {
   public:
    explicit F2Matrix(size_t cols) : cols_(cols) {
    }
    F2Matrix(std::vector<BitVec> rows, size_t cols);
    static F2Matrix from_strings(std::initializer_list<std::string_view> rows);

    size_t rows() const {
        return rows_.size();
    }
    size_t cols() const {
        return cols_;
    }
    const BitVec &row(size_t i) const {
        return rows_[i];
    }
    const std::vector<BitVec> &row_vectors() const {
        return rows_;
    }
    void push_row(BitVec row);

    size_t rank() const;

    /// Row-wise XOR with a matrix of identical shape.
    F2Matrix &operator^=(const F2Matrix &other);

    bool operator==(const F2Matrix &) const = default;

   private:
    size_t cols_;
    std::vector<BitVec> rows_;
};

/// Reduced row echelon form with zero rows dropped. Pivots are chosen left to
/// right (bit 0 first), so the result is unique for a given row span.
F2Matrix rref(const F2Matrix &m);

F2Matrix random_matrix(size_t rows, size_t cols, Rng &rng);

/// A linear subspace of GF(2)^ambient, stored as its rref basis.
class Subspace {
   public:
    /// The zero subspace.
    explicit Subspace(size_t ambient);
    static Subspace span(const F2Matrix &generators);
    static Subspace span(const std::vector<BitVec> &generators, size_t ambient);
    static Subspace full(size_t ambient);

    size_t dim() const {
        return basis_.rows();
    }
    size_t ambient() const {
        return basis_.cols();
    }
    const F2Matrix &basis() const {
        return basis_;
    }
    const std::vector<size_t> &pivots() const {
        return pivots_;
    }

    bool contains(const BitVec &v) const;
    /// Canonical representative of v + S: v with every pivot position cleared.
    BitVec reduce(const BitVec &v) const;
    /// Element selected by the low dim() bits of `coefficients`.
    BitVec element(uint64_t coefficients) const;
    /// All 2^dim members; dim must be small.
    std::vector<BitVec> elements() const;

    bool operator==(const Subspace &other) const {
        return basis_ == other.basis_;
    }

   private:
    explicit Subspace(F2Matrix reduced);

    F2Matrix basis_;
    std::vector<size_t> pivots_;
};

bool member(const Subspace &s, const BitVec &v);
Subspace dual(const Subspace &s);

/// Uniform dim-dimensional subspace: random dim x lambda matrices are drawn
/// until one has full rank.
Subspace random_subspace(size_t lambda, size_t dim, Rng &rng);

struct SubspaceSplit {
    Subspace low;  // S0, codimension one in the input
    BitVec w;      // S = S0 u (S0 + w)
};

/// Drops one randomly chosen basis row: S0 is the span of the rest and w the
/// dropped row.
SubspaceSplit split_subspace(const Subspace &s, Rng &rng);

/// An affine set space + shift. The stored shift is the canonical
/// representative, so equal point sets compare equal.
class Coset {
   public:
    Coset(Subspace space, const BitVec &shift);

    const Subspace &space() const {
        return space_;
    }
    const BitVec &shift() const {
        return shift_;
    }
    bool contains(const BitVec &v) const;

    bool operator==(const Coset &) const = default;

   private:
    Subspace space_;
    BitVec shift_;
};

bool coset_member(const Coset &c, const BitVec &v);

nlohmann::json to_json(const Subspace &s);
Subspace subspace_from_json(const nlohmann::json &j);

}  // namespace qucoin

#endif
