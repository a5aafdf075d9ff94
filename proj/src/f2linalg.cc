#include "qucoin/f2linalg.h"

#include <bit>
#include <utility>

#include "qucoin/errors.h"

namespace qucoin {

namespace {

size_t word_count(size_t length) {
    return (length + 63) / 64;
}

int hex_value(char c) {
    if (c >= '0' && c <= '9') {
        return c - '0';
    }
    if (c >= 'a' && c <= 'f') {
        return c - 'a' + 10;
    }
    if (c >= 'A' && c <= 'F') {
        return c - 'A' + 10;
    }
    return -1;
}

}  // namespace

BitVec::BitVec(size_t length) : length_(length), words_(word_count(length), 0) {
}

BitVec BitVec::from_string(std::string_view bits) {
    BitVec v(bits.size());
    for (size_t i = 0; i < bits.size(); i++) {
        if (bits[i] == '1') {
            v.set(i, true);
        } else if (bits[i] != '0') {
            throw Error(ErrorCode::kInvalidArgument, "bit string contains '" + std::string(1, bits[i]) + "'");
        }
    }
    return v;
}

BitVec BitVec::from_hex(std::string_view hex, size_t length) {
    if (hex.starts_with("0x") || hex.starts_with("0X")) {
        hex.remove_prefix(2);
    }
    if (hex.empty()) {
        throw Error(ErrorCode::kInvalidArgument, "empty hex string");
    }
    BitVec v(length);
    // k counts integer bit positions from the least significant end.
    size_t k = 0;
    for (size_t pos = hex.size(); pos-- > 0;) {
        int d = hex_value(hex[pos]);
        if (d < 0) {
            throw Error(ErrorCode::kInvalidArgument, "bad hex digit in '" + std::string(hex) + "'");
        }
        for (int j = 0; j < 4; j++, k++) {
            if (((d >> j) & 1) == 0) {
                continue;
            }
            if (k >= length) {
                throw Error(ErrorCode::kLengthMismatch, "hex value does not fit in " + std::to_string(length) + " bits");
            }
            v.set(length - 1 - k, true);
        }
    }
    return v;
}

BitVec BitVec::from_index(uint64_t index, size_t length) {
    if (length > 64 || (length < 64 && (index >> length) != 0)) {
        throw Error(ErrorCode::kLengthMismatch, "index does not fit in " + std::to_string(length) + " bits");
    }
    BitVec v(length);
    for (size_t i = 0; i < length; i++) {
        if ((index >> (length - 1 - i)) & 1) {
            v.set(i, true);
        }
    }
    return v;
}

void BitVec::set(size_t i, bool value) {
    uint64_t mask = uint64_t{1} << (i & 63);
    if (value) {
        words_[i >> 6] |= mask;
    } else {
        words_[i >> 6] &= ~mask;
    }
}

void BitVec::check_same_length(const BitVec &other) const {
    if (other.length_ != length_) {
        throw Error(
            ErrorCode::kLengthMismatch,
            "bit vectors of length " + std::to_string(length_) + " and " + std::to_string(other.length_));
    }
}

BitVec &BitVec::operator^=(const BitVec &other) {
    check_same_length(other);
    for (size_t k = 0; k < words_.size(); k++) {
        words_[k] ^= other.words_[k];
    }
    return *this;
}

bool BitVec::dot(const BitVec &other) const {
    check_same_length(other);
    uint64_t acc = 0;
    for (size_t k = 0; k < words_.size(); k++) {
        acc ^= words_[k] & other.words_[k];
    }
    return std::popcount(acc) & 1;
}

bool BitVec::is_zero() const {
    for (uint64_t w : words_) {
        if (w) {
            return false;
        }
    }
    return true;
}

size_t BitVec::popcount() const {
    size_t n = 0;
    for (uint64_t w : words_) {
        n += std::popcount(w);
    }
    return n;
}

std::optional<size_t> BitVec::first_set() const {
    for (size_t k = 0; k < words_.size(); k++) {
        if (words_[k]) {
            return k * 64 + std::countr_zero(words_[k]);
        }
    }
    return std::nullopt;
}

uint64_t BitVec::to_index() const {
    if (length_ > 64) {
        throw Error(ErrorCode::kLengthMismatch, "bit vector too long for an index");
    }
    uint64_t index = 0;
    for (size_t i = 0; i < length_; i++) {
        index = (index << 1) | (get(i) ? 1 : 0);
    }
    return index;
}

std::string BitVec::str() const {
    std::string out(length_, '0');
    for (size_t i = 0; i < length_; i++) {
        if (get(i)) {
            out[i] = '1';
        }
    }
    return out;
}

std::string BitVec::hex() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    size_t digits = (length_ + 3) / 4;
    if (digits == 0) {
        return "0x0";
    }
    std::string out(digits, '0');
    for (size_t k = 0; k < length_; k++) {
        if (get(length_ - 1 - k)) {
            size_t d = digits - 1 - k / 4;
            out[d] = kDigits[hex_value(out[d]) | (1 << (k % 4))];
        }
    }
    return "0x" + out;
}

BitVec random_bitvec(size_t length, Rng &rng) {
    BitVec v(length);
    for (size_t i = 0; i < length; i++) {
        v.set(i, rng.bit());
    }
    return v;
}

F2Matrix::F2Matrix(std::vector<BitVec> rows, size_t cols) : cols_(cols), rows_(std::move(rows)) {
    for (const auto &r : rows_) {
        if (r.size() != cols_) {
            throw Error(ErrorCode::kLengthMismatch, "matrix rows must all have length " + std::to_string(cols_));
        }
    }
}

F2Matrix F2Matrix::from_strings(std::initializer_list<std::string_view> rows) {
    std::vector<BitVec> out;
    for (auto r : rows) {
        out.push_back(BitVec::from_string(r));
    }
    size_t cols = out.empty() ? 0 : out.front().size();
    return F2Matrix(std::move(out), cols);
}

void F2Matrix::push_row(BitVec row) {
    if (row.size() != cols_) {
        throw Error(ErrorCode::kLengthMismatch, "matrix rows must all have length " + std::to_string(cols_));
    }
    rows_.push_back(std::move(row));
}

size_t F2Matrix::rank() const {
    return rref(*this).rows();
}

F2Matrix &F2Matrix::operator^=(const F2Matrix &other) {
    if (other.rows() != rows() || other.cols() != cols()) {
        throw Error(ErrorCode::kLengthMismatch, "matrix shapes differ");
    }
    for (size_t i = 0; i < rows_.size(); i++) {
        rows_[i] ^= other.rows_[i];
    }
    return *this;
}

F2Matrix rref(const F2Matrix &m) {
    std::vector<BitVec> rows = m.row_vectors();
    size_t lead = 0;
    for (size_t col = 0; col < m.cols() && lead < rows.size(); col++) {
        size_t pivot = lead;
        while (pivot < rows.size() && !rows[pivot].get(col)) {
            pivot++;
        }
        if (pivot == rows.size()) {
            continue;
        }
        std::swap(rows[lead], rows[pivot]);
        for (size_t r = 0; r < rows.size(); r++) {
            if (r != lead && rows[r].get(col)) {
                rows[r] ^= rows[lead];
            }
        }
        lead++;
    }
    rows.resize(lead);
    return F2Matrix(std::move(rows), m.cols());
}

F2Matrix random_matrix(size_t rows, size_t cols, Rng &rng) {
    F2Matrix m(cols);
    for (size_t i = 0; i < rows; i++) {
        m.push_row(random_bitvec(cols, rng));
    }
    return m;
}

Subspace::Subspace(size_t ambient) : basis_(ambient) {
}

Subspace::Subspace(F2Matrix reduced) : basis_(std::move(reduced)) {
    for (const auto &row : basis_.row_vectors()) {
        pivots_.push_back(*row.first_set());
    }
}

Subspace Subspace::span(const F2Matrix &generators) {
    return Subspace(rref(generators));
}

Subspace Subspace::span(const std::vector<BitVec> &generators, size_t ambient) {
    return span(F2Matrix(generators, ambient));
}

Subspace Subspace::full(size_t ambient) {
    F2Matrix id(ambient);
    for (size_t i = 0; i < ambient; i++) {
        BitVec e(ambient);
        e.set(i, true);
        id.push_row(std::move(e));
    }
    return Subspace(std::move(id));
}

BitVec Subspace::reduce(const BitVec &v) const {
    if (v.size() != ambient()) {
        throw Error(
            ErrorCode::kLengthMismatch,
            "vector of length " + std::to_string(v.size()) + " tested against subspace of GF(2)^" +
                std::to_string(ambient()));
    }
    BitVec r = v;
    for (size_t i = 0; i < pivots_.size(); i++) {
        if (r.get(pivots_[i])) {
            r ^= basis_.row(i);
        }
    }
    return r;
}

bool Subspace::contains(const BitVec &v) const {
    return reduce(v).is_zero();
}

BitVec Subspace::element(uint64_t coefficients) const {
    BitVec v(ambient());
    for (size_t i = 0; i < dim(); i++) {
        if ((coefficients >> i) & 1) {
            v ^= basis_.row(i);
        }
    }
    return v;
}

std::vector<BitVec> Subspace::elements() const {
    if (dim() > 30) {
        throw Error(ErrorCode::kBackendCapacity, "subspace too large to enumerate");
    }
    std::vector<BitVec> out;
    out.reserve(size_t{1} << dim());
    for (uint64_t c = 0; c < (uint64_t{1} << dim()); c++) {
        out.push_back(element(c));
    }
    return out;
}

bool member(const Subspace &s, const BitVec &v) {
    return s.contains(v);
}

Subspace dual(const Subspace &s) {
    size_t n = s.ambient();
    std::vector<bool> is_pivot(n, false);
    for (size_t p : s.pivots()) {
        is_pivot[p] = true;
    }
    // One null-space vector per free column f: t[f] = 1 and t[p_i] = basis_i[f].
    std::vector<BitVec> gens;
    for (size_t f = 0; f < n; f++) {
        if (is_pivot[f]) {
            continue;
        }
        BitVec t(n);
        t.set(f, true);
        for (size_t i = 0; i < s.dim(); i++) {
            if (s.basis().row(i).get(f)) {
                t.set(s.pivots()[i], true);
            }
        }
        gens.push_back(std::move(t));
    }
    return Subspace::span(gens, n);
}

Subspace random_subspace(size_t lambda, size_t dim, Rng &rng) {
    if (dim > lambda) {
        throw Error(
            ErrorCode::kDimensionOutOfRange,
            "cannot sample a " + std::to_string(dim) + "-dimensional subspace of GF(2)^" + std::to_string(lambda));
    }
    while (true) {
        F2Matrix m = random_matrix(dim, lambda, rng);
        Subspace s = Subspace::span(m);
        if (s.dim() == dim) {
            return s;
        }
    }
}

SubspaceSplit split_subspace(const Subspace &s, Rng &rng) {
    if (s.dim() == 0) {
        throw Error(ErrorCode::kDimensionOutOfRange, "cannot split the zero subspace");
    }
    size_t drop = rng.below(s.dim());
    std::vector<BitVec> kept;
    for (size_t i = 0; i < s.dim(); i++) {
        if (i != drop) {
            kept.push_back(s.basis().row(i));
        }
    }
    return SubspaceSplit{Subspace::span(kept, s.ambient()), s.basis().row(drop)};
}

Coset::Coset(Subspace space, const BitVec &shift) : space_(std::move(space)), shift_(space_.reduce(shift)) {
}

bool Coset::contains(const BitVec &v) const {
    return space_.contains(v ^ shift_);
}

bool coset_member(const Coset &c, const BitVec &v) {
    return c.contains(v);
}

nlohmann::json to_json(const Subspace &s) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto &r : s.basis().row_vectors()) {
        rows.push_back(r.hex());
    }
    return {{"ambient", s.ambient()}, {"basis", rows}};
}

Subspace subspace_from_json(const nlohmann::json &j) {
    size_t ambient = j.at("ambient").get<size_t>();
    std::vector<BitVec> rows;
    for (const auto &r : j.at("basis")) {
        rows.push_back(BitVec::from_hex(r.get<std::string>(), ambient));
    }
    return Subspace::span(rows, ambient);
}

}  // namespace qucoin
