#include "qucoin/qfhe.h"

#include <bit>
#include <string_view>
#include <utility>

#include "json.hpp"
#include "qucoin/errors.h"

namespace qucoin {

namespace {

using Material = std::array<uint64_t, 4>;

uint64_t keystream_word(const Material &k, uint64_t nonce, uint64_t block) {
    return splitmix64(k[0] ^ splitmix64(nonce ^ splitmix64(k[1] + block)));
}

uint64_t tag_of(const Material &k, uint64_t nonce, std::span<const uint8_t> message) {
    uint64_t h = splitmix64(k[2] ^ nonce);
    for (uint8_t b : message) {
        h = splitmix64(h ^ k[3] ^ b);
    }
    return splitmix64(h ^ message.size());
}

void put_u64(std::vector<uint8_t> &out, uint64_t v) {
    for (int i = 0; i < 8; i++) {
        out.push_back(static_cast<uint8_t>(v >> (8 * i)));
    }
}

uint64_t get_u64(std::span<const uint8_t> in) {
    uint64_t v = 0;
    for (int i = 0; i < 8; i++) {
        v |= static_cast<uint64_t>(in[i]) << (8 * i);
    }
    return v;
}

// payload = nonce || (message xor keystream) || tag
SealedCiphertext seal_with(const Material &k, const std::string &key_id, std::span<const uint8_t> message, Rng &rng) {
    uint64_t nonce = rng.next_u64();
    SealedCiphertext ct{{}, key_id};
    ct.payload.reserve(message.size() + 16);
    put_u64(ct.payload, nonce);
    for (size_t i = 0; i < message.size(); i++) {
        uint64_t w = keystream_word(k, nonce, i / 8);
        ct.payload.push_back(message[i] ^ static_cast<uint8_t>(w >> (8 * (i % 8))));
    }
    put_u64(ct.payload, tag_of(k, nonce, message));
    return ct;
}

std::vector<uint8_t> open_with(const Material &k, const std::string &key_id, const SealedCiphertext &ct) {
    if (ct.key_id != key_id) {
        throw Error(ErrorCode::kWrongKey, "ciphertext sealed under '" + ct.key_id + "', not '" + key_id + "'");
    }
    if (ct.payload.size() < 16) {
        throw Error(ErrorCode::kWrongKey, "truncated ciphertext");
    }
    std::span<const uint8_t> p(ct.payload);
    uint64_t nonce = get_u64(p.first(8));
    auto body = p.subspan(8, p.size() - 16);
    std::vector<uint8_t> message(body.size());
    for (size_t i = 0; i < body.size(); i++) {
        uint64_t w = keystream_word(k, nonce, i / 8);
        message[i] = body[i] ^ static_cast<uint8_t>(w >> (8 * (i % 8)));
    }
    if (get_u64(p.last(8)) != tag_of(k, nonce, message)) {
        throw Error(ErrorCode::kWrongKey, "ciphertext does not authenticate under '" + key_id + "'");
    }
    return message;
}

std::vector<uint8_t> bytes_of(const nlohmann::json &j) {
    std::string s = j.dump();
    return std::vector<uint8_t>(s.begin(), s.end());
}

nlohmann::json json_of(const std::vector<uint8_t> &bytes) {
    return nlohmann::json::parse(std::string(bytes.begin(), bytes.end()));
}

nlohmann::json matrix_json(const F2Matrix &m) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto &r : m.row_vectors()) {
        rows.push_back(r.hex());
    }
    return {{"cols", m.cols()}, {"rows", rows}};
}

F2Matrix matrix_from_json(const nlohmann::json &j) {
    size_t cols = j.at("cols").get<size_t>();
    F2Matrix m(cols);
    for (const auto &r : j.at("rows")) {
        m.push_row(BitVec::from_hex(r.get<std::string>(), cols));
    }
    return m;
}

std::string to_hex_bytes(const std::vector<uint8_t> &bytes) {
    static const char *digits = "0123456789abcdef";
    std::string out;
    for (uint8_t b : bytes) {
        out += digits[b >> 4];
        out += digits[b & 15];
    }
    return out;
}

std::vector<uint8_t> from_hex_bytes(const std::string &hex) {
    if (hex.size() % 2 != 0) {
        throw Error(ErrorCode::kMalformedRequest, "odd-length byte string");
    }
    auto nibble = [](char c) -> uint8_t {
        if (c >= '0' && c <= '9') {
            return c - '0';
        }
        if (c >= 'a' && c <= 'f') {
            return c - 'a' + 10;
        }
        throw Error(ErrorCode::kMalformedRequest, "bad hex digit");
    };
    std::vector<uint8_t> out;
    for (size_t i = 0; i < hex.size(); i += 2) {
        out.push_back(static_cast<uint8_t>(nibble(hex[i]) << 4 | nibble(hex[i + 1])));
    }
    return out;
}

}  // namespace

nlohmann::json to_json(const SealedCiphertext &ct) {
    return {{"key_id", ct.key_id}, {"payload", to_hex_bytes(ct.payload)}};
}

SealedCiphertext sealed_ciphertext_from_json(const nlohmann::json &j) {
    return SealedCiphertext{from_hex_bytes(j.at("payload").get<std::string>()), j.at("key_id").get<std::string>()};
}

nlohmann::json to_json(const MintRequest &req) {
    return {{"masked_matrix", matrix_json(req.masked_matrix)}, {"ct_pad", to_json(req.ct_pad)}};
}

MintRequest mint_request_from_json(const nlohmann::json &j) {
    return MintRequest{matrix_from_json(j.at("masked_matrix")), sealed_ciphertext_from_json(j.at("ct_pad"))};
}

StateVector qotp_encrypt(const StateVector &s, const QotpKeys &keys) {
    if (keys.x_pad.size() != s.lambda() || keys.z_pad.size() != s.lambda()) {
        throw Error(ErrorCode::kLengthMismatch, "pad length differs from register size");
    }
    uint64_t x = keys.x_pad.to_index();
    uint64_t z = keys.z_pad.to_index();
    auto in = s.amplitudes();
    std::vector<Amplitude> out(in.size());
    for (uint64_t i = 0; i < in.size(); i++) {
        Amplitude a = in[i];
        if (std::popcount(i & z) & 1) {
            a = -a;
        }
        out[i ^ x] = a;
    }
    return StateVector::from_amplitudes(s.lambda(), std::move(out));
}

CosetState qotp_encrypt(const CosetState &c, const QotpKeys &keys) {
    if (keys.x_pad.size() != c.lambda() || keys.z_pad.size() != c.lambda()) {
        throw Error(ErrorCode::kLengthMismatch, "pad length differs from register size");
    }
    return CosetState(c.space(), c.shift() ^ keys.x_pad, c.phase() ^ keys.z_pad);
}

UnitState qotp_encrypt(const UnitState &s, const QotpKeys &keys) {
    return std::visit([&](const auto &st) -> UnitState { return qotp_encrypt(st, keys); }, s);
}

void Keyring::generate(const std::string &key_id, Rng &rng) {
    Material m{rng.next_u64(), rng.next_u64(), rng.next_u64(), rng.next_u64()};
    if (!keys_.emplace(key_id, m).second) {
        throw Error(ErrorCode::kRejected, "key '" + key_id + "' already exists");
    }
}

const Keyring::Material &Keyring::material(const std::string &key_id) const {
    auto it = keys_.find(key_id);
    if (it == keys_.end()) {
        throw Error(ErrorCode::kWrongKey, "no key '" + key_id + "' in this keyring");
    }
    return it->second;
}

SealedCiphertext Keyring::seal(const std::string &key_id, std::span<const uint8_t> message, Rng &rng) const {
    return seal_with(material(key_id), key_id, message, rng);
}

std::vector<uint8_t> Keyring::unseal(const std::string &key_id, const SealedCiphertext &ct) const {
    unseal_audit_[key_id]++;
    return open_with(material(key_id), key_id, ct);
}

size_t Keyring::unseal_count(const std::string &key_id) const {
    auto it = unseal_audit_.find(key_id);
    return it == unseal_audit_.end() ? 0 : it->second;
}

EvaluationKey Keyring::evaluation_key(const std::string &key_id) const {
    return EvaluationKey(key_id, material(key_id));
}

std::vector<uint8_t> EvaluationKey::open(const SealedCiphertext &ct) const {
    return open_with(material_, key_id_, ct);
}

SealedCiphertext EvaluationKey::seal(std::span<const uint8_t> message, Rng &rng) const {
    return seal_with(material_, key_id_, message, rng);
}

PreparedMintRequest prepare_mint_request(size_t lambda, const Keyring &bank, const std::string &key_id, Rng &rng) {
    if (lambda < 2 || lambda % 2 != 0) {
        throw Error(ErrorCode::kInvalidArgument, "lambda must be even and at least 2");
    }
    F2Matrix m_s = random_matrix(lambda / 2, lambda, rng);
    while (m_s.rank() != lambda / 2) {
        m_s = random_matrix(lambda / 2, lambda, rng);
    }
    Subspace space = Subspace::span(m_s);
    F2Matrix pad = random_matrix(lambda / 2, lambda, rng);
    F2Matrix masked = m_s;
    masked ^= pad;
    SealedCiphertext ct = bank.seal(key_id, bytes_of(matrix_json(pad)), rng);
    return PreparedMintRequest{MintRequest{std::move(masked), std::move(ct)}, std::move(space)};
}

MintResponse delegated_mint(const MintRequest &req, const EvaluationKey &key, Rng &rng, Backend backend) {
    const F2Matrix &masked = req.masked_matrix;
    size_t lambda = masked.cols();
    if (lambda < 2 || lambda % 2 != 0 || masked.rows() * 2 != lambda) {
        throw Error(ErrorCode::kMalformedRequest, "masked matrix must be (lambda/2) x lambda with even lambda");
    }
    F2Matrix m_s = masked;
    try {
        m_s ^= matrix_from_json(json_of(key.open(req.ct_pad)));
    } catch (const nlohmann::json::exception &) {
        throw Error(ErrorCode::kMalformedRequest, "sealed pad does not decode to a matrix");
    } catch (const Error &e) {
        if (e.code() == ErrorCode::kLengthMismatch) {
            throw Error(ErrorCode::kMalformedRequest, "pad shape differs from the masked matrix");
        }
        throw;
    }
    Subspace space = Subspace::span(m_s);
    if (space.dim() != lambda / 2) {
        throw Error(ErrorCode::kMalformedRequest, "subspace matrix is rank deficient");
    }

    // Fresh pads on every evaluation: identical requests give unrelated outputs.
    QotpKeys pads{random_bitvec(lambda, rng), random_bitvec(lambda, rng)};
    CosetState unpadded(space, BitVec(lambda), BitVec(lambda));
    bool dense = backend == Backend::kStatevector || (backend == Backend::kAuto && lambda <= kMaxStatevectorQubits);
    UnitState state = dense ? UnitState(expand(unpadded)) : UnitState(unpadded);
    nlohmann::json keys_json = {{"lambda", lambda}, {"x", pads.x_pad.hex()}, {"z", pads.z_pad.hex()}};
    return MintResponse{qotp_encrypt(state, pads), key.seal(bytes_of(keys_json), rng)};
}

QotpKeys open_mint_keys(const Keyring &bank, const std::string &key_id, const MintResponse &resp) {
    return open_mint_keys(bank, key_id, resp.ct_keys);
}

QotpKeys open_mint_keys(const Keyring &bank, const std::string &key_id, const SealedCiphertext &ct_keys) {
    auto j = json_of(bank.unseal(key_id, ct_keys));
    size_t lambda = j.at("lambda").get<size_t>();
    return QotpKeys{
        BitVec::from_hex(j.at("x").get<std::string>(), lambda), BitVec::from_hex(j.at("z").get<std::string>(), lambda)};
}

DelegatedMintResult run_delegated_mint(
    size_t lambda, const Keyring &bank, const std::string &key_id, Rng &rng, Backend backend) {
    EvaluationKey eval = bank.evaluation_key(key_id);
    for (int attempts = 1;; attempts++) {
        PreparedMintRequest prepared = prepare_mint_request(lambda, bank, key_id, rng);
        MintResponse resp = delegated_mint(prepared.request, eval, rng, backend);
        QotpKeys keys = open_mint_keys(bank, key_id, resp);
        if (prepared.space.contains(keys.x_pad)) {
            continue;
        }
        TokenUnitSecret secret = make_unit_secret(std::move(prepared.space), keys.x_pad, keys.z_pad, rng);
        std::string pk = make_oracle_address(secret, rng);
        OracleTriple oracles = OracleTriple::from_secret(secret, pk);
        TokenUnit unit(std::move(resp.padded_state), std::move(pk));
        return DelegatedMintResult{
            MintedUnit{std::move(unit), std::move(oracles), std::move(secret), attempts}, std::move(resp.ct_keys),
            attempts};
    }
}

LightningReport lightning_collision_trial(size_t lambda, size_t n_trials, Rng &rng) {
    if (n_trials < 1) {
        throw Error(ErrorCode::kInvalidArgument, "need at least one trial");
    }
    Keyring bank;
    bank.generate("bank", rng);
    PreparedMintRequest prepared = prepare_mint_request(lambda, bank, "bank", rng);
    EvaluationKey eval = bank.evaluation_key("bank");
    // Symbolic states suffice: only the pads are compared.
    std::map<std::pair<BitVec, BitVec>, uint64_t> seen;
    for (size_t t = 0; t < n_trials; t++) {
        MintResponse resp = delegated_mint(prepared.request, eval, rng, Backend::kSymbolic);
        QotpKeys keys = open_mint_keys(bank, "bank", resp);
        seen[{keys.x_pad, keys.z_pad}]++;
    }
    uint64_t pairs = 0;
    for (const auto &[k, count] : seen) {
        pairs += count * (count - 1) / 2;
    }
    return LightningReport{lambda, n_trials, seen.size(), pairs};
}

}  // namespace qucoin
