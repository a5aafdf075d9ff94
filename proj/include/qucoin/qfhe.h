#ifndef QUCOIN_QFHE_H
#define QUCOIN_QFHE_H

// Functional stand-in for the delegated (semi-quantum) mint. The classical
// homomorphic layer is replaced by sealed boxes with explicit key ownership;
// the delegatee only ever sees masked or sealed data. Nothing here is
// cryptographically secure.

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "qucoin/f2linalg.h"
#include "qucoin/qsim.h"
#include "qucoin/rng.h"
#include "qucoin/token.h"

namespace qucoin {

/// Quantum one-time pad: X^x_pad Z^z_pad applied qubit-wise.
struct QotpKeys {
    BitVec x_pad;
    BitVec z_pad;

    bool operator==(const QotpKeys &) const = default;
};

StateVector qotp_encrypt(const StateVector &s, const QotpKeys &keys);
/// On coset states the pad only translates shift and phase.
CosetState qotp_encrypt(const CosetState &c, const QotpKeys &keys);
UnitState qotp_encrypt(const UnitState &s, const QotpKeys &keys);

struct SealedCiphertext {
    std::vector<uint8_t> payload;
    std::string key_id;

    bool operator==(const SealedCiphertext &) const = default;
};

class EvaluationKey;
struct MintRequest;
struct MintResponse;

/// Sealing keys owned by one party. unseal() calls are counted per key so
/// tests can audit who opened what.
class Keyring {
   public:
    /// Fails with Rejected if `key_id` already exists.
    void generate(const std::string &key_id, Rng &rng);
    bool has(const std::string &key_id) const {
        return keys_.count(key_id) != 0;
    }

    /// Randomized: sealing the same message twice gives different payloads.
    SealedCiphertext seal(const std::string &key_id, std::span<const uint8_t> message, Rng &rng) const;
    /// Fails with WrongKey if the ciphertext was not sealed under this
    /// keyring's `key_id`.
    std::vector<uint8_t> unseal(const std::string &key_id, const SealedCiphertext &ct) const;
    size_t unseal_count(const std::string &key_id) const;

    /// Handle for the delegatee; usable only by delegated_mint().
    EvaluationKey evaluation_key(const std::string &key_id) const;

   private:
    using Material = std::array<uint64_t, 4>;
    friend class EvaluationKey;

    const Material &material(const std::string &key_id) const;

    std::map<std::string, Material> keys_;
    mutable std::map<std::string, size_t> unseal_audit_;
};

class EvaluationKey {
   public:
    const std::string &key_id() const {
        return key_id_;
    }

   private:
    friend class Keyring;
    friend MintResponse delegated_mint(const MintRequest &req, const EvaluationKey &key, Rng &rng, Backend backend);

    EvaluationKey(std::string key_id, std::array<uint64_t, 4> material)
        : key_id_(std::move(key_id)), material_(material) {
    }
    std::vector<uint8_t> open(const SealedCiphertext &ct) const;
    SealedCiphertext seal(std::span<const uint8_t> message, Rng &rng) const;

    std::string key_id_;
    std::array<uint64_t, 4> material_;
};

/// Bank -> receiver: the subspace matrix under a one-time pad, plus the pad
/// sealed under the bank's key.
struct MintRequest {
    F2Matrix masked_matrix;
    SealedCiphertext ct_pad;
};

/// Receiver -> bank: the padded coset state stays with the receiver; the
/// sealed (x, z) goes back to the bank.
struct MintResponse {
    UnitState padded_state;
    SealedCiphertext ct_keys;
};

nlohmann::json to_json(const SealedCiphertext &ct);
SealedCiphertext sealed_ciphertext_from_json(const nlohmann::json &j);
nlohmann::json to_json(const MintRequest &req);
MintRequest mint_request_from_json(const nlohmann::json &j);

struct PreparedMintRequest {
    MintRequest request;
    Subspace space;  // row span of the unmasked matrix; bank-private
};

/// Samples a full-rank (lambda/2) x lambda matrix and masks it.
PreparedMintRequest prepare_mint_request(size_t lambda, const Keyring &bank, const std::string &key_id, Rng &rng);

/// Evaluates the row-span mint circuit under the mask: produces a coset state
/// of row-span(M_S) padded with fresh (x, z) and returns the sealed pads.
/// Fails with MalformedRequest on bad shapes or a rank-deficient matrix.
MintResponse delegated_mint(
    const MintRequest &req, const EvaluationKey &key, Rng &rng, Backend backend = Backend::kAuto);

/// Bank-side decryption of the pads in a response.
QotpKeys open_mint_keys(const Keyring &bank, const std::string &key_id, const MintResponse &resp);
QotpKeys open_mint_keys(const Keyring &bank, const std::string &key_id, const SealedCiphertext &ct_keys);

struct DelegatedMintResult {
    MintedUnit minted;
    SealedCiphertext ct_keys;  // sealed (x, z) of the accepted run
    int attempts;              // protocol runs including the accepted one
};

/// Full bank/receiver exchange for one unit. The bank restarts whenever the
/// decrypted x lies in S, then splits S and derives the oracle triple.
DelegatedMintResult run_delegated_mint(
    size_t lambda, const Keyring &bank, const std::string &key_id, Rng &rng, Backend backend = Backend::kAuto);

struct LightningReport {
    size_t lambda;
    size_t trials;
    size_t distinct_outputs;
    uint64_t colliding_pairs;
};

/// Runs delegated_mint `n_trials` times on one fixed request and counts pairs
/// of runs that produced identical (x, z).
LightningReport lightning_collision_trial(size_t lambda, size_t n_trials, Rng &rng);

}  // namespace qucoin

#endif
