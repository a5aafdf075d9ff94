#ifndef QUCOIN_TOKEN_H
#define QUCOIN_TOKEN_H

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "qucoin/f2linalg.h"
#include "qucoin/qsim.h"
#include "qucoin/rng.h"

namespace qucoin {

/// Rounds after which signing gives up. Honest units succeed each round with
/// probability 1/2, so reaching this cap signals a state that is not a token.
inline constexpr int kMaxSignRounds = 64;

/// Which simulation backend holds a freshly prepared unit.
enum class Backend {
    kAuto,  // dense up to kMaxStatevectorQubits, symbolic above
    kStatevector,
    kSymbolic,
};

/// Bank-side secret of one token unit: S = S0 u (S0 + w), coset shift x and
/// phase z. Never leaves the bank; oracles are derived from it.
struct TokenUnitSecret {
    Subspace space;
    Subspace low;
    BitVec w;
    BitVec x_shift;
    BitVec z_phase;

    size_t lambda() const {
        return space.ambient();
    }
    /// The mint only publishes units whose shift lies outside S.
    bool satisfies_mint_acceptance() const {
        return !space.contains(x_shift);
    }
};

/// Builds the secret for a unit over (S, x, z), splitting S at random.
TokenUnitSecret make_unit_secret(Subspace space, BitVec x_shift, BitVec z_phase, Rng &rng);

/// Public membership oracles for S0+x, S0+x+w and S^perp+z, published under
/// address `pk`. The triple can only be evaluated; it exposes no subspace data.
class OracleTriple {
   public:
    OracleTriple(BitPredicate low, BitPredicate high, BitPredicate dual, std::string pk, size_t lambda);
    static OracleTriple from_secret(const TokenUnitSecret &secret, std::string pk);

    bool low(const BitVec &v) const {
        return low_(v);
    }
    bool high(const BitVec &v) const {
        return high_(v);
    }
    bool dual(const BitVec &v) const {
        return dual_(v);
    }
    /// Bit-b signing oracle: S0 + x + b*w.
    bool accepts(bool bit, const BitVec &v) const {
        return bit ? high_(v) : low_(v);
    }
    /// Computational-basis test S + x.
    bool in_coset(const BitVec &v) const {
        return low_(v) || high_(v);
    }
    const std::string &pk() const {
        return pk_;
    }
    size_t lambda() const {
        return lambda_;
    }

   private:
    BitPredicate low_;
    BitPredicate high_;
    BitPredicate dual_;
    std::string pk_;
    size_t lambda_;
};

/// Content-derived oracle address, salted from `rng` so repeated mints of the
/// same secret still get distinct addresses.
std::string make_oracle_address(const TokenUnitSecret &secret, Rng &rng);

enum class UnitStatus { kLive, kDestroyed };

/// One quantum token unit held by its owner. A destroyed unit has no state
/// and every honest operation on it fails with DestroyedUnit.
class TokenUnit {
   public:
    TokenUnit(UnitState state, std::string pk);

    const std::string &pk() const {
        return pk_;
    }
    UnitStatus status() const {
        return state_ ? UnitStatus::kLive : UnitStatus::kDestroyed;
    }
    bool live() const {
        return state_.has_value();
    }
    const UnitState &state() const;
    /// Physical access for the holder (including dishonest holders).
    UnitState &mutable_state();
    void destroy() {
        state_.reset();
    }

   private:
    std::optional<UnitState> state_;
    std::string pk_;
};

UnitState prepare_unit_state(const TokenUnitSecret &secret, Backend backend = Backend::kAuto);

struct MintedUnit {
    TokenUnit unit;
    OracleTriple oracles;
    TokenUnitSecret secret;
    int attempts;  // draws until x fell outside S
};

/// Local (non-delegated) mint: random lambda/2-dimensional S, random x outside
/// S, random z.
MintedUnit mint_unit(size_t lambda, Rng &rng, Backend backend = Backend::kAuto);

/// Computational test against S+x followed by the dual test against S^perp+z
/// in the Hadamard basis. Passing leaves an honest state unchanged.
bool verify_unit(TokenUnit &unit, const OracleTriple &oracles, Rng &rng);

struct UnitSignature {
    BitVec sigma;
    bool bit = false;

    bool operator==(const UnitSignature &) const = default;
};

struct SignResult {
    UnitSignature signature;
    int rounds;
};

/// Certified destruction under control bit `bit`. Each round measures the
/// bit-b oracle; on success the unit is measured out and destroyed, otherwise
/// the dual test is applied in the Hadamard basis before retrying.
SignResult sign_unit_counted(TokenUnit &unit, const OracleTriple &oracles, bool bit, Rng &rng);
UnitSignature sign_unit(TokenUnit &unit, const OracleTriple &oracles, bool bit, Rng &rng);

bool verify_unit_signature(const UnitSignature &sig, const OracleTriple &oracles);

/// Classical part (id, value, oracle addresses) plus lambda quantum units.
struct QuantumToken {
    std::vector<TokenUnit> units;
    std::vector<std::string> oracle_pks;
    BitVec id;
    uint64_t value = 0;

    size_t lambda() const {
        return units.size();
    }
    bool all_live() const;
    bool any_destroyed() const;
};

struct MintedToken {
    QuantumToken token;
    std::vector<OracleTriple> oracles;
    std::vector<TokenUnitSecret> secrets;
};

MintedToken mint_token(size_t lambda, uint64_t value, const BitVec &id, Rng &rng, Backend backend = Backend::kAuto);

/// sigma_{B<-A}: unit i of the source token destroyed under bit dest_id[i].
struct TransferSignature {
    BitVec source_id;
    BitVec dest_id;
    std::vector<UnitSignature> sigmas;

    bool operator==(const TransferSignature &) const = default;
};

nlohmann::json to_json(const TransferSignature &sig);
TransferSignature transfer_signature_from_json(const nlohmann::json &j);

/// Destroys every unit of `token` against the bits of `dest_id`. Fails with
/// DoubleSpendAttempt, before touching any unit, if some unit is already gone.
TransferSignature transfer_sign(
    QuantumToken &token, std::span<const OracleTriple> oracles, const BitVec &dest_id, Rng &rng);

bool verify_transfer(const TransferSignature &sig, std::span<const OracleTriple> oracles, const BitVec &dest_id);

}  // namespace qucoin

#endif
