#ifndef QUCOIN_LEDGER_H
#define QUCOIN_LEDGER_H

// Simulated chain: the token registry (bank-writable, world-readable) and the
// escrow Transfer contract. Every committed mutation is appended to a
// single-writer event log; replaying the log rebuilds the exact state.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qucoin/f2linalg.h"
#include "qucoin/oracle_service.h"
#include "qucoin/token.h"

namespace qucoin {

/// Write capability. Only the holder of the bank's capability may touch the
/// registry or mint crypto.
struct Capability {
    std::string party;
    uint64_t secret = 0;

    bool operator==(const Capability &) const = default;
};

enum class TokenStatus { kLive, kDestroyed };

struct LedgerRecord {
    BitVec token_id;
    std::vector<std::string> oracle_pks;
    uint64_t value = 0;
    TokenStatus status = TokenStatus::kLive;
    std::optional<BitVec> destroyed_to;

    bool operator==(const LedgerRecord &) const = default;
};

enum class EscrowState { kOpen, kSettled, kVoid };

struct EscrowContract {
    std::string contract_id;
    std::string owner;
    BitVec dest_id;
    uint64_t deposit = 0;
    EscrowState state = EscrowState::kOpen;
    std::optional<std::string> beneficiary;
    std::optional<TransferSignature> delivered;  // sigma handed to the owner on settlement

    bool operator==(const EscrowContract &) const = default;
};

struct Settlement {
    std::string contract_id;
    std::string to;
    uint64_t amount = 0;
};

struct LedgerEvent {
    uint64_t seq = 0;
    std::string op;
    std::string writer;  // "bank" or "contract:<id>"
    nlohmann::json args;
    nlohmann::json result;
};

nlohmann::json to_json(const LedgerEvent &e);
LedgerEvent ledger_event_from_json(const nlohmann::json &j);

struct LedgerInvariants {
    bool crypto_conserved = false;  // balances + open deposits == crypto supply
    bool value_conserved = false;   // live token values == issued value
    bool status_consistent = false; // destroyed <=> destroyed_to set, destroyed value is 0

    bool ok() const {
        return crypto_conserved && value_conserved && status_consistent;
    }
};

class Ledger {
   public:
    explicit Ledger(Capability bank);

    // Registry writes (bank only).
    /// First report wins: a second record for the same id fails with Rejected.
    void register_token(const Capability &cap, LedgerRecord record);
    /// Genesis credit of crypto units to a party.
    void fund(const Capability &cap, const std::string &party, uint64_t amount);
    /// Value reassignment for an off-chain transfer: checks sigma against the
    /// published oracles, then value(dest) := value(source), source destroyed.
    void record_transfer(const Capability &cap, const TransferSignature &sig, const OracleService &oracles);

    // Public reads.
    const std::vector<std::string> &get_oracle(const BitVec &token_id) const;
    uint64_t get_value(const BitVec &token_id) const;
    const LedgerRecord &record(const BitVec &token_id) const;
    bool has_token(const BitVec &token_id) const {
        return records_.count(token_id) != 0;
    }
    uint64_t balance(const std::string &party) const;
    /// Destination ids that hold a ledger-verified claim on `source_id`.
    std::vector<BitVec> claims_on(const BitVec &source_id) const;

    // Escrow contract.
    /// Locks `deposit` from `owner`'s balance. Fails with InsufficientFunds.
    std::string deploy_escrow(const std::string &owner, const BitVec &dest_id, uint64_t deposit);
    const EscrowContract &contract(const std::string &contract_id) const;
    /// Serialized in arrival order; the first valid submission settles. Uses
    /// only get_oracle, get_value and the public signature.
    Settlement contract_sign(
        const std::string &contract_id, const std::string &signer_id, const TransferSignature &sig,
        const OracleService &oracles);
    std::vector<std::string> open_escrows() const;

    LedgerInvariants check_invariants() const;
    uint64_t crypto_supply() const {
        return crypto_supply_;
    }
    uint64_t issued_value() const {
        return issued_value_;
    }

    const std::vector<LedgerEvent> &events() const {
        return events_;
    }
    std::string events_jsonl() const;
    nlohmann::json snapshot() const;
    /// Rebuilds a ledger by re-applying a committed event log.
    static Ledger replay(Capability bank, const std::vector<LedgerEvent> &events);

    /// Called after every committed event.
    void set_observer(std::function<void(const LedgerEvent &)> observer) {
        observer_ = std::move(observer);
    }

   private:
    void require_bank(const Capability &cap) const;
    LedgerRecord &mutable_record(const BitVec &token_id);
    void commit(std::string op, std::string writer, nlohmann::json args, nlohmann::json result);
    void apply(const LedgerEvent &e);
    void check_transfer_target(const TransferSignature &sig) const;

    Capability bank_;
    std::map<BitVec, LedgerRecord> records_;
    std::map<std::string, uint64_t> balances_;
    std::map<std::string, EscrowContract> contracts_;
    std::map<BitVec, std::vector<BitVec>> claims_;
    uint64_t crypto_supply_ = 0;
    uint64_t issued_value_ = 0;
    uint64_t next_contract_ = 0;
    std::vector<LedgerEvent> events_;
    std::function<void(const LedgerEvent &)> observer_;
};

}  // namespace qucoin

#endif
