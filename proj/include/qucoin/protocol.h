#ifndef QUCOIN_PROTOCOL_H
#define QUCOIN_PROTOCOL_H

// Bank, sender and receiver flows. Parties only exchange ChannelMessages and
// read or write the ledger; quantum tokens stay with their holders.

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qucoin/errors.h"
#include "qucoin/ledger.h"
#include "qucoin/oracle_service.h"
#include "qucoin/qfhe.h"
#include "qucoin/rng.h"
#include "qucoin/token.h"

namespace qucoin {

/// Event log with logical timestamps. Holds no wall-clock data, so identical
/// runs give identical traces.
class Trace {
   public:
    void record(const std::string &event, nlohmann::json fields);
    /// Fields merged into every later event (e.g. the trial number).
    void set_context(nlohmann::json context) {
        context_ = std::move(context);
    }
    const std::vector<nlohmann::json> &events() const {
        return events_;
    }
    std::string jsonl() const;

   private:
    uint64_t clock_ = 0;
    nlohmann::json context_ = nlohmann::json::object();
    std::vector<nlohmann::json> events_;
};

enum class MessageKind { kMintRequest, kMintResponse, kDummyIdAnnounce, kSignatureDelivery, kEscrowNotice };

std::string_view to_string(MessageKind kind);
MessageKind message_kind_from_string(std::string_view name);

struct ChannelMessage {
    MessageKind kind;
    std::string sender;
    std::string receiver;
    nlohmann::json payload;

    bool operator==(const ChannelMessage &) const = default;
};

nlohmann::json to_json(const ChannelMessage &m);
ChannelMessage channel_message_from_json(const nlohmann::json &j);

struct ChannelFaults {
    std::set<MessageKind> drop;
    bool duplicate = false;
    bool reorder = false;  // later sends overtake earlier ones
    std::function<void(ChannelMessage &)> tamper;
};

/// In-process classical channel. Messages cross it in serialized form.
class Channel {
   public:
    explicit Channel(Trace *trace = nullptr, ChannelFaults faults = {}) : trace_(trace), faults_(std::move(faults)) {
    }

    void send(ChannelMessage m);
    /// First pending message of `kind` for `receiver`. Fails with
    /// ChannelDropped if nothing is waiting.
    ChannelMessage receive(const std::string &receiver, MessageKind kind);
    size_t pending() const {
        return queue_.size();
    }

   private:
    Trace *trace_;
    ChannelFaults faults_;
    std::deque<std::string> queue_;
};

/// Bank-side state: sealing keys, write capability and the lightning serials
/// reported so far.
class Bank {
   public:
    Bank(std::string id, Rng &rng);

    const std::string &id() const {
        return id_;
    }
    const Capability &capability() const {
        return capability_;
    }
    const Keyring &keyring() const {
        return keyring_;
    }
    const std::string &key_id() const {
        return id_;
    }
    /// Only the first report of a serial carries value; repeats fail with
    /// Rejected.
    void report_serial(const std::string &serial);
    size_t reported() const {
        return serials_.size();
    }

   private:
    std::string id_;
    Capability capability_;
    Keyring keyring_;
    std::set<std::string> serials_;
};

/// (x, z) fingerprint of a minted unit.
std::string lightning_serial(const QotpKeys &keys);

struct World {
    World(uint64_t seed, Trace *trace = nullptr);
    World(const World &) = delete;
    World &operator=(const World &) = delete;

    Rng setup_rng;
    Bank bank;
    Ledger ledger;
    OracleService oracles;
    Trace *trace;

    void note(const std::string &event, nlohmann::json fields) {
        if (trace) {
            trace->record(event, std::move(fields));
        }
    }
};

/// Genesis crypto for a party.
void bank_fund(World &w, const std::string &party, uint64_t amount);

/// Delegated mint of a full token to `receiver` over a classical channel,
/// then registration of (pks, value, id) in the ledger. Units whose serial was
/// already reported and ids already in use are re-drawn.
QuantumToken bank_issue(
    World &w, const std::string &receiver, size_t lambda, uint64_t value, Rng &rng, Backend backend = Backend::kAuto);

/// success <=> signature present and accepted by the ledger.
struct TransferOutcome {
    bool success = false;
    std::optional<TransferSignature> signature;
    std::optional<ErrorCode> reason;
    bool sender_token_destroyed = false;
    bool receiver_credited = false;
    std::optional<Settlement> settlement;
};

nlohmann::json to_json(const TransferOutcome &o);

/// Receiver side: checks sigma against its own dummy id through the public
/// oracles, then has the bank record the value reassignment.
TransferOutcome accept_signature(
    World &w, const std::string &receiver, const QuantumToken &dummy, const TransferSignature &sig);

TransferOutcome face_to_face_transfer(
    World &w, const std::string &sender, const std::string &receiver, QuantumToken &token, const QuantumToken &dummy,
    Rng &rng);

/// id_B and sigma travel over `channel`. A lost signature leaves the sender's
/// token destroyed and the receiver uncredited; the outcome reports both.
TransferOutcome remote_transfer(
    World &w, const std::string &sender, const std::string &receiver, QuantumToken &token, const QuantumToken &dummy,
    Channel &channel, Rng &rng);

/// Receiver locks `deposit` in an escrow for id_B and notifies the sender over
/// `channel`; the sender checks the value, signs and submits to the contract.
TransferOutcome onchain_transfer(
    World &w, const std::string &sender, const std::string &receiver, QuantumToken &token, const QuantumToken &dummy,
    uint64_t deposit, Channel &channel, Rng &rng);

/// Direct contract submission, e.g. replaying an old signature.
TransferOutcome submit_to_escrow(
    World &w, const std::string &signer, const std::string &contract_id, const TransferSignature &sig);

}  // namespace qucoin

#endif
