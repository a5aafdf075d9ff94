#include "qucoin/protocol.h"

#include <array>

namespace qucoin {

namespace {

constexpr std::array<std::pair<MessageKind, std::string_view>, 5> kKindNames{{
    {MessageKind::kMintRequest, "MintRequest"},
    {MessageKind::kMintResponse, "MintResponse"},
    {MessageKind::kDummyIdAnnounce, "DummyIdAnnounce"},
    {MessageKind::kSignatureDelivery, "SignatureDelivery"},
    {MessageKind::kEscrowNotice, "EscrowNotice"},
}};

// Ids beyond this many draws are treated as exhausted.
constexpr int kMaxIdDraws = 4096;

nlohmann::json id_json(const BitVec &id) {
    return {{"lambda", id.size()}, {"hex", id.hex()}};
}

BitVec id_from_json(const nlohmann::json &j) {
    return BitVec::from_hex(j.at("hex").get<std::string>(), j.at("lambda").get<size_t>());
}

TransferOutcome failed(ErrorCode code) {
    TransferOutcome out;
    out.reason = code;
    return out;
}

}  // namespace

void Trace::record(const std::string &event, nlohmann::json fields) {
    nlohmann::json e = {{"t", clock_++}, {"event", event}};
    for (const auto &[k, v] : context_.items()) {
        e[k] = v;
    }
    for (const auto &[k, v] : fields.items()) {
        e[k] = v;
    }
    events_.push_back(std::move(e));
}

std::string Trace::jsonl() const {
    std::string out;
    for (const auto &e : events_) {
        out += e.dump();
        out += '\n';
    }
    return out;
}

std::string_view to_string(MessageKind kind) {
    for (const auto &[k, name] : kKindNames) {
        if (k == kind) {
            return name;
        }
    }
    return "?";
}

MessageKind message_kind_from_string(std::string_view name) {
    for (const auto &[k, n] : kKindNames) {
        if (n == name) {
            return k;
        }
    }
    throw Error(ErrorCode::kInvalidArgument, "unknown message kind '" + std::string(name) + "'");
}

nlohmann::json to_json(const ChannelMessage &m) {
    return {{"kind", to_string(m.kind)}, {"sender", m.sender}, {"receiver", m.receiver}, {"payload", m.payload}};
}

ChannelMessage channel_message_from_json(const nlohmann::json &j) {
    return ChannelMessage{
        message_kind_from_string(j.at("kind").get<std::string>()), j.at("sender").get<std::string>(),
        j.at("receiver").get<std::string>(), j.at("payload")};
}

void Channel::send(ChannelMessage m) {
    if (trace_) {
        trace_->record("send", {{"kind", to_string(m.kind)}, {"from", m.sender}, {"to", m.receiver}});
    }
    if (faults_.drop.count(m.kind)) {
        if (trace_) {
            trace_->record("drop", {{"kind", to_string(m.kind)}});
        }
        return;
    }
    if (faults_.tamper) {
        faults_.tamper(m);
    }
    std::string wire = to_json(m).dump();
    int copies = faults_.duplicate ? 2 : 1;
    for (int i = 0; i < copies; i++) {
        if (faults_.reorder) {
            queue_.push_front(wire);
        } else {
            queue_.push_back(wire);
        }
    }
}

ChannelMessage Channel::receive(const std::string &receiver, MessageKind kind) {
    for (auto it = queue_.begin(); it != queue_.end(); ++it) {
        ChannelMessage m = channel_message_from_json(nlohmann::json::parse(*it));
        if (m.receiver == receiver && m.kind == kind) {
            queue_.erase(it);
            if (trace_) {
                trace_->record("receive", {{"kind", to_string(kind)}, {"from", m.sender}, {"to", receiver}});
            }
            return m;
        }
    }
    throw Error(ErrorCode::kChannelDropped, "no " + std::string(to_string(kind)) + " waiting for '" + receiver + "'");
}

Bank::Bank(std::string id, Rng &rng) : id_(std::move(id)), capability_{id_, rng.next_u64()} {
    keyring_.generate(id_, rng);
}

void Bank::report_serial(const std::string &serial) {
    if (!serials_.insert(serial).second) {
        throw Error(ErrorCode::kRejected, "serial " + serial + " was already reported");
    }
}

std::string lightning_serial(const QotpKeys &keys) {
    return keys.x_pad.hex() + ":" + keys.z_pad.hex();
}

World::World(uint64_t seed, Trace *trace_sink)
    : setup_rng(seed), bank("bank", setup_rng), ledger(bank.capability()), trace(trace_sink) {
    ledger.set_observer([this](const LedgerEvent &e) {
        note("ledger", {{"seq", e.seq}, {"op", e.op}, {"writer", e.writer}});
    });
}

void bank_fund(World &w, const std::string &party, uint64_t amount) {
    w.ledger.fund(w.bank.capability(), party, amount);
}

QuantumToken bank_issue(World &w, const std::string &receiver, size_t lambda, uint64_t value, Rng &rng, Backend backend) {
    const Keyring &keys = w.bank.keyring();
    const std::string &key_id = w.bank.key_id();
    Channel wire(w.trace);
    // Handed to the receiver once; it can evaluate but not unseal.
    EvaluationKey eval = keys.evaluation_key(key_id);

    QuantumToken token;
    int draws = 0;
    do {
        if (++draws > kMaxIdDraws) {
            throw Error(ErrorCode::kRejected, "no free token id of length " + std::to_string(lambda));
        }
        token.id = random_bitvec(lambda, rng);
    } while (w.ledger.has_token(token.id));
    for (size_t i = 0; i < lambda; i++) {
        while (true) {
            PreparedMintRequest prepared = prepare_mint_request(lambda, keys, key_id, rng);
            wire.send({MessageKind::kMintRequest, w.bank.id(), receiver, to_json(prepared.request)});

            MintRequest req = mint_request_from_json(wire.receive(receiver, MessageKind::kMintRequest).payload);
            MintResponse resp = delegated_mint(req, eval, rng, backend);
            wire.send({MessageKind::kMintResponse, receiver, w.bank.id(), {{"ct_keys", to_json(resp.ct_keys)}}});

            auto back = wire.receive(w.bank.id(), MessageKind::kMintResponse);
            QotpKeys pads = open_mint_keys(keys, key_id, sealed_ciphertext_from_json(back.payload.at("ct_keys")));
            if (prepared.space.contains(pads.x_pad)) {
                w.note("mint_restart", {{"unit", i}, {"cause", "shift_in_subspace"}});
                continue;
            }
            try {
                w.bank.report_serial(lightning_serial(pads));
            } catch (const Error &) {
                w.note("mint_restart", {{"unit", i}, {"cause", "duplicate_serial"}});
                continue;
            }
            TokenUnitSecret secret = make_unit_secret(std::move(prepared.space), pads.x_pad, pads.z_pad, rng);
            std::string pk = make_oracle_address(secret, rng);
            w.oracles.publish(OracleTriple::from_secret(secret, pk));
            token.units.emplace_back(std::move(resp.padded_state), pk);
            token.oracle_pks.push_back(std::move(pk));
            break;
        }
    }

    token.value = value;
    w.ledger.register_token(
        w.bank.capability(), LedgerRecord{token.id, token.oracle_pks, value, TokenStatus::kLive, {}});
    w.note("issue", {{"holder", receiver}, {"token", id_json(token.id)}, {"value", value}});
    return token;
}

nlohmann::json to_json(const TransferOutcome &o) {
    nlohmann::json j = {
        {"success", o.success},
        {"reason", o.reason ? nlohmann::json(std::string(to_string(*o.reason))) : nlohmann::json(nullptr)},
        {"sender_token_destroyed", o.sender_token_destroyed},
        {"receiver_credited", o.receiver_credited}};
    if (o.settlement) {
        j["settlement"] = {
            {"contract_id", o.settlement->contract_id}, {"to", o.settlement->to}, {"amount", o.settlement->amount}};
    }
    return j;
}

TransferOutcome accept_signature(
    World &w, const std::string &receiver, const QuantumToken &dummy, const TransferSignature &sig) {
    bool ok = false;
    try {
        ok = verify_transfer(sig, w.oracles.resolve_all(w.ledger.get_oracle(sig.source_id)), dummy.id);
    } catch (const Error &) {
        ok = false;
    }
    w.note("verify_transfer", {{"receiver", receiver}, {"source", id_json(sig.source_id)}, {"ok", ok}});
    if (!ok) {
        return failed(ErrorCode::kVerificationFailed);
    }
    try {
        w.ledger.record_transfer(w.bank.capability(), sig, w.oracles);
    } catch (const Error &e) {
        return failed(e.code());
    }
    TransferOutcome out;
    out.success = true;
    out.signature = sig;
    out.receiver_credited = true;
    return out;
}

namespace {

std::optional<TransferSignature> sign_for(
    World &w, const std::string &sender, QuantumToken &token, const BitVec &dest, Rng &rng, TransferOutcome &out) {
    try {
        TransferSignature sig = transfer_sign(token, w.oracles.resolve_all(token.oracle_pks), dest, rng);
        w.note("sign", {{"sender", sender}, {"source", id_json(token.id)}, {"dest", id_json(dest)}});
        return sig;
    } catch (const Error &e) {
        w.note("sign_refused", {{"sender", sender}, {"source", id_json(token.id)}, {"error", to_string(e.code())}});
        out.reason = e.code();
        out.sender_token_destroyed = token.any_destroyed();
        return std::nullopt;
    }
}

}  // namespace

TransferOutcome face_to_face_transfer(
    World &w, const std::string &sender, const std::string &receiver, QuantumToken &token, const QuantumToken &dummy,
    Rng &rng) {
    w.note("announce", {{"from", receiver}, {"to", sender}, {"dest", id_json(dummy.id)}});
    TransferOutcome out;
    auto sig = sign_for(w, sender, token, dummy.id, rng, out);
    if (!sig) {
        return out;
    }
    out = accept_signature(w, receiver, dummy, *sig);
    out.sender_token_destroyed = token.any_destroyed();
    return out;
}

TransferOutcome remote_transfer(
    World &w, const std::string &sender, const std::string &receiver, QuantumToken &token, const QuantumToken &dummy,
    Channel &channel, Rng &rng) {
    channel.send({MessageKind::kDummyIdAnnounce, receiver, sender, {{"dest_id", id_json(dummy.id)}}});
    BitVec dest;
    try {
        dest = id_from_json(channel.receive(sender, MessageKind::kDummyIdAnnounce).payload.at("dest_id"));
    } catch (const Error &e) {
        return failed(e.code());
    }

    TransferOutcome out;
    auto sig = sign_for(w, sender, token, dest, rng, out);
    if (!sig) {
        return out;
    }
    channel.send({MessageKind::kSignatureDelivery, sender, receiver, to_json(*sig)});
    TransferSignature delivered;
    try {
        delivered = transfer_signature_from_json(channel.receive(receiver, MessageKind::kSignatureDelivery).payload);
    } catch (const Error &e) {
        out = failed(e.code());
        out.sender_token_destroyed = token.any_destroyed();
        return out;
    }
    out = accept_signature(w, receiver, dummy, delivered);
    out.sender_token_destroyed = token.any_destroyed();
    return out;
}

TransferOutcome submit_to_escrow(
    World &w, const std::string &signer, const std::string &contract_id, const TransferSignature &sig) {
    try {
        Settlement s = w.ledger.contract_sign(contract_id, signer, sig, w.oracles);
        TransferOutcome out;
        out.success = true;
        out.signature = sig;
        out.receiver_credited = true;
        out.settlement = s;
        return out;
    } catch (const Error &e) {
        w.note("contract_reject", {{"contract", contract_id}, {"signer", signer}, {"error", to_string(e.code())}});
        return failed(e.code());
    }
}

TransferOutcome onchain_transfer(
    World &w, const std::string &sender, const std::string &receiver, QuantumToken &token, const QuantumToken &dummy,
    uint64_t deposit, Channel &channel, Rng &rng) {
    std::string cid;
    try {
        cid = w.ledger.deploy_escrow(receiver, dummy.id, deposit);
    } catch (const Error &e) {
        return failed(e.code());
    }
    channel.send({MessageKind::kEscrowNotice, receiver, sender, {{"contract_id", cid}}});
    std::string notified;
    try {
        notified = channel.receive(sender, MessageKind::kEscrowNotice).payload.at("contract_id").get<std::string>();
    } catch (const Error &e) {
        return failed(e.code());
    }

    // The sender reads the terms from the chain and refuses to destroy a
    // token that could not settle.
    const EscrowContract &c = w.ledger.contract(notified);
    if (w.ledger.get_value(token.id) < c.deposit) {
        w.note("sign_refused", {{"sender", sender}, {"contract", notified}, {"error", "InsufficientValue"}});
        return failed(ErrorCode::kInsufficientValue);
    }
    TransferOutcome out;
    auto sig = sign_for(w, sender, token, c.dest_id, rng, out);
    if (!sig) {
        return out;
    }
    out = submit_to_escrow(w, sender, notified, *sig);
    out.sender_token_destroyed = token.any_destroyed();
    if (out.success) {
        const EscrowContract &settled = w.ledger.contract(notified);
        bool ok = settled.delivered &&
                  verify_transfer(
                      *settled.delivered, w.oracles.resolve_all(w.ledger.get_oracle(settled.delivered->source_id)),
                      dummy.id);
        w.note("verify_transfer", {{"receiver", receiver}, {"source", id_json(token.id)}, {"ok", ok}});
    }
    return out;
}

}  // namespace qucoin
