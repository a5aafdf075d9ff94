#include "qucoin/ledger.h"

#include "qucoin/errors.h"

namespace qucoin {

namespace {

nlohmann::json id_json(const BitVec &id) {
    return {{"lambda", id.size()}, {"hex", id.hex()}};
}

BitVec id_from_json(const nlohmann::json &j) {
    return BitVec::from_hex(j.at("hex").get<std::string>(), j.at("lambda").get<size_t>());
}

std::string contract_writer(const std::string &contract_id) {
    return "contract:" + contract_id;
}

std::string_view state_name(EscrowState s) {
    switch (s) {
        case EscrowState::kOpen:
            return "open";
        case EscrowState::kSettled:
            return "settled";
        case EscrowState::kVoid:
            return "void";
    }
    return "?";
}

bool checked_verify(const TransferSignature &sig, const std::vector<OracleTriple> &oracles) {
    try {
        return verify_transfer(sig, oracles, sig.dest_id);
    } catch (const Error &) {
        // Malformed vectors (wrong lengths) never verify.
        return false;
    }
}

}  // namespace

nlohmann::json to_json(const LedgerEvent &e) {
    return {{"seq", e.seq}, {"op", e.op}, {"writer", e.writer}, {"args", e.args}, {"result", e.result}};
}

LedgerEvent ledger_event_from_json(const nlohmann::json &j) {
    return LedgerEvent{
        j.at("seq").get<uint64_t>(), j.at("op").get<std::string>(), j.at("writer").get<std::string>(), j.at("args"),
        j.at("result")};
}

Ledger::Ledger(Capability bank) : bank_(std::move(bank)) {
}

void Ledger::require_bank(const Capability &cap) const {
    if (!(cap == bank_)) {
        throw Error(ErrorCode::kUnauthorized, "'" + cap.party + "' may not write to the registry");
    }
}

const LedgerRecord &Ledger::record(const BitVec &token_id) const {
    auto it = records_.find(token_id);
    if (it == records_.end()) {
        throw Error(ErrorCode::kUnknownToken, "no token " + token_id.str() + " in the registry");
    }
    return it->second;
}

LedgerRecord &Ledger::mutable_record(const BitVec &token_id) {
    return const_cast<LedgerRecord &>(record(token_id));
}

const std::vector<std::string> &Ledger::get_oracle(const BitVec &token_id) const {
    return record(token_id).oracle_pks;
}

uint64_t Ledger::get_value(const BitVec &token_id) const {
    return record(token_id).value;
}

uint64_t Ledger::balance(const std::string &party) const {
    auto it = balances_.find(party);
    return it == balances_.end() ? 0 : it->second;
}

std::vector<BitVec> Ledger::claims_on(const BitVec &source_id) const {
    auto it = claims_.find(source_id);
    return it == claims_.end() ? std::vector<BitVec>{} : it->second;
}

const EscrowContract &Ledger::contract(const std::string &contract_id) const {
    auto it = contracts_.find(contract_id);
    if (it == contracts_.end()) {
        throw Error(ErrorCode::kUnknownContract, "no contract '" + contract_id + "'");
    }
    return it->second;
}

std::vector<std::string> Ledger::open_escrows() const {
    std::vector<std::string> out;
    for (const auto &[id, c] : contracts_) {
        if (c.state == EscrowState::kOpen) {
            out.push_back(id);
        }
    }
    return out;
}

void Ledger::register_token(const Capability &cap, LedgerRecord record) {
    require_bank(cap);
    if (records_.count(record.token_id)) {
        throw Error(ErrorCode::kRejected, "token " + record.token_id.str() + " was already reported");
    }
    if (record.status != TokenStatus::kLive || record.destroyed_to) {
        throw Error(ErrorCode::kInvalidArgument, "new tokens must be live");
    }
    commit(
        "register_token", "bank",
        {{"token_id", id_json(record.token_id)}, {"oracle_pks", record.oracle_pks}, {"value", record.value}},
        {{"ok", true}});
}

void Ledger::fund(const Capability &cap, const std::string &party, uint64_t amount) {
    require_bank(cap);
    commit("fund", "bank", {{"party", party}, {"amount", amount}}, {{"ok", true}});
}

// Source must be live and dest must be a live zero-value token.
void Ledger::check_transfer_target(const TransferSignature &sig) const {
    const LedgerRecord &src = record(sig.source_id);
    if (src.status == TokenStatus::kDestroyed) {
        throw Error(ErrorCode::kDoubleSpendAttempt, "token " + sig.source_id.str() + " was already spent");
    }
    const LedgerRecord &dst = record(sig.dest_id);
    if (dst.status != TokenStatus::kLive || dst.value != 0 || sig.dest_id == sig.source_id) {
        throw Error(ErrorCode::kRejected, "destination " + sig.dest_id.str() + " is not a fresh dummy token");
    }
}

void Ledger::record_transfer(const Capability &cap, const TransferSignature &sig, const OracleService &oracles) {
    require_bank(cap);
    check_transfer_target(sig);
    if (!checked_verify(sig, oracles.resolve_all(get_oracle(sig.source_id)))) {
        throw Error(ErrorCode::kInvalidSignature, "signature does not verify against the published oracles");
    }
    commit(
        "transfer", "bank", {{"signature", to_json(sig)}},
        {{"value", get_value(sig.source_id)}, {"destroyed", id_json(sig.source_id)}});
}

std::string Ledger::deploy_escrow(const std::string &owner, const BitVec &dest_id, uint64_t deposit) {
    if (balance(owner) < deposit) {
        throw Error(ErrorCode::kInsufficientFunds, "'" + owner + "' cannot cover a deposit of " + std::to_string(deposit));
    }
    std::string id = "escrow-" + std::to_string(next_contract_);
    commit(
        "deploy_escrow", contract_writer(id),
        {{"contract_id", id}, {"owner", owner}, {"dest_id", id_json(dest_id)}, {"deposit", deposit}}, {{"ok", true}});
    return id;
}

Settlement Ledger::contract_sign(
    const std::string &contract_id, const std::string &signer_id, const TransferSignature &sig,
    const OracleService &oracles) {
    const EscrowContract &c = contract(contract_id);
    if (c.state != EscrowState::kOpen) {
        throw Error(ErrorCode::kAlreadySettled, "contract '" + contract_id + "' is " + std::string(state_name(c.state)));
    }
    if (sig.dest_id != c.dest_id) {
        throw Error(ErrorCode::kInvalidSignature, "signature is bound to " + sig.dest_id.str() + ", not " + c.dest_id.str());
    }
    const LedgerRecord &src = record(sig.source_id);
    if (src.status == TokenStatus::kDestroyed) {
        throw Error(ErrorCode::kAlreadySettled, "token " + sig.source_id.str() + " was already spent");
    }
    if (src.value < c.deposit) {
        throw Error(
            ErrorCode::kInsufficientValue,
            "token value " + std::to_string(src.value) + " is below the deposit " + std::to_string(c.deposit));
    }
    if (!checked_verify(sig, oracles.resolve_all(get_oracle(sig.source_id)))) {
        throw Error(ErrorCode::kInvalidSignature, "signature does not verify against the published oracles");
    }
    check_transfer_target(sig);

    Settlement s{contract_id, signer_id, c.deposit};
    commit(
        "contract_sign", contract_writer(contract_id),
        {{"contract_id", contract_id}, {"signer", signer_id}, {"signature", to_json(sig)}},
        {{"to", signer_id}, {"amount", s.amount}, {"value", src.value}});
    return s;
}

void Ledger::commit(std::string op, std::string writer, nlohmann::json args, nlohmann::json result) {
    LedgerEvent e{events_.size(), std::move(op), std::move(writer), std::move(args), std::move(result)};
    apply(e);
    events_.push_back(std::move(e));
    if (observer_) {
        observer_(events_.back());
    }
}

// All checks happen before commit(); apply() only mutates.
void Ledger::apply(const LedgerEvent &e) {
    const nlohmann::json &a = e.args;
    auto move_value = [&](const TransferSignature &sig) {
        LedgerRecord &src = mutable_record(sig.source_id);
        LedgerRecord &dst = mutable_record(sig.dest_id);
        dst.value = src.value;
        src.value = 0;
        src.status = TokenStatus::kDestroyed;
        src.destroyed_to = sig.dest_id;
        claims_[sig.source_id].push_back(sig.dest_id);
    };
    if (e.op == "register_token") {
        LedgerRecord r;
        r.token_id = id_from_json(a.at("token_id"));
        r.oracle_pks = a.at("oracle_pks").get<std::vector<std::string>>();
        r.value = a.at("value").get<uint64_t>();
        issued_value_ += r.value;
        records_.emplace(r.token_id, std::move(r));
    } else if (e.op == "fund") {
        uint64_t amount = a.at("amount").get<uint64_t>();
        balances_[a.at("party").get<std::string>()] += amount;
        crypto_supply_ += amount;
    } else if (e.op == "transfer") {
        move_value(transfer_signature_from_json(a.at("signature")));
    } else if (e.op == "deploy_escrow") {
        EscrowContract c;
        c.contract_id = a.at("contract_id").get<std::string>();
        c.owner = a.at("owner").get<std::string>();
        c.dest_id = id_from_json(a.at("dest_id"));
        c.deposit = a.at("deposit").get<uint64_t>();
        balances_[c.owner] -= c.deposit;
        next_contract_++;
        contracts_.emplace(c.contract_id, std::move(c));
    } else if (e.op == "contract_sign") {
        EscrowContract &c = contracts_.at(a.at("contract_id").get<std::string>());
        std::string signer = a.at("signer").get<std::string>();
        TransferSignature sig = transfer_signature_from_json(a.at("signature"));
        balances_[signer] += c.deposit;
        c.beneficiary = signer;
        c.delivered = sig;
        c.state = EscrowState::kSettled;
        move_value(sig);
    } else {
        throw Error(ErrorCode::kInvalidArgument, "unknown ledger op '" + e.op + "'");
    }
}

LedgerInvariants Ledger::check_invariants() const {
    LedgerInvariants inv;
    uint64_t held = 0;
    for (const auto &[party, b] : balances_) {
        held += b;
    }
    for (const auto &[id, c] : contracts_) {
        held += c.state == EscrowState::kOpen ? c.deposit : 0;
    }
    inv.crypto_conserved = held == crypto_supply_;

    uint64_t live = 0;
    inv.status_consistent = true;
    for (const auto &[id, r] : records_) {
        bool destroyed = r.status == TokenStatus::kDestroyed;
        if (destroyed != r.destroyed_to.has_value() || (destroyed && r.value != 0)) {
            inv.status_consistent = false;
        }
        live += destroyed ? 0 : r.value;
    }
    inv.value_conserved = live == issued_value_;
    return inv;
}

std::string Ledger::events_jsonl() const {
    std::string out;
    for (const auto &e : events_) {
        out += to_json(e).dump();
        out += '\n';
    }
    return out;
}

nlohmann::json Ledger::snapshot() const {
    nlohmann::json tokens = nlohmann::json::array();
    for (const auto &[id, r] : records_) {
        tokens.push_back(
            {{"token_id", id_json(id)},
             {"oracle_pks", r.oracle_pks},
             {"value", r.value},
             {"status", r.status == TokenStatus::kLive ? "live" : "destroyed"},
             {"destroyed_to", r.destroyed_to ? id_json(*r.destroyed_to) : nlohmann::json(nullptr)}});
    }
    nlohmann::json contracts = nlohmann::json::array();
    for (const auto &[id, c] : contracts_) {
        contracts.push_back(
            {{"contract_id", id},
             {"owner", c.owner},
             {"dest_id", id_json(c.dest_id)},
             {"deposit", c.deposit},
             {"state", state_name(c.state)},
             {"beneficiary", c.beneficiary ? nlohmann::json(*c.beneficiary) : nlohmann::json(nullptr)},
             {"delivered", c.delivered ? to_json(*c.delivered) : nlohmann::json(nullptr)}});
    }
    nlohmann::json balances = nlohmann::json::object();
    for (const auto &[party, b] : balances_) {
        balances[party] = b;
    }
    return {
        {"tokens", tokens},
        {"contracts", contracts},
        {"balances", balances},
        {"crypto_supply", crypto_supply_},
        {"issued_value", issued_value_},
        {"events", events_.size()}};
}

Ledger Ledger::replay(Capability bank, const std::vector<LedgerEvent> &events) {
    Ledger l(std::move(bank));
    for (const auto &e : events) {
        if (e.seq != l.events_.size()) {
            throw Error(ErrorCode::kInvalidArgument, "event log is not contiguous at seq " + std::to_string(e.seq));
        }
        l.apply(e);
        l.events_.push_back(e);
    }
    return l;
}

}  // namespace qucoin
