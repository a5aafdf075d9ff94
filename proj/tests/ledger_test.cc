#include "qucoin/ledger.h"

#include <fstream>
#include <sstream>

#include "gtest/gtest.h"

#include "qucoin/errors.h"

using namespace qucoin;

namespace {

ErrorCode code_of(const std::function<void()> &f) {
    try {
        f();
    } catch (const Error &e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an error";
    return ErrorCode::kInvalidArgument;
}

BitVec id_of(uint32_t v, size_t lambda) {
    BitVec b(lambda);
    for (size_t i = 0; i < lambda; i++) {
        if ((v >> (lambda - 1 - i)) & 1) {
            b.set(i, true);
        }
    }
    return b;
}

struct Fixture {
    Capability bank{"bank", 0x5eed};
    Ledger ledger{bank};
    OracleService oracles;
    Rng rng{77};

    MintedToken issue(size_t lambda, uint64_t value, uint32_t id) {
        MintedToken m = mint_token(lambda, value, id_of(id, lambda), rng);
        for (const auto &o : m.oracles) {
            oracles.publish(o);
        }
        ledger.register_token(bank, LedgerRecord{m.token.id, m.token.oracle_pks, value, TokenStatus::kLive, {}});
        return m;
    }
};

}  // namespace

TEST(register_token, first_report_wins_and_bank_only) {
    Fixture f;
    MintedToken a = f.issue(4, 100, 3);
    EXPECT_EQ(f.ledger.get_value(a.token.id), 100u);
    EXPECT_EQ(f.ledger.get_oracle(a.token.id), a.token.oracle_pks);

    LedgerRecord dup{a.token.id, {"pk:x", "pk:y", "pk:z", "pk:w"}, 999, TokenStatus::kLive, {}};
    EXPECT_EQ(code_of([&] { f.ledger.register_token(f.bank, dup); }), ErrorCode::kRejected);
    EXPECT_EQ(f.ledger.get_value(a.token.id), 100u);

    LedgerRecord fresh{id_of(9, 4), {}, 1, TokenStatus::kLive, {}};
    Capability forged{"bank", 0x5eee};
    EXPECT_EQ(code_of([&] { f.ledger.register_token(forged, fresh); }), ErrorCode::kUnauthorized);
    EXPECT_EQ(code_of([&] { f.ledger.register_token(Capability{"mallory", 0x5eed}, fresh); }),
              ErrorCode::kUnauthorized);
    EXPECT_EQ(code_of([&] { f.ledger.fund(forged, "mallory", 10); }), ErrorCode::kUnauthorized);
    EXPECT_FALSE(f.ledger.has_token(fresh.token_id));
    EXPECT_EQ(f.ledger.events().size(), 1u);
}

TEST(reads, unknown_ids_and_purity) {
    Fixture f;
    MintedToken a = f.issue(4, 100, 1);
    EXPECT_EQ(code_of([&] { f.ledger.get_oracle(id_of(2, 4)); }), ErrorCode::kUnknownToken);
    EXPECT_EQ(code_of([&] { f.ledger.get_value(id_of(2, 4)); }), ErrorCode::kUnknownToken);
    nlohmann::json before = f.ledger.snapshot();
    for (int i = 0; i < 5; i++) {
        EXPECT_EQ(f.ledger.get_oracle(a.token.id), a.token.oracle_pks);
        EXPECT_EQ(f.ledger.get_value(a.token.id), 100u);
    }
    EXPECT_EQ(f.ledger.snapshot(), before);
}

TEST(record_transfer, moves_value_and_blocks_second_spend) {
    Fixture f;
    MintedToken a = f.issue(4, 100, 1);
    MintedToken b = f.issue(4, 0, 2);
    MintedToken c = f.issue(4, 0, 3);
    TransferSignature sig = transfer_sign(a.token, a.oracles, b.token.id, f.rng);
    f.ledger.record_transfer(f.bank, sig, f.oracles);
    EXPECT_EQ(f.ledger.get_value(a.token.id), 0u);
    EXPECT_EQ(f.ledger.get_value(b.token.id), 100u);
    EXPECT_EQ(f.ledger.record(a.token.id).status, TokenStatus::kDestroyed);
    EXPECT_EQ(f.ledger.record(a.token.id).destroyed_to, b.token.id);
    EXPECT_EQ(f.ledger.claims_on(a.token.id), std::vector<BitVec>{b.token.id});

    EXPECT_EQ(code_of([&] { f.ledger.record_transfer(f.bank, sig, f.oracles); }), ErrorCode::kDoubleSpendAttempt);
    // Relabelling the destination does not survive the oracle check, and the
    // source is already gone anyway.
    TransferSignature relabelled = sig;
    relabelled.dest_id = c.token.id;
    EXPECT_EQ(code_of([&] { f.ledger.record_transfer(f.bank, relabelled, f.oracles); }),
              ErrorCode::kDoubleSpendAttempt);
    EXPECT_TRUE(f.ledger.check_invariants().ok());
}

TEST(record_transfer, rejects_signatures_that_do_not_verify) {
    Fixture f;
    MintedToken a = f.issue(4, 100, 1);
    MintedToken b = f.issue(4, 0, 2);
    MintedToken c = f.issue(4, 0, 12);
    TransferSignature sig = transfer_sign(a.token, a.oracles, b.token.id, f.rng);
    TransferSignature relabelled = sig;
    relabelled.dest_id = c.token.id;
    EXPECT_EQ(code_of([&] { f.ledger.record_transfer(f.bank, relabelled, f.oracles); }),
              ErrorCode::kInvalidSignature);
    TransferSignature truncated = sig;
    truncated.sigmas.pop_back();
    EXPECT_EQ(code_of([&] { f.ledger.record_transfer(f.bank, truncated, f.oracles); }),
              ErrorCode::kInvalidSignature);
    EXPECT_EQ(f.ledger.get_value(a.token.id), 100u);
    EXPECT_TRUE(f.ledger.claims_on(a.token.id).empty());
}

TEST(contract_sign, settles_once_and_pays_the_deposit) {
    Fixture f;
    f.ledger.fund(f.bank, "bob", 150);
    MintedToken a = f.issue(4, 100, 1);
    MintedToken b = f.issue(4, 0, 2);
    std::string cid = f.ledger.deploy_escrow("bob", b.token.id, 100);
    EXPECT_EQ(f.ledger.balance("bob"), 50u);
    EXPECT_EQ(f.ledger.open_escrows(), std::vector<std::string>{cid});
    EXPECT_TRUE(f.ledger.check_invariants().crypto_conserved);

    TransferSignature sig = transfer_sign(a.token, a.oracles, b.token.id, f.rng);
    Settlement s = f.ledger.contract_sign(cid, "alice", sig, f.oracles);
    EXPECT_EQ(s.to, "alice");
    EXPECT_EQ(s.amount, 100u);
    EXPECT_EQ(f.ledger.balance("alice"), 100u);
    EXPECT_EQ(f.ledger.balance("bob"), 50u);
    EXPECT_EQ(f.ledger.get_value(b.token.id), 100u);
    const EscrowContract &c = f.ledger.contract(cid);
    EXPECT_EQ(c.state, EscrowState::kSettled);
    EXPECT_EQ(c.beneficiary, "alice");
    EXPECT_EQ(c.delivered, sig);
    EXPECT_TRUE(f.ledger.check_invariants().ok());

    EXPECT_EQ(code_of([&] { f.ledger.contract_sign(cid, "alice", sig, f.oracles); }), ErrorCode::kAlreadySettled);
    EXPECT_EQ(f.ledger.balance("alice"), 100u);
}

TEST(contract_sign, insufficient_value_keeps_the_deposit_locked) {
    Fixture f;
    f.ledger.fund(f.bank, "bob", 100);
    MintedToken a = f.issue(4, 50, 1);
    MintedToken b = f.issue(4, 0, 2);
    std::string cid = f.ledger.deploy_escrow("bob", b.token.id, 100);
    TransferSignature sig = transfer_sign(a.token, a.oracles, b.token.id, f.rng);
    size_t before = f.ledger.events().size();
    EXPECT_EQ(code_of([&] { f.ledger.contract_sign(cid, "alice", sig, f.oracles); }), ErrorCode::kInsufficientValue);
    EXPECT_EQ(f.ledger.events().size(), before);
    EXPECT_EQ(f.ledger.contract(cid).state, EscrowState::kOpen);
    EXPECT_EQ(f.ledger.contract(cid).deposit, 100u);
    EXPECT_EQ(f.ledger.balance("alice"), 0u);
    EXPECT_EQ(f.ledger.get_value(a.token.id), 50u);
    EXPECT_TRUE(f.ledger.check_invariants().ok());
}

TEST(contract_sign, wrong_destination_unknown_source_and_forgery) {
    Fixture f;
    f.ledger.fund(f.bank, "bob", 100);
    MintedToken a = f.issue(4, 100, 1);
    MintedToken b = f.issue(4, 0, 2);
    MintedToken c = f.issue(4, 0, 3);
    std::string cid = f.ledger.deploy_escrow("bob", b.token.id, 100);

    TransferSignature to_c = transfer_sign(a.token, a.oracles, c.token.id, f.rng);
    EXPECT_EQ(code_of([&] { f.ledger.contract_sign(cid, "alice", to_c, f.oracles); }), ErrorCode::kInvalidSignature);

    TransferSignature relabelled = to_c;
    relabelled.dest_id = b.token.id;
    EXPECT_EQ(code_of([&] { f.ledger.contract_sign(cid, "alice", relabelled, f.oracles); }),
              ErrorCode::kInvalidSignature);

    TransferSignature unknown = relabelled;
    unknown.source_id = id_of(15, 4);
    EXPECT_EQ(code_of([&] { f.ledger.contract_sign(cid, "alice", unknown, f.oracles); }), ErrorCode::kUnknownToken);
    EXPECT_EQ(code_of([&] { f.ledger.contract_sign("escrow-9", "alice", relabelled, f.oracles); }),
              ErrorCode::kUnknownContract);
    EXPECT_EQ(f.ledger.contract(cid).state, EscrowState::kOpen);
    EXPECT_EQ(f.ledger.balance("bob"), 0u);
    EXPECT_TRUE(f.ledger.check_invariants().ok());
}

TEST(deploy_escrow, needs_funds) {
    Fixture f;
    f.ledger.fund(f.bank, "bob", 10);
    EXPECT_EQ(code_of([&] { f.ledger.deploy_escrow("bob", id_of(1, 4), 11); }), ErrorCode::kInsufficientFunds);
    EXPECT_EQ(f.ledger.balance("bob"), 10u);
}

TEST(event_log, replay_reproduces_snapshot_and_writers_are_authorized) {
    Fixture f;
    f.ledger.fund(f.bank, "bob", 300);
    f.ledger.fund(f.bank, "carol", 40);
    MintedToken a = f.issue(4, 100, 1);
    MintedToken b = f.issue(4, 0, 2);
    MintedToken d = f.issue(4, 70, 4);
    MintedToken e = f.issue(4, 0, 5);
    std::string cid = f.ledger.deploy_escrow("bob", b.token.id, 100);
    f.ledger.deploy_escrow("carol", id_of(14, 4), 40);
    f.ledger.contract_sign(cid, "alice", transfer_sign(a.token, a.oracles, b.token.id, f.rng), f.oracles);
    f.ledger.record_transfer(f.bank, transfer_sign(d.token, d.oracles, e.token.id, f.rng), f.oracles);

    // Round trip through the JSON-lines form.
    std::vector<LedgerEvent> parsed;
    std::string lines = f.ledger.events_jsonl();
    size_t pos = 0;
    while (pos < lines.size()) {
        size_t nl = lines.find('\n', pos);
        parsed.push_back(ledger_event_from_json(nlohmann::json::parse(lines.substr(pos, nl - pos))));
        pos = nl + 1;
    }
    ASSERT_EQ(parsed.size(), f.ledger.events().size());
    for (size_t i = 0; i < parsed.size(); i++) {
        EXPECT_EQ(parsed[i].seq, i);
    }
    Ledger again = Ledger::replay(f.bank, parsed);
    EXPECT_EQ(again.snapshot(), f.ledger.snapshot());
    EXPECT_EQ(again.events_jsonl(), lines);

    for (const auto &ev : f.ledger.events()) {
        bool bank_write = ev.writer == "bank";
        bool contract_write = ev.writer.rfind("contract:", 0) == 0;
        EXPECT_TRUE(bank_write || contract_write) << ev.writer;
        if (ev.op == "register_token" || ev.op == "fund" || ev.op == "transfer") {
            EXPECT_TRUE(bank_write);
        }
    }
    LedgerInvariants inv = f.ledger.check_invariants();
    EXPECT_TRUE(inv.ok());
    EXPECT_EQ(f.ledger.crypto_supply(), 340u);
    EXPECT_EQ(f.ledger.open_escrows().size(), 1u);

    std::vector<LedgerEvent> gap(parsed.begin() + 1, parsed.end());
    EXPECT_THROW(Ledger::replay(f.bank, gap), Error);
}

TEST(event_log, observer_sees_only_committed_events) {
    Fixture f;
    std::vector<uint64_t> seen;
    f.ledger.set_observer([&](const LedgerEvent &e) { seen.push_back(e.seq); });
    f.ledger.fund(f.bank, "bob", 5);
    EXPECT_THROW(f.ledger.deploy_escrow("bob", id_of(1, 4), 6), Error);
    f.ledger.deploy_escrow("bob", id_of(1, 4), 5);
    EXPECT_EQ(seen, (std::vector<uint64_t>{0, 1}));
}

TEST(contract_sign, reads_no_bank_secrets) {
    // The contract sees oracles and values only; secrets never reach this module.
    for (const char *rel : {"/include/qucoin/ledger.h", "/src/ledger.cc"}) {
        std::ifstream in(std::string(QUCOIN_SOURCE_DIR) + rel);
        ASSERT_TRUE(in) << rel;
        std::stringstream text;
        text << in.rdbuf();
        EXPECT_EQ(text.str().find("TokenUnitSecret"), std::string::npos) << rel;
        EXPECT_EQ(text.str().find("secrets"), std::string::npos) << rel;
        EXPECT_EQ(text.str().find("Keyring"), std::string::npos) << rel;
    }
}
