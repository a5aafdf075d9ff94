#include "qucoin/scenario.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "qucoin/errors.h"
#include "qucoin/qfhe.h"

namespace qucoin {

namespace {

// Symbolic runs keep the signing enumerations within kMaxSymbolicEnumerationDim.
constexpr size_t kMaxSymbolicLambda = 40;
constexpr uint64_t kMaxTrials = 1'000'000;

enum class TrialResult { kSuccess, kRejected, kBlocked, kDoubleSpend };

std::string_view result_name(TrialResult r) {
    switch (r) {
        case TrialResult::kSuccess:
            return "success";
        case TrialResult::kRejected:
            return "rejected";
        case TrialResult::kBlocked:
            return "blocked";
        case TrialResult::kDoubleSpend:
            return "double_spend";
    }
    return "?";
}

struct Trial {
    TrialResult result = TrialResult::kRejected;
    std::optional<ErrorCode> reason;
    nlohmann::json detail = nlohmann::json::object();
};

enum class Route { kFaceToFace, kRemote, kOnchain };

std::string_view route_name(Route r) {
    switch (r) {
        case Route::kFaceToFace:
            return "f2f";
        case Route::kRemote:
            return "remote";
        case Route::kOnchain:
            return "onchain";
    }
    return "?";
}

[[noreturn]] void config_error(const std::string &what) {
    throw Error(ErrorCode::kConfig, what);
}

bool uses_channel(const std::string &scenario) {
    return scenario != "mint" && scenario != "verify" && scenario != "face_to_face";
}

ChannelFaults make_faults(const std::vector<std::string> &faults, Trace *trace, const BitVec *mitm_id) {
    ChannelFaults out;
    for (const auto &f : faults) {
        if (f.rfind("drop:", 0) == 0) {
            out.drop.insert(message_kind_from_string(f.substr(5)));
        } else if (f == "duplicate") {
            out.duplicate = true;
        } else if (f == "reorder") {
            out.reorder = true;
        } else if (f == "mitm" && mitm_id) {
            BitVec id = *mitm_id;
            out.tamper = [id, trace](ChannelMessage &m) {
                if (m.kind == MessageKind::kDummyIdAnnounce) {
                    m.payload["dest_id"]["hex"] = id.hex();
                    if (trace) {
                        trace->record("tamper", {{"kind", to_string(m.kind)}});
                    }
                }
            };
        }
    }
    return out;
}

bool has_fault(const ScenarioConfig &cfg, const std::string &name) {
    return std::find(cfg.faults.begin(), cfg.faults.end(), name) != cfg.faults.end();
}

bool verify_token(World &w, QuantumToken &t, Rng &rng) {
    bool ok = true;
    for (size_t i = 0; i < t.lambda(); i++) {
        ok = verify_unit(t.units[i], w.oracles.resolve(t.oracle_pks[i]), rng) && ok;
    }
    return ok;
}

struct TrialEnv {
    World &w;
    Rng &rng;
    const ScenarioConfig &cfg;
};

TransferOutcome transfer_over(
    TrialEnv &env, Route route, const std::string &receiver, QuantumToken &token, const QuantumToken &dummy,
    const BitVec *mitm_id) {
    Channel ch(env.w.trace, make_faults(env.cfg.faults, env.w.trace, mitm_id));
    switch (route) {
        case Route::kFaceToFace:
            return face_to_face_transfer(env.w, "alice", receiver, token, dummy, env.rng);
        case Route::kRemote:
            return remote_transfer(env.w, "alice", receiver, token, dummy, ch, env.rng);
        case Route::kOnchain:
            return onchain_transfer(env.w, "alice", receiver, token, dummy, env.cfg.deposit, ch, env.rng);
    }
    throw Error(ErrorCode::kInvalidArgument, "unknown route");
}

Trial from_outcome(const TransferOutcome &o) {
    Trial t;
    t.result = o.success ? TrialResult::kSuccess : TrialResult::kRejected;
    t.reason = o.reason;
    t.detail = to_json(o);
    return t;
}

Trial mint_trial(TrialEnv &env) {
    QuantumToken a = bank_issue(env.w, "alice", env.cfg.lambda, env.cfg.value, env.rng, env.cfg.backend);
    Trial t;
    bool ok = verify_token(env.w, a, env.rng);
    env.w.note("verify_token", {{"ok", ok}});
    t.result = ok ? TrialResult::kSuccess : TrialResult::kRejected;
    if (!ok) {
        t.reason = ErrorCode::kVerificationFailed;
    }
    return t;
}

Trial verify_trial(TrialEnv &env) {
    QuantumToken a = bank_issue(env.w, "alice", env.cfg.lambda, env.cfg.value, env.rng, env.cfg.backend);
    bool dense = std::holds_alternative<StateVector>(a.units[0].state());
    std::vector<UnitState> before;
    for (const auto &u : a.units) {
        before.push_back(u.state());
    }
    bool ok = true;
    for (int round = 0; round < 3; round++) {
        ok = verify_token(env.w, a, env.rng) && ok;
    }
    double worst = 1;
    if (dense) {
        for (size_t i = 0; i < a.lambda(); i++) {
            worst = std::min(worst, fidelity(to_statevector(before[i]), to_statevector(a.units[i].state())));
        }
        ok = ok && worst >= 1 - 1e-9;
    }
    env.w.note("verify_token", {{"ok", ok}, {"rounds", 3}});
    Trial t;
    t.result = ok ? TrialResult::kSuccess : TrialResult::kRejected;
    if (!ok) {
        t.reason = ErrorCode::kVerificationFailed;
    }
    t.detail = {{"min_fidelity", dense ? nlohmann::json(worst) : nlohmann::json(nullptr)}};
    return t;
}

Trial honest_trial(TrialEnv &env, Route route) {
    QuantumToken a = bank_issue(env.w, "alice", env.cfg.lambda, env.cfg.value, env.rng, env.cfg.backend);
    QuantumToken b = bank_issue(env.w, "bob", env.cfg.lambda, 0, env.rng, env.cfg.backend);
    std::optional<QuantumToken> m;
    if (has_fault(env.cfg, "mitm")) {
        m = bank_issue(env.w, "mallory", env.cfg.lambda, 0, env.rng, env.cfg.backend);
    }
    if (route == Route::kOnchain) {
        bank_fund(env.w, "bob", env.cfg.deposit);
    }
    return from_outcome(transfer_over(env, route, "bob", a, b, m ? &m->id : nullptr));
}

Route random_route(Rng &rng) {
    return static_cast<Route>(rng.below(3));
}

// Alice pays one receiver honestly, then tries to get the same value to the
// other one. Order, routes and the second-leg trick are drawn per trial.
Trial double_spend_trial(TrialEnv &env) {
    const ScenarioConfig &cfg = env.cfg;
    QuantumToken a = bank_issue(env.w, "alice", cfg.lambda, cfg.value, env.rng, cfg.backend);
    QuantumToken b = bank_issue(env.w, "bob", cfg.lambda, 0, env.rng, cfg.backend);
    QuantumToken c = bank_issue(env.w, "carol", cfg.lambda, 0, env.rng, cfg.backend);
    bank_fund(env.w, "bob", cfg.deposit);
    bank_fund(env.w, "carol", cfg.deposit);

    bool bob_first = env.rng.bit();
    Route first_route = random_route(env.rng);
    Route second_route = random_route(env.rng);
    uint64_t trick = env.rng.below(3);
    const std::string first_name = bob_first ? "bob" : "carol";
    const std::string second_name = bob_first ? "carol" : "bob";
    QuantumToken &first_dummy = bob_first ? b : c;
    QuantumToken &second_dummy = bob_first ? c : b;
    env.w.note(
        "schedule", {{"first", first_name},
                     {"first_route", route_name(first_route)},
                     {"second_route", route_name(second_route)},
                     {"trick", trick}});

    TransferOutcome first = transfer_over(env, first_route, first_name, a, first_dummy, nullptr);
    TransferOutcome second;
    if (trick == 0 || !first.signature) {
        // Sign again for the second receiver.
        second = transfer_over(env, second_route, second_name, a, second_dummy, nullptr);
    } else {
        TransferSignature forged = *first.signature;
        if (trick == 2) {
            forged.dest_id = second_dummy.id;
        }
        if (second_route == Route::kOnchain) {
            std::string cid = env.w.ledger.deploy_escrow(second_name, second_dummy.id, cfg.deposit);
            second = submit_to_escrow(env.w, "alice", cid, forged);
        } else {
            second = accept_signature(env.w, second_name, second_dummy, forged);
        }
    }

    size_t claims = env.w.ledger.claims_on(a.id).size();
    Trial t;
    t.result = claims == 1   ? TrialResult::kBlocked
               : claims == 0 ? TrialResult::kRejected
                             : TrialResult::kDoubleSpend;
    t.reason = second.reason;
    t.detail = {
        {"first", to_json(first)},
        {"second", to_json(second)},
        {"claims", claims},
        {"second_value", env.w.ledger.get_value(second_dummy.id)}};
    return t;
}

// An accepted signature is presented again: to the same receiver, to its
// escrow and to a third party.
Trial replay_trial(TrialEnv &env) {
    const ScenarioConfig &cfg = env.cfg;
    QuantumToken a = bank_issue(env.w, "alice", cfg.lambda, cfg.value, env.rng, cfg.backend);
    QuantumToken b = bank_issue(env.w, "bob", cfg.lambda, 0, env.rng, cfg.backend);
    QuantumToken c = bank_issue(env.w, "carol", cfg.lambda, 0, env.rng, cfg.backend);
    bank_fund(env.w, "bob", cfg.deposit);
    Route route = random_route(env.rng);
    env.w.note("schedule", {{"route", route_name(route)}});

    TransferOutcome first = transfer_over(env, route, "bob", a, b, nullptr);
    Trial t;
    if (!first.signature) {
        t.result = TrialResult::kRejected;
        t.reason = first.reason;
        t.detail = {{"first", to_json(first)}};
        return t;
    }
    std::vector<TransferOutcome> replays;
    replays.push_back(accept_signature(env.w, "bob", b, *first.signature));
    replays.push_back(accept_signature(env.w, "carol", c, *first.signature));
    if (first.settlement) {
        replays.push_back(submit_to_escrow(env.w, "alice", first.settlement->contract_id, *first.signature));
    }
    bool any_accepted = false;
    nlohmann::json rj = nlohmann::json::array();
    for (const auto &r : replays) {
        any_accepted = any_accepted || r.success;
        rj.push_back(to_json(r));
    }
    size_t claims = env.w.ledger.claims_on(a.id).size();
    t.result = !any_accepted && claims == 1 ? TrialResult::kBlocked : TrialResult::kDoubleSpend;
    t.reason = replays.back().reason;
    t.detail = {{"first", to_json(first)}, {"replays", rj}, {"claims", claims}};
    return t;
}

// Mallory never holds a valid signature: she fabricates one for her dummy,
// and separately passes off a measured-and-reprepared copy of Alice's token.
Trial forge_trial(TrialEnv &env) {
    const ScenarioConfig &cfg = env.cfg;
    QuantumToken a = bank_issue(env.w, "alice", cfg.lambda, cfg.value, env.rng, cfg.backend);
    QuantumToken m = bank_issue(env.w, "mallory", cfg.lambda, 0, env.rng, cfg.backend);

    TransferSignature fake{a.id, m.id, {}};
    for (size_t i = 0; i < cfg.lambda; i++) {
        fake.sigmas.push_back(UnitSignature{random_bitvec(cfg.lambda, env.rng), m.id[i]});
    }
    TransferOutcome forged = accept_signature(env.w, "mallory", m, fake);

    QuantumToken copy;
    copy.id = a.id;
    copy.value = a.value;
    copy.oracle_pks = a.oracle_pks;
    for (size_t i = 0; i < cfg.lambda; i++) {
        BitVec seen = measure_all(a.units[i].state(), env.rng);
        bool dense = std::holds_alternative<StateVector>(a.units[i].state());
        UnitState fake_state = dense ? UnitState(StateVector::basis(seen))
                                     : UnitState(CosetState(Subspace(cfg.lambda), seen, BitVec(cfg.lambda)));
        copy.units.emplace_back(std::move(fake_state), a.oracle_pks[i]);
    }
    bool copy_passes = verify_token(env.w, copy, env.rng);
    env.w.note("counterfeit", {{"passes", copy_passes}});

    Trial t;
    bool blocked = !forged.success && !copy_passes && env.w.ledger.claims_on(a.id).empty();
    t.result = blocked ? TrialResult::kBlocked : TrialResult::kDoubleSpend;
    t.reason = forged.reason;
    t.detail = {{"forged_signature", to_json(forged)}, {"counterfeit_passes", copy_passes}};
    return t;
}

Trial run_trial(TrialEnv &env) {
    const std::string &s = env.cfg.scenario;
    if (s == "mint") {
        return mint_trial(env);
    }
    if (s == "verify") {
        return verify_trial(env);
    }
    if (s == "face_to_face") {
        return honest_trial(env, Route::kFaceToFace);
    }
    if (s == "remote") {
        return honest_trial(env, Route::kRemote);
    }
    if (s == "onchain") {
        return honest_trial(env, Route::kOnchain);
    }
    if (s == "double_spend_attack") {
        return double_spend_trial(env);
    }
    if (s == "replay_attack") {
        return replay_trial(env);
    }
    if (s == "forge_attack") {
        return forge_trial(env);
    }
    config_error("unknown scenario '" + s + "'");
}

template <typename T>
T field(const nlohmann::json &j, const char *key) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception &) {
        config_error(std::string("config key '") + key + "' has the wrong type");
    }
}

}  // namespace

std::string_view to_string(Backend b) {
    switch (b) {
        case Backend::kAuto:
            return "auto";
        case Backend::kStatevector:
            return "statevector";
        case Backend::kSymbolic:
            return "symbolic";
    }
    return "?";
}

Backend backend_from_string(std::string_view name) {
    for (Backend b : {Backend::kAuto, Backend::kStatevector, Backend::kSymbolic}) {
        if (to_string(b) == name) {
            return b;
        }
    }
    config_error("unknown backend '" + std::string(name) + "'");
}

ScenarioConfig config_from_json(const nlohmann::json &j) {
    if (!j.is_object()) {
        config_error("config must be a JSON object");
    }
    ScenarioConfig cfg;
    for (const auto &[key, value] : j.items()) {
        if (value.is_number_float() || (value.is_number_integer() && !value.is_number_unsigned())) {
            config_error("config key '" + key + "' must be a non-negative integer");
        }
        if (key == "lambda") {
            cfg.lambda = field<size_t>(j, "lambda");
        } else if (key == "seed") {
            cfg.seed = field<uint64_t>(j, "seed");
        } else if (key == "scenario") {
            cfg.scenario = field<std::string>(j, "scenario");
        } else if (key == "value") {
            cfg.value = field<uint64_t>(j, "value");
        } else if (key == "trials") {
            cfg.trials = field<uint64_t>(j, "trials");
        } else if (key == "deposit") {
            cfg.deposit = field<uint64_t>(j, "deposit");
        } else if (key == "faults") {
            cfg.faults = field<std::vector<std::string>>(j, "faults");
        } else if (key == "backend") {
            cfg.backend = backend_from_string(field<std::string>(j, "backend"));
        } else {
            config_error("unknown config key '" + key + "'");
        }
    }
    return cfg;
}

nlohmann::json to_json(const ScenarioConfig &cfg) {
    return {
        {"lambda", cfg.lambda},   {"seed", cfg.seed},     {"scenario", cfg.scenario},
        {"value", cfg.value},     {"trials", cfg.trials}, {"deposit", cfg.deposit},
        {"faults", cfg.faults},   {"backend", to_string(cfg.backend)}};
}

void validate(const ScenarioConfig &cfg) {
    if (std::find(kScenarioNames.begin(), kScenarioNames.end(), cfg.scenario) == kScenarioNames.end()) {
        config_error("unknown scenario '" + cfg.scenario + "'");
    }
    if (cfg.lambda < 2 || cfg.lambda % 2 != 0) {
        config_error("lambda must be even and at least 2");
    }
    size_t cap = cfg.backend == Backend::kSymbolic ? kMaxSymbolicLambda : kMaxStatevectorQubits;
    if (cfg.lambda > cap) {
        config_error(
            "lambda " + std::to_string(cfg.lambda) + " exceeds " + std::to_string(cap) + " for the " +
            std::string(to_string(cfg.backend)) + " backend");
    }
    if (cfg.trials < 1 || cfg.trials > kMaxTrials) {
        config_error("trials must be in [1, " + std::to_string(kMaxTrials) + "]");
    }
    if (cfg.value < 1) {
        config_error("value must be positive");
    }
    for (const auto &f : cfg.faults) {
        bool known = f == "duplicate" || f == "reorder" || f == "mitm";
        if (f.rfind("drop:", 0) == 0) {
            try {
                message_kind_from_string(f.substr(5));
                known = true;
            } catch (const Error &) {
                known = false;
            }
        }
        if (!known) {
            config_error("unknown fault '" + f + "'");
        }
        if (!uses_channel(cfg.scenario)) {
            config_error("scenario '" + cfg.scenario + "' has no channel to inject faults into");
        }
    }
}

nlohmann::json to_json(const ScenarioReport &r) {
    nlohmann::json reasons = nlohmann::json::object();
    for (const auto &[k, v] : r.reasons) {
        reasons[k] = v;
    }
    return {
        {"config", to_json(r.config)},
        {"counts",
         {{"trials", r.config.trials},
          {"successes", r.successes},
          {"rejections", r.rejections},
          {"attacks_blocked", r.attacks_blocked},
          {"double_spends", r.double_spends}}},
        {"reasons", reasons},
        {"checks",
         {{"conservation", r.conservation_ok},
          {"status", r.status_ok},
          {"no_double_spend", r.double_spends == 0},
          {"locked_escrows", r.locked_escrows}}},
        {"elapsed_ms", r.elapsed_ms},
        {"outcomes", r.outcomes}};
}

ScenarioReport run_scenario(const ScenarioConfig &cfg, Trace *trace) {
    validate(cfg);
    auto start = std::chrono::steady_clock::now();
    ScenarioReport report;
    report.config = cfg;
    Rng root(cfg.seed);
    for (uint64_t i = 0; i < cfg.trials; i++) {
        if (trace) {
            trace->set_context({{"trial", i}});
        }
        Rng rng = root.derive(i);
        World w(rng.next_u64(), trace);
        TrialEnv env{w, rng, cfg};
        Trial t = run_trial(env);

        switch (t.result) {
            case TrialResult::kSuccess:
                report.successes++;
                break;
            case TrialResult::kRejected:
                report.rejections++;
                break;
            case TrialResult::kBlocked:
                report.attacks_blocked++;
                break;
            case TrialResult::kDoubleSpend:
                report.double_spends++;
                break;
        }
        if (t.reason) {
            report.reasons[std::string(to_string(*t.reason))]++;
        }
        LedgerInvariants inv = w.ledger.check_invariants();
        report.conservation_ok = report.conservation_ok && inv.crypto_conserved && inv.value_conserved;
        report.status_ok = report.status_ok && inv.status_consistent;
        report.locked_escrows += w.ledger.open_escrows().size();

        nlohmann::json o = {{"trial", i}, {"result", result_name(t.result)}};
        o["reason"] = t.reason ? nlohmann::json(std::string(to_string(*t.reason))) : nlohmann::json(nullptr);
        o["detail"] = t.detail;
        report.outcomes.push_back(std::move(o));
    }
    if (trace) {
        trace->set_context(nlohmann::json::object());
    }
    report.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return report;
}

nlohmann::json mint_demo_lambda4(uint64_t seed) {
    const size_t lambda = 4;
    Rng rng(seed);
    // Demo only: x = z = 0 skips the mint's x-outside-S rule so the support
    // is the subspace itself.
    TokenUnitSecret secret = make_unit_secret(random_subspace(lambda, 2, rng), BitVec(lambda), BitVec(lambda), rng);
    OracleTriple oracles = OracleTriple::from_secret(secret, "pk:demo");
    BitVec s0 = secret.low.basis().row(0);
    BitVec s1 = secret.w;
    auto label = [&](const BitVec &v) -> std::string {
        if (v.is_zero()) {
            return "0000";
        }
        if (v == s0) {
            return "S0";
        }
        if (v == s1) {
            return "S1";
        }
        if (v == (s0 ^ s1)) {
            return "S0^S1";
        }
        return "?";
    };

    StateVector psi = to_statevector(prepare_unit_state(secret, Backend::kStatevector));
    std::vector<BitVec> support = psi.support();
    nlohmann::json rows = nlohmann::json::array();
    for (const auto &v : support) {
        Amplitude a = psi.amplitude(v);
        rows.push_back({{"basis", v.str()}, {"re", a.real()}, {"im", a.imag()}, {"magnitude", std::abs(a)},
                        {"label", label(v)}});
    }
    std::set<BitVec> points(support.begin(), support.end());
    bool closed = true;
    for (const auto &u : support) {
        for (const auto &v : support) {
            closed = closed && points.count(u ^ v);
        }
    }

    nlohmann::json signs = nlohmann::json::array();
    for (bool bit : {false, true}) {
        TokenUnit copy(prepare_unit_state(secret, Backend::kStatevector), "pk:demo");
        SignResult r = sign_unit_counted(copy, oracles, bit, rng);
        nlohmann::json coset = nlohmann::json::array();
        for (uint64_t i = 0; i < 16; i++) {
            BitVec v = BitVec::from_index(i, lambda);
            if (oracles.accepts(bit, v)) {
                coset.push_back(label(v));
            }
        }
        signs.push_back(
            {{"bit", bit ? 1 : 0},
             {"sigma", r.signature.sigma.str()},
             {"sigma_label", label(r.signature.sigma)},
             {"rounds", r.rounds},
             {"coset", coset},
             {"accepted", verify_unit_signature(r.signature, oracles)},
             {"copy_destroyed", !copy.live()}});
    }
    bool disjoint = true;
    for (uint64_t i = 0; i < 16; i++) {
        BitVec v = BitVec::from_index(i, lambda);
        disjoint = disjoint && !(oracles.low(v) && oracles.high(v));
    }
    return {
        {"lambda", lambda},
        {"seed", seed},
        {"S0", s0.str()},
        {"S1", s1.str()},
        {"support", rows},
        {"support_size", support.size()},
        {"contains_zero", points.count(BitVec(lambda)) == 1},
        {"closed_under_xor", closed},
        {"sign", signs},
        {"cosets_disjoint", disjoint}};
}

std::string demo_table(const nlohmann::json &demo) {
    std::ostringstream out;
    out << "S0 = " << demo.at("S0").get<std::string>() << ", S1 = " << demo.at("S1").get<std::string>() << "\n";
    out << "basis   amplitude  label\n";
    for (const auto &row : demo.at("support")) {
        char amp[32];
        std::snprintf(amp, sizeof amp, "%+.3f", row.at("re").get<double>());
        out << "|" << row.at("basis").get<std::string>() << ">  " << amp << "     |"
            << row.at("label").get<std::string>() << ">\n";
    }
    out << "closed under XOR: " << (demo.at("closed_under_xor").get<bool>() ? "yes" : "no") << "\n";
    for (const auto &s : demo.at("sign")) {
        out << "Sign(., " << s.at("bit").get<int>() << ") -> " << s.at("sigma").get<std::string>() << " ("
            << s.at("sigma_label").get<std::string>() << ") in {";
        bool first = true;
        for (const auto &c : s.at("coset")) {
            out << (first ? "" : ", ") << c.get<std::string>();
            first = false;
        }
        out << "}, " << (s.at("accepted").get<bool>() ? "accepted" : "REJECTED") << " after "
            << s.at("rounds").get<int>() << " round(s)\n";
    }
    return out.str();
}

nlohmann::json lightning_stats(size_t lambda, uint64_t trials, uint64_t seed) {
    if (trials < 2) {
        config_error("lightning needs at least 2 trials");
    }
    if (lambda < 2 || lambda % 2 != 0 || lambda > kMaxSymbolicLambda) {
        config_error("lambda must be even and in [2, " + std::to_string(kMaxSymbolicLambda) + "]");
    }
    Rng rng(seed);
    LightningReport r = lightning_collision_trial(lambda, trials, rng);
    double pairs = static_cast<double>(trials) * static_cast<double>(trials - 1) / 2.0;
    return {
        {"lambda", lambda},
        {"trials", trials},
        {"seed", seed},
        {"distinct_outputs", r.distinct_outputs},
        {"colliding_pairs", r.colliding_pairs},
        {"expected_pairs", std::ldexp(pairs, -2 * static_cast<int>(lambda))}};
}

}  // namespace qucoin
