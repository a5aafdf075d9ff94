#include "qucoin/token.h"

#include <cstdio>
#include <utility>

#include "qucoin/errors.h"

namespace qucoin {

namespace {

BitPredicate coset_predicate(Coset c) {
    return [c = std::move(c)](const BitVec &v) { return c.contains(v); };
}

uint64_t fold_words(uint64_t h, const BitVec &v) {
    for (uint64_t w : v.words()) {
        h = splitmix64(h ^ w);
    }
    return splitmix64(h ^ v.size());
}

void require_live(const TokenUnit &unit) {
    if (!unit.live()) {
        throw Error(ErrorCode::kDestroyedUnit, "token unit " + unit.pk() + " has been destroyed");
    }
}

void require_matching_lambda(const TokenUnit &unit, const OracleTriple &oracles) {
    if (lambda_of(unit.state()) != oracles.lambda()) {
        throw Error(ErrorCode::kLengthMismatch, "unit register size differs from oracle dimension");
    }
}

BitPredicate bind(const OracleTriple &o, bool (OracleTriple::*test)(const BitVec &) const) {
    return [&o, test](const BitVec &v) { return (o.*test)(v); };
}

}  // namespace

TokenUnitSecret make_unit_secret(Subspace space, BitVec x_shift, BitVec z_phase, Rng &rng) {
    if (x_shift.size() != space.ambient() || z_phase.size() != space.ambient()) {
        throw Error(ErrorCode::kLengthMismatch, "shift/phase length differs from ambient dimension");
    }
    SubspaceSplit split = split_subspace(space, rng);
    return TokenUnitSecret{
        std::move(space), std::move(split.low), std::move(split.w), std::move(x_shift), std::move(z_phase)};
}

OracleTriple::OracleTriple(BitPredicate low, BitPredicate high, BitPredicate dual, std::string pk, size_t lambda)
    : low_(std::move(low)), high_(std::move(high)), dual_(std::move(dual)), pk_(std::move(pk)), lambda_(lambda) {
}

OracleTriple OracleTriple::from_secret(const TokenUnitSecret &secret, std::string pk) {
    return OracleTriple(
        coset_predicate(Coset(secret.low, secret.x_shift)),
        coset_predicate(Coset(secret.low, secret.x_shift ^ secret.w)),
        coset_predicate(Coset(qucoin::dual(secret.space), secret.z_phase)),
        std::move(pk),
        secret.lambda());
}

std::string make_oracle_address(const TokenUnitSecret &secret, Rng &rng) {
    uint64_t h = rng.next_u64();
    for (const auto &row : secret.space.basis().row_vectors()) {
        h = fold_words(h, row);
    }
    h = fold_words(h, secret.w);
    h = fold_words(h, secret.x_shift);
    h = fold_words(h, secret.z_phase);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "pk:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

TokenUnit::TokenUnit(UnitState state, std::string pk) : state_(std::move(state)), pk_(std::move(pk)) {
}

const UnitState &TokenUnit::state() const {
    require_live(*this);
    return *state_;
}

UnitState &TokenUnit::mutable_state() {
    require_live(*this);
    return *state_;
}

UnitState prepare_unit_state(const TokenUnitSecret &secret, Backend backend) {
    CosetState c(secret.space, secret.x_shift, secret.z_phase);
    bool dense = backend == Backend::kStatevector ||
                 (backend == Backend::kAuto && secret.lambda() <= kMaxStatevectorQubits);
    if (dense) {
        return expand(c);
    }
    return c;
}

MintedUnit mint_unit(size_t lambda, Rng &rng, Backend backend) {
    if (lambda < 2 || lambda % 2 != 0) {
        throw Error(ErrorCode::kInvalidArgument, "lambda must be even and at least 2");
    }
    if (backend == Backend::kStatevector && lambda > kMaxStatevectorQubits) {
        throw Error(ErrorCode::kBackendCapacity, "lambda exceeds the statevector backend");
    }
    int attempts = 0;
    while (true) {
        attempts++;
        Subspace space = random_subspace(lambda, lambda / 2, rng);
        BitVec x = random_bitvec(lambda, rng);
        BitVec z = random_bitvec(lambda, rng);
        if (space.contains(x)) {
            continue;
        }
        TokenUnitSecret secret = make_unit_secret(std::move(space), std::move(x), std::move(z), rng);
        std::string pk = make_oracle_address(secret, rng);
        OracleTriple oracles = OracleTriple::from_secret(secret, pk);
        TokenUnit unit(prepare_unit_state(secret, backend), std::move(pk));
        return MintedUnit{std::move(unit), std::move(oracles), std::move(secret), attempts};
    }
}

bool verify_unit(TokenUnit &unit, const OracleTriple &oracles, Rng &rng) {
    require_live(unit);
    require_matching_lambda(unit, oracles);
    UnitState &state = unit.mutable_state();

    auto computational = measure_predicate(state, bind(oracles, &OracleTriple::in_coset), rng);
    state = std::move(computational.post_state);
    if (!computational.bit) {
        return false;
    }
    auto in_dual = measure_predicate(hadamard_all(state), bind(oracles, &OracleTriple::dual), rng);
    state = hadamard_all(in_dual.post_state);
    return in_dual.bit;
}

SignResult sign_unit_counted(TokenUnit &unit, const OracleTriple &oracles, bool bit, Rng &rng) {
    require_live(unit);
    require_matching_lambda(unit, oracles);
    UnitState &state = unit.mutable_state();
    BitPredicate target = [&oracles, bit](const BitVec &v) { return oracles.accepts(bit, v); };

    for (int round = 1; round <= kMaxSignRounds; round++) {
        auto m = measure_predicate(state, target, rng);
        if (m.bit) {
            BitVec sigma = measure_all(m.post_state, rng);
            unit.destroy();
            return SignResult{UnitSignature{std::move(sigma), bit}, round};
        }
        // Restore step: the dual test pushes the state back onto all of S + x
        // whichever way it comes out.
        auto restored = measure_predicate(hadamard_all(m.post_state), bind(oracles, &OracleTriple::dual), rng);
        state = hadamard_all(restored.post_state);
    }
    throw Error(
        ErrorCode::kMaxRetriesExceeded,
        "signing unit " + unit.pk() + " did not succeed within " + std::to_string(kMaxSignRounds) + " rounds");
}

UnitSignature sign_unit(TokenUnit &unit, const OracleTriple &oracles, bool bit, Rng &rng) {
    return sign_unit_counted(unit, oracles, bit, rng).signature;
}

bool verify_unit_signature(const UnitSignature &sig, const OracleTriple &oracles) {
    if (sig.sigma.size() != oracles.lambda()) {
        return false;
    }
    return oracles.accepts(sig.bit, sig.sigma);
}

bool QuantumToken::all_live() const {
    for (const auto &u : units) {
        if (!u.live()) {
            return false;
        }
    }
    return true;
}

bool QuantumToken::any_destroyed() const {
    return !all_live();
}

MintedToken mint_token(size_t lambda, uint64_t value, const BitVec &id, Rng &rng, Backend backend) {
    if (id.size() != lambda) {
        throw Error(ErrorCode::kLengthMismatch, "token id must have lambda bits");
    }
    MintedToken out;
    out.token.id = id;
    out.token.value = value;
    for (size_t i = 0; i < lambda; i++) {
        MintedUnit m = mint_unit(lambda, rng, backend);
        out.token.oracle_pks.push_back(m.oracles.pk());
        out.token.units.push_back(std::move(m.unit));
        out.oracles.push_back(std::move(m.oracles));
        out.secrets.push_back(std::move(m.secret));
    }
    return out;
}

nlohmann::json to_json(const TransferSignature &sig) {
    nlohmann::json sigmas = nlohmann::json::array();
    for (const auto &s : sig.sigmas) {
        sigmas.push_back({{"bit", s.bit ? 1 : 0}, {"sigma", s.sigma.hex()}});
    }
    return {
        {"lambda", sig.dest_id.size()},
        {"source_id", sig.source_id.hex()},
        {"dest_id", sig.dest_id.hex()},
        {"sigmas", sigmas},
    };
}

TransferSignature transfer_signature_from_json(const nlohmann::json &j) {
    size_t lambda = j.at("lambda").get<size_t>();
    TransferSignature sig;
    sig.source_id = BitVec::from_hex(j.at("source_id").get<std::string>(), lambda);
    sig.dest_id = BitVec::from_hex(j.at("dest_id").get<std::string>(), lambda);
    for (const auto &s : j.at("sigmas")) {
        int bit = s.at("bit").get<int>();
        if (bit != 0 && bit != 1) {
            throw Error(ErrorCode::kInvalidArgument, "signature bit must be 0 or 1");
        }
        sig.sigmas.push_back(UnitSignature{BitVec::from_hex(s.at("sigma").get<std::string>(), lambda), bit == 1});
    }
    return sig;
}

TransferSignature transfer_sign(
    QuantumToken &token, std::span<const OracleTriple> oracles, const BitVec &dest_id, Rng &rng) {
    if (dest_id.size() != token.lambda() || oracles.size() != token.lambda()) {
        throw Error(ErrorCode::kLengthMismatch, "destination id and oracle list must have one entry per unit");
    }
    if (token.any_destroyed()) {
        throw Error(ErrorCode::kDoubleSpendAttempt, "token " + token.id.str() + " has already been spent");
    }
    TransferSignature sig{token.id, dest_id, {}};
    for (size_t i = 0; i < token.lambda(); i++) {
        sig.sigmas.push_back(sign_unit(token.units[i], oracles[i], dest_id[i], rng));
    }
    return sig;
}

bool verify_transfer(const TransferSignature &sig, std::span<const OracleTriple> oracles, const BitVec &dest_id) {
    if (sig.dest_id != dest_id || sig.sigmas.size() != oracles.size() || dest_id.size() != oracles.size()) {
        return false;
    }
    for (size_t i = 0; i < oracles.size(); i++) {
        if (sig.sigmas[i].bit != dest_id[i] || !verify_unit_signature(sig.sigmas[i], oracles[i])) {
            return false;
        }
    }
    return true;
}

}  // namespace qucoin
