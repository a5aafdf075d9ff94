#ifndef QUCOIN_SCENARIO_H
#define QUCOIN_SCENARIO_H

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "qucoin/protocol.h"
#include "qucoin/token.h"

namespace qucoin {

/// Scenario names accepted by run_scenario.
inline const std::vector<std::string> kScenarioNames = {
    "mint", "verify", "face_to_face", "remote", "onchain", "double_spend_attack", "replay_attack", "forge_attack",
};

struct ScenarioConfig {
    size_t lambda = 4;
    uint64_t seed = 1;
    std::string scenario = "face_to_face";
    uint64_t value = 100;
    uint64_t trials = 1;
    uint64_t deposit = 100;
    // "drop:<MessageKind>", "duplicate", "reorder", "mitm"
    std::vector<std::string> faults;
    Backend backend = Backend::kAuto;
};

/// Flat key-value JSON; unknown keys and wrong types fail with Config.
ScenarioConfig config_from_json(const nlohmann::json &j);
nlohmann::json to_json(const ScenarioConfig &cfg);
/// Fails with Config. Statevector runs need an even lambda in [2, 16].
void validate(const ScenarioConfig &cfg);

std::string_view to_string(Backend b);
Backend backend_from_string(std::string_view name);

struct ScenarioReport {
    ScenarioConfig config;
    // Each trial ends in exactly one of these.
    uint64_t successes = 0;
    uint64_t rejections = 0;
    uint64_t attacks_blocked = 0;
    uint64_t double_spends = 0;
    std::map<std::string, uint64_t> reasons;
    std::vector<nlohmann::json> outcomes;
    bool conservation_ok = true;
    bool status_ok = true;
    uint64_t locked_escrows = 0;  // open deposits nobody can reclaim
    double elapsed_ms = 0;

    bool invariants_ok() const {
        return conservation_ok && status_ok && double_spends == 0;
    }
};

nlohmann::json to_json(const ScenarioReport &r);

/// Deterministic in (config, seed). Each trial runs in its own World seeded
/// from a derived stream; all events go to `trace` when given.
ScenarioReport run_scenario(const ScenarioConfig &cfg, Trace *trace = nullptr);

/// Zero-shift lambda = 4 unit: support table, XOR closure and the two signing
/// cosets on fresh copies.
nlohmann::json mint_demo_lambda4(uint64_t seed);
std::string demo_table(const nlohmann::json &demo);

/// Collision count over `trials` delegated mints plus the birthday expectation
/// C(trials, 2) / 2^(2 lambda).
nlohmann::json lightning_stats(size_t lambda, uint64_t trials, uint64_t seed);

}  // namespace qucoin

#endif
