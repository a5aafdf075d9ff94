// qucoin: scenario runner for the token protocol.
//
// Exit codes: 0 ok, 2 bad config or flags, 3 invariant violated.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "qucoin/errors.h"
#include "qucoin/scenario.h"

using namespace qucoin;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;

nlohmann::json load_config_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::kConfig, "cannot read config file '" + path + "'");
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorCode::kConfig, "config file '" + path + "' is not valid JSON: " + e.what());
    }
}

void write_file(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::kConfig, "cannot write '" + path + "'");
    }
    out << text;
}

bool demo_ok(const nlohmann::json &d) {
    bool ok = d.at("support_size") == 4 && d.at("closed_under_xor") == true && d.at("contains_zero") == true &&
              d.at("cosets_disjoint") == true;
    for (const auto &row : d.at("support")) {
        ok = ok && std::abs(row.at("magnitude").get<double>() - 0.5) <= 1e-9;
    }
    for (const auto &s : d.at("sign")) {
        ok = ok && s.at("accepted") == true;
    }
    return ok;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Subspace-coset token simulator: mint, verify, transfer and attack scenarios"};
    app.fallthrough();
    app.require_subcommand(0, 1);

    ScenarioConfig cfg;
    std::string config_path;
    std::string trace_out;
    std::string backend = "auto";
    auto *opt_lambda = app.add_option("--lambda", cfg.lambda, "Qubits per unit and bits per token id");
    auto *opt_seed = app.add_option("--seed", cfg.seed, "Root seed");
    auto *opt_trials = app.add_option("--trials", cfg.trials, "Number of trials");
    auto *opt_backend = app.add_option("--backend", backend, "auto, statevector or symbolic");
    app.add_option("--trace-out", trace_out, "Write the JSON-lines event trace here");
    app.add_option("--config", config_path, "Flat JSON config; flags given on the command line win");

    std::vector<std::string> faults;
    uint64_t value = 0;
    uint64_t deposit = 0;
    auto add_value_flags = [&](CLI::App *sub) {
        sub->add_option("--value", value, "Value of the issued token");
        sub->add_option("--deposit", deposit, "Escrow deposit for on-chain transfers");
    };

    auto *mint = app.add_subcommand("mint", "Delegated mint of tokens, then public verification");
    add_value_flags(mint);
    auto *verify = app.add_subcommand("verify", "Repeated non-destructive verification of fresh tokens");
    add_value_flags(verify);

    std::string channel;
    auto *transfer = app.add_subcommand("transfer", "Honest transfer over one channel");
    transfer->add_option("--channel", channel, "f2f, remote or onchain")
        ->required()
        ->check(CLI::IsMember({"f2f", "remote", "onchain"}));
    transfer->add_option("--fault", faults, "drop:<MessageKind>, duplicate, reorder or mitm (repeatable)");
    add_value_flags(transfer);

    std::string attack_type;
    auto *attack = app.add_subcommand("attack", "Attack scenarios with randomized schedules");
    attack->add_option("--type", attack_type, "double-spend, replay or forge")
        ->required()
        ->check(CLI::IsMember({"double-spend", "replay", "forge"}));
    attack->add_option("--fault", faults, "drop:<MessageKind>, duplicate, reorder or mitm (repeatable)");
    add_value_flags(attack);

    bool table = false;
    auto *demo = app.add_subcommand("demo-eq1", "Zero-shift lambda = 4 unit: support table and signing cosets");
    demo->add_flag("--table", table, "Print a text table instead of JSON");

    auto *lightning = app.add_subcommand("lightning", "Collision count of delegated mints on one fixed request");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (!config_path.empty()) {
            ScenarioConfig from_file = config_from_json(load_config_file(config_path));
            if (*opt_lambda) {
                from_file.lambda = cfg.lambda;
            }
            if (*opt_seed) {
                from_file.seed = cfg.seed;
            }
            if (*opt_trials) {
                from_file.trials = cfg.trials;
            }
            cfg = from_file;
        }
        if (*opt_backend) {
            cfg.backend = backend_from_string(backend);
        }
        if (value) {
            cfg.value = value;
        }
        if (deposit) {
            cfg.deposit = deposit;
        }
        if (!faults.empty()) {
            cfg.faults = faults;
        }

        if (*demo) {
            nlohmann::json d = mint_demo_lambda4(cfg.seed);
            std::cout << (table ? demo_table(d) : d.dump(2) + "\n");
            if (!trace_out.empty()) {
                write_file(trace_out, d.dump() + "\n");
            }
            return demo_ok(d) ? 0 : kExitInvariant;
        }
        if (*lightning) {
            nlohmann::json r = lightning_stats(cfg.lambda, cfg.trials, cfg.seed);
            std::cout << r.dump(2) << "\n";
            if (!trace_out.empty()) {
                write_file(trace_out, r.dump() + "\n");
            }
            return 0;
        }

        if (*mint) {
            cfg.scenario = "mint";
        } else if (*verify) {
            cfg.scenario = "verify";
        } else if (*transfer) {
            cfg.scenario = channel == "f2f" ? "face_to_face" : channel;
        } else if (*attack) {
            cfg.scenario = attack_type == "double-spend" ? "double_spend_attack"
                           : attack_type == "replay"     ? "replay_attack"
                                                         : "forge_attack";
        } else if (config_path.empty()) {
            std::cerr << app.help();
            return kExitConfig;
        }

        Trace trace;
        ScenarioReport report = run_scenario(cfg, &trace);
        std::cout << to_json(report).dump(2) << "\n";
        if (!trace_out.empty()) {
            write_file(trace_out, trace.jsonl());
        }
        return report.invariants_ok() ? 0 : kExitInvariant;
    } catch (const Error &e) {
        std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
        return e.code() == ErrorCode::kConfig ? kExitConfig : 1;
    }
}
