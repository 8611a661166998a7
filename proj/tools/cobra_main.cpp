// Copyright 2026 The cobra-verify Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cobra/codec.hpp"
#include "cobra/rounds.hpp"
#include "cobra/verifier.hpp"
#include "cobra/workload.hpp"
#include "json.hpp"

namespace {

constexpr int kExitAccept = 0;
constexpr int kExitReject = 1;
constexpr int kExitBudget = 2;
constexpr int kExitUsage = 64;
constexpr int kExitIo = 74;

std::string cycle_text(const std::vector<cobra::TxnId>& cyc) {
    std::string s = "cycle:";
    for (cobra::TxnId id : cyc) s += " " + std::to_string(id) + " ->";
    s += " " + std::to_string(cyc.front());
    return s;
}

nlohmann::json result_json(const cobra::VerifyResult& r) {
    nlohmann::json j;
    j["status"] = r.status == cobra::VerifyResult::Status::Accept ? "accept"
                  : r.status == cobra::VerifyResult::Status::Reject ? "reject"
                                                                    : "time-budget-exceeded";
    if (!r.reason.empty()) j["reason"] = r.reason;
    j["cycles"] = r.cycles;
    nlohmann::json blamed = nlohmann::json::array();
    for (const auto& c : r.blamed) {
        nlohmann::json jc;
        for (const auto& e : c.first) jc["first"].push_back({e.from, e.to});
        for (const auto& e : c.second) jc["second"].push_back({e.from, e.to});
        blamed.push_back(jc);
    }
    j["blamed_constraints"] = blamed;
    return j;
}

void print_verdict(const cobra::VerifyResult& r, bool json, std::size_t round,
                   bool with_round) {
    if (json) {
        nlohmann::json j = result_json(r);
        if (with_round) j["round"] = round;
        std::cout << j.dump() << '\n';
        return;
    }
    std::string prefix = with_round ? "round " + std::to_string(round) + ": " : "";
    switch (r.status) {
        case cobra::VerifyResult::Status::Accept:
            std::cout << prefix << "ACCEPT\n";
            break;
        case cobra::VerifyResult::Status::Reject:
            std::cout << prefix << "REJECT (" << r.reason << ")\n";
            for (const auto& cyc : r.cycles) std::cout << "  " << cycle_text(cyc) << '\n';
            break;
        case cobra::VerifyResult::Status::TimeBudgetExceeded:
            std::cout << prefix << "TIME-BUDGET-EXCEEDED\n";
            break;
    }
}

double env_time_budget() {
    const char* v = std::getenv("COBRA_TIME_BUDGET_SECS");
    return v ? std::atof(v) : 0.0;
}

cobra::History load_history(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open '" + path + "'");
    return cobra::parse_history(in);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"black-box serializability checker for transaction histories"};
    app.require_subcommand(1);
    bool json = false;
    app.add_flag("--json", json, "machine-readable output");

    // gen
    auto* gen = app.add_subcommand("gen", "generate a benchmark history file");
    std::string bench_name = "blindw-rw", out_path, inject_name;
    cobra::WorkloadConfig wcfg;
    gen->add_option("--benchmark", bench_name, "blindw-rw|blindw-rm|rmw-only|read-heavy");
    gen->add_option("--sessions", wcfg.num_sessions, "number of client sessions");
    gen->add_option("--txns", wcfg.total_txns, "total transactions across sessions");
    gen->add_option("--keys", wcfg.keys, "number of keys");
    gen->add_option("--ops", wcfg.ops_per_txn, "operations per transaction");
    gen->add_option("--fence-every", wcfg.fence_every, "txns between fences per session, 0 = none");
    gen->add_option("--seed", wcfg.seed, "rng seed");
    gen->add_option("--out", out_path, "output file")->required();
    gen->add_option("--inject", inject_name,
                    "stale-read|lost-update|write-cycle|session-order-violation|"
                    "future-read-across-epochs");

    // verify
    auto* verify = app.add_subcommand("verify", "one-shot check of a history file");
    std::string verify_path, export_path;
    bool no_session_order = false, no_prune = false;
    int max_prune_iters = 10;
    double time_budget = 0.0;
    verify->add_option("file", verify_path, "history file")->required();
    verify->add_flag("--no-session-order", no_session_order,
                     "check plain instead of strong-session serializability");
    verify->add_flag("--no-prune", no_prune, "skip reachability pruning");
    verify->add_option("--max-prune-iters", max_prune_iters, "pruning iteration cap");
    verify->add_option("--time-budget", time_budget, "solver budget in seconds");
    verify->add_option("--export-instance", export_path, "write the solver instance here");

    // verify-rounds
    auto* rounds = app.add_subcommand("verify-rounds", "streaming check with garbage collection");
    std::string dir, checkpoint_path;
    std::size_t round_size = 0;
    bool rounds_no_session_order = false, no_gc = false;
    rounds->add_option("--dir", dir, "directory of history fragments")->required();
    rounds->add_option("--round-size", round_size, "transactions per round")->required();
    rounds->add_option("--checkpoint", checkpoint_path, "state file to resume from and update");
    rounds->add_flag("--no-session-order", rounds_no_session_order,
                     "check plain instead of strong-session serializability");
    rounds->add_flag("--no-gc", no_gc, "keep all transactions live");

    // stats
    auto* stats = app.add_subcommand("stats", "pipeline statistics for a history file");
    std::string stats_path;
    stats->add_option("file", stats_path, "history file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (gen->parsed()) {
            auto bench = cobra::parse_benchmark(bench_name);
            if (!bench) {
                std::cerr << "unknown benchmark '" << bench_name << "'\n";
                return kExitUsage;
            }
            wcfg.benchmark = *bench;
            cobra::History h = cobra::generate(wcfg);
            if (!inject_name.empty()) {
                auto kind = cobra::parse_anomaly(inject_name);
                if (!kind) {
                    std::cerr << "unknown anomaly '" << inject_name << "'\n";
                    return kExitUsage;
                }
                auto res = cobra::inject(h, *kind, wcfg.seed);
                h = std::move(res.history);
                for (const auto& line : res.log) std::cerr << "inject: " << line << '\n';
            }
            std::ofstream out(out_path);
            if (!out) throw std::ios_base::failure("cannot open '" + out_path + "'");
            cobra::serialize_history(h, out);
            return kExitAccept;
        }

        if (verify->parsed()) {
            cobra::History h = load_history(verify_path);
            cobra::VerifyOptions opts;
            opts.session_order = !no_session_order;
            opts.prune = !no_prune;
            opts.max_prune_iters = max_prune_iters;
            opts.time_budget_secs = time_budget > 0 ? time_budget : env_time_budget();
            opts.export_instance_path = export_path;
            cobra::VerifyResult r = cobra::verify(h, opts);
            print_verdict(r, json, 0, false);
            switch (r.status) {
                case cobra::VerifyResult::Status::Accept: return kExitAccept;
                case cobra::VerifyResult::Status::Reject: return kExitReject;
                case cobra::VerifyResult::Status::TimeBudgetExceeded: return kExitBudget;
            }
        }

        if (rounds->parsed()) {
            std::vector<std::filesystem::path> files;
            for (const auto& entry : std::filesystem::directory_iterator(dir))
                if (entry.is_regular_file()) files.push_back(entry.path());
            std::sort(files.begin(), files.end());

            cobra::RoundsConfig cfg;
            cfg.verify.session_order = !rounds_no_session_order;
            cfg.verify.time_budget_secs = env_time_budget();
            cfg.gc = !no_gc;
            cobra::RoundVerifier rv(cfg);
            if (!checkpoint_path.empty() && std::filesystem::exists(checkpoint_path)) {
                std::ifstream in(checkpoint_path);
                rv = cobra::RoundVerifier::load_checkpoint(in, cfg);
            }

            std::vector<cobra::Transaction> all;
            for (const auto& f : files) {
                std::ifstream in(f);
                if (!in) throw std::ios_base::failure("cannot open '" + f.string() + "'");
                cobra::History h = cobra::parse_history(in);
                for (auto& t : h.txns) all.push_back(std::move(t));
            }
            std::size_t total_rounds = (all.size() + round_size - 1) / std::max<std::size_t>(round_size, 1);
            for (std::size_t round = 0; round < total_rounds; ++round) {
                if (round < rv.round_index()) continue;  // already checkpointed
                cobra::History frag;
                for (std::size_t i = round * round_size;
                     i < std::min(all.size(), (round + 1) * round_size); ++i)
                    frag.add(all[i]);
                cobra::RoundVerdict v = rv.process(frag);
                print_verdict(v.result, json, v.round, true);
                if (v.result.status == cobra::VerifyResult::Status::Reject) return kExitReject;
                if (v.result.status == cobra::VerifyResult::Status::TimeBudgetExceeded)
                    return kExitBudget;
                if (!checkpoint_path.empty()) {
                    std::ofstream out(checkpoint_path, std::ios::trunc);
                    rv.save_checkpoint(out);
                }
            }
            return kExitAccept;
        }

        if (stats->parsed()) {
            cobra::History h = load_history(stats_path);
            cobra::VerifyResult r = cobra::verify(h, {});
            const cobra::VerifyStats& s = r.stats;
            if (json) {
                nlohmann::json j;
                j["txns"] = s.txns;
                j["known_edges"] = s.known_edges;
                j["constraints_before_combine"] = s.constraints_before_combine;
                j["constraints_after_combine"] = s.constraints_after_combine;
                j["constraints_after_coalesce"] = s.constraints_after_coalesce;
                j["constraints_after_prune"] = s.constraints_after_prune;
                j["chains_per_key_histogram"] = s.chains_per_key_histogram;
                j["live_set"] = s.live_set;
                std::cout << j.dump() << '\n';
            } else {
                std::cout << "txns: " << s.txns << '\n'
                          << "known_edges: " << s.known_edges << '\n'
                          << "constraints_before_combine: " << s.constraints_before_combine << '\n'
                          << "constraints_after_combine: " << s.constraints_after_combine << '\n'
                          << "constraints_after_coalesce: " << s.constraints_after_coalesce << '\n'
                          << "constraints_after_prune: " << s.constraints_after_prune << '\n'
                          << "live_set: " << s.live_set << '\n';
                std::cout << "chains_per_key:";
                for (const auto& [chains, keys] : s.chains_per_key_histogram)
                    std::cout << ' ' << chains << "x" << keys;
                std::cout << '\n';
            }
            return kExitAccept;
        }
    } catch (const cobra::CodecError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
