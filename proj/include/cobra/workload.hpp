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

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cobra/history.hpp"

namespace cobra {

enum class Benchmark {
    BlindW_RW,  // 50/50 all-read or all-write transactions
    BlindW_RM,  // 90% read-only
    RMWOnly,    // every touched key is read then written
    ReadHeavy,  // 90/10 read/write op mix
};

enum class AnomalyKind {
    StaleRead,
    LostUpdate,
    WriteCycle,
    SessionOrderViolation,
    FutureReadAcrossEpochs,
};

struct WorkloadConfig {
    Benchmark benchmark = Benchmark::BlindW_RW;
    int num_sessions = 1;
    int total_txns = 100;  // normal txns across all sessions; fences are extra
    int keys = 100;
    int ops_per_txn = 8;
    int fence_every = 20;  // fence after this many normal txns per session; 0 = none
    double read_fence_fraction = 0.0;
    std::uint64_t seed = 0;
};

// Deterministic in cfg+seed. The simulator interleaves sessions into one
// global serial order and executes against a single-copy store, so the
// result is strong-session serializable by construction.
History generate(const WorkloadConfig& cfg);

struct PatternNotApplicable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InjectionResult {
    History history;
    std::vector<std::string> log;  // one entry per mutation, for assertions
};

// Mutates a serializable history into one exhibiting the anomaly; the
// result is rejected by the strong-session verifier (and, at oracle
// scale, by the permutation oracle). Throws PatternNotApplicable when h
// lacks the required structure.
InjectionResult inject(const History& h, AnomalyKind kind, std::uint64_t seed);

std::optional<Benchmark> parse_benchmark(const std::string& name);
std::optional<AnomalyKind> parse_anomaly(const std::string& name);
std::string to_string(Benchmark b);
std::string to_string(AnomalyKind k);

}  // namespace cobra
