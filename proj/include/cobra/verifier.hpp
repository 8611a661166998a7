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

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "cobra/constraints.hpp"
#include "cobra/history.hpp"
#include "cobra/solver.hpp"

namespace cobra {

struct VerifyOptions {
    bool session_order = true;  // strong-session check; off = plain serializability
    bool prune = true;
    int max_prune_iters = 10;
    double time_budget_secs = 0.0;  // 0 = unbounded
    std::string export_instance_path;
};

struct VerifyStats {
    std::size_t txns = 0;
    std::size_t known_edges = 0;
    // Chain-pair counts per stage; "before combine" treats every write
    // as its own chain.
    std::size_t constraints_before_combine = 0;
    std::size_t constraints_after_combine = 0;
    std::size_t constraints_after_coalesce = 0;
    std::size_t constraints_after_prune = 0;
    std::map<std::size_t, std::size_t> chains_per_key_histogram;  // #chains -> #keys
    std::size_t live_set = 0;
};

struct VerifyResult {
    enum class Status { Accept, Reject, TimeBudgetExceeded };
    Status status = Status::Accept;
    std::string reason;  // short machine-ish tag on Reject
    std::vector<std::vector<TxnId>> cycles;
    std::vector<Constraint> blamed;  // constraints implicated by the cycles
    std::vector<TxnId> schedule;     // on Accept: witness serial order
    // On Reject: set when every certificate cycle re-checked edge by
    // edge against the final known graph and blamed constraint sides.
    bool certificate_valid = false;
    VerifyStats stats;
};

// One-shot check: accept iff the history is (strong-session, unless
// disabled) serializable.
VerifyResult verify(const History& h, const VerifyOptions& opts = {});

// Pipeline tail shared with round-based verification: constraints,
// pruning, solving over an already-built state. Mutates e.out (RW
// inference and pruning) and fills con_out with surviving constraints.
VerifyResult encode_and_solve(ExtendedHistory& e, const VerifyOptions& opts,
                              std::vector<Constraint>* con_out = nullptr);

// True iff every cycle in the result walks only known-graph edges or
// edges from blamed constraint sides.
bool validate_cycles(const VerifyResult& r, const ExtendedHistory& e);

}  // namespace cobra
