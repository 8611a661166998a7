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

#include <compare>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "cobra/history.hpp"

namespace cobra {

struct Edge {
    TxnId from = 0;
    TxnId to = 0;
    auto operator<=>(const Edge&) const = default;
};

// Transactions whose writes to `key` are consecutive; adjacent members
// are linked by an RMW read. txns[0] may be the abstract initial txn 0.
struct Chain {
    std::string key;
    std::vector<TxnId> txns;

    TxnId head() const { return txns.front(); }
    TxnId tail() const { return txns.back(); }
    bool operator==(const Chain&) const = default;
};

// Two-sided constraint: a compatible graph includes every edge of
// exactly one side.
struct Constraint {
    std::vector<Edge> first;
    std::vector<Edge> second;
    bool operator==(const Constraint&) const = default;
};

struct ConstraintGenResult {
    // key -> chains, each ordered by head txn id (initial-txn chain first).
    std::map<std::string, std::vector<Chain>> chains;
    std::vector<Constraint> constraints;
};

struct InternalInvariantViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Splices singleton chains along RMW successor pairs. Entries whose
// successor txn is no longer live are markers only and do not splice.
std::map<std::string, std::vector<Chain>> combine_writes(
    std::map<std::string, std::vector<Chain>> chains, const ExtendedHistory& e);

// Adds anti-dependency edges: each reader of chain[i] that is not the
// chain's next writer must precede chain[i+1].
void infer_rw_edges(const std::map<std::string, std::vector<Chain>>& chains,
                    ExtendedHistory& e);

// Coalesced constraint over one unordered chain pair: each side orders
// one chain (tail and its readers) before the head of the other.
Constraint coalesce(const Chain& ci, const Chain& cj, const ExtendedHistory& e);

// Full pipeline: initialize chains (one singleton per live writer, plus
// an initial-txn chain per key read at its initial value), combine,
// infer RW edges into e.out, emit one constraint per chain pair.
// Pairs involving the initial-txn chain are resolved in place: the other
// chain must follow, so that side's edges go straight into e.out.
ConstraintGenResult gen_constraints(ExtendedHistory& e);

}  // namespace cobra
