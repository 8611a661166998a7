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
#include <iosfwd>
#include <string>
#include <vector>

#include "cobra/constraints.hpp"
#include "cobra/history.hpp"

namespace cobra {

// Acyclicity search instance: known edges are forced true, each choice
// picks exactly one of two edge sets, and the union must stay acyclic.
struct SolverInstance {
    struct Choice {
        std::vector<std::pair<int, int>> a, b;

        bool operator==(const Choice&) const = default;
    };
    int n = 0;
    std::vector<TxnId> ids;  // dense index -> txn id
    std::vector<std::pair<int, int>> fixed_edges;
    std::vector<Choice> choices;

    bool operator==(const SolverInstance&) const = default;
};

SolverInstance encode(const ExtendedHistory& e, const std::vector<Constraint>& con);

// Text form: `n <vertices>`, one `e i j` per fixed edge, then per choice
// `c |A| |B|` followed by `a i j` and `b i j` lines.
std::string export_instance(const SolverInstance& inst);
SolverInstance parse_instance(std::istream& in);
SolverInstance parse_instance(const std::string& text);

struct SolveResult {
    enum class Status { Accept, Reject, TimeBudgetExceeded };
    Status status = Status::Accept;
    // Accept: per choice, 0 picks side a, 1 picks side b.
    std::vector<int> assignment;
    // Reject: witness cycles (dense vertex indices) and the blamed
    // choices; every cycle edge is fixed or on a blamed choice's side.
    std::vector<std::vector<int>> cycles;
    std::vector<std::size_t> blamed;
    std::uint64_t conflicts = 0;
};

// Exhaustive backtracking over choices with an online topological order.
// Deterministic for a given instance. budget_secs 0 disables the budget.
SolveResult solve(const SolverInstance& inst, double budget_secs = 0.0);

// Topological order (as txn ids) of fixed edges plus the chosen sides;
// deterministic: smallest txn id first among ready vertices.
std::vector<TxnId> extract_schedule(const SolverInstance& inst,
                                    const std::vector<int>& assignment);

// True iff `cycle` (dense indices, implicitly closed) walks only edges
// that are fixed or belong to a side of a blamed choice.
bool validate_certificate(const SolverInstance& inst, const std::vector<int>& cycle,
                          const std::vector<std::size_t>& blamed);

}  // namespace cobra
