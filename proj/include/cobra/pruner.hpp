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

#include <optional>
#include <vector>

#include "cobra/constraints.hpp"
#include "cobra/history.hpp"

namespace cobra {

struct PruneOutcome {
    enum class Status { Ok, CycleInKnown, BothSidesConflict };
    Status status = Status::Ok;
    // CycleInKnown: one cycle. BothSidesConflict: one cycle per side.
    std::vector<std::vector<TxnId>> cycles;
    // BothSidesConflict: the constraint neither side of which fits.
    std::optional<Constraint> blamed;
    int iterations = 0;
    std::size_t resolved = 0;
};

// Resolves constraints against all-pairs reachability of the known
// graph: a side holding an edge (u, v) with v reaching u cannot be
// chosen, so the other side's edges join the graph and the constraint
// is dropped. Iterates until fixpoint or max_iters, recomputing the
// closure after each enlarging pass. Both sides conflicting is a
// rejection of the whole history.
PruneOutcome prune(std::vector<Constraint>& con, ExtendedHistory& e, int max_iters = 10);

}  // namespace cobra
