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

#include <stdexcept>
#include <vector>

#include "cobra/history.hpp"

namespace cobra {

struct BoundExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// True iff `schedule` (a permutation of h's txns) replays on a
// single-copy store with every read seeing the latest prior write.
bool replay(const History& h, const std::vector<TxnId>& schedule);

// Ground truth by schedule enumeration with incremental-replay pruning.
// respect_sessions restricts to schedules preserving each session's
// issuing order. Throws BoundExceeded above max_txns.
bool oracle_serializable(const History& h, bool respect_sessions, std::size_t max_txns = 9);

// Ground truth over the original (uncoalesced) bipath constraints: one
// constraint per read and interfering writer, all 2^|C| assignments
// cycle-checked. Throws BoundExceeded above max_constraints.
bool brute_force_polygraph(const History& h, std::size_t max_constraints = 20);

// Number of bipath constraints the uncoalesced form would generate.
std::size_t polygraph_constraint_count(const History& h);

}  // namespace cobra
