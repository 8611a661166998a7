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
#include <stdexcept>
#include <string>
#include <vector>

#include "cobra/history.hpp"

namespace cobra {

// A read that references an unknown, non-tombstoned write. Signals an
// incomplete fragment the caller should defer, not a verdict.
struct UnresolvedRead : std::runtime_error {
    TxnId txn;
    std::string key;
    WriteId write_id;
    UnresolvedRead(TxnId t, std::string k, WriteId w)
        : std::runtime_error("txn " + std::to_string(t) + " reads unknown write " +
                             std::to_string(w) + " on key '" + k + "'"),
          txn(t), key(std::move(k)), write_id(w) {}
};

struct BuildReject {
    enum class Reason { MultipleSuccessiveWrites, StaleReadOfDeleted, DuplicateTxn, BadShape };
    Reason reason;
    TxnId txn = 0;
    std::string key;
    std::string detail;
};

// Absorbs a history fragment into the accumulated state: one node per
// committed txn, a WR edge writer -> reader per read, readfrom and
// wwpairs index entries, and client-order edges between consecutive
// live txns of each session (when session_order is set).
//
// Reads of write id 0 resolve to the abstract initial transaction; it
// gets readfrom/wwpairs entries under writer id 0 but no node or edges.
//
// Throws UnresolvedRead for incomplete fragments. Returns a reject for
// duplicate RMW successors, reads of deleted txns, duplicate ids, and
// shape violations; acc is left unusable after a reject.
std::optional<BuildReject> create_known_graph(ExtendedHistory& acc, const History& frag,
                                              bool session_order = true);

// Cycle check over the known graph; returns the cycle as txn ids.
std::optional<std::vector<TxnId>> check_easy_reject(const ExtendedHistory& e);

std::string to_string(BuildReject::Reason r);

}  // namespace cobra
