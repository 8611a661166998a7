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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace cobra {

using TxnId = std::uint64_t;
using WriteId = std::uint64_t;
using SessionId = std::uint32_t;

// Reserved ids for the abstract initial transaction / initial value.
inline constexpr TxnId kInitialTxn = 0;
inline constexpr WriteId kInitialWrite = 0;

// Key reserved for fence transactions.
inline const std::string kEpochKey = "EPOCH";

struct Operation {
    enum class Kind { Read, Write };
    Kind kind;
    std::string key;
    // For a write: the id written. For a read: the id observed
    // (kInitialWrite means the key's initial value).
    WriteId write_id;

    bool operator==(const Operation&) const = default;
};

struct Transaction {
    TxnId id = 0;
    SessionId session = 0;
    std::uint32_t seq = 0;  // position within the issuing session
    bool fence = false;
    bool committed = true;
    std::vector<Operation> ops;

    bool operator==(const Transaction&) const = default;

    bool reads_key(const std::string& key) const;
    bool writes_key(const std::string& key) const;
    bool touches_key(const std::string& key) const;
    bool read_only() const;
    bool write_only() const;
    // The read of `key`, if any (at most one per key in a valid txn).
    const Operation* read_of(const std::string& key) const;
    const Operation* write_of(const std::string& key) const;
    std::vector<std::string> written_keys() const;

    // Checks the per-transaction shape rules: at most one read and one
    // write per key, no read after a write of the same key, and fences
    // touch exactly the epoch key. Returns a description on failure.
    std::optional<std::string> check_shape() const;
};

// A batch of committed transactions grouped into client sessions.
struct History {
    std::vector<Transaction> txns;

    bool operator==(const History&) const = default;

    // session -> txn ids ordered by seq_in_session
    std::map<SessionId, std::vector<TxnId>> session_lists() const;
    const Transaction* find(TxnId id) const;
    // Appends, keeping no particular order; callers sort via canonicalize.
    void add(Transaction t) { txns.push_back(std::move(t)); }
    // Orders transactions by (session, seq).
    void canonicalize();
};

// Key of the readfrom / wwpairs indices: a write identified by key + writer.
using KeyWriter = std::pair<std::string, TxnId>;

// The verifier's accumulated state: known precedence graph plus the
// read-from and consecutive-write (RMW) indices.
struct ExtendedHistory {
    // Live transactions, by id.
    std::map<TxnId, Transaction> txns;
    // Known graph adjacency over live txns (WR, RW, CO and pruning edges).
    std::map<TxnId, std::set<TxnId>> out;
    // <key, writer> -> readers of that write.
    std::map<KeyWriter, std::set<TxnId>> readfrom;
    // <key, writer> -> the unique RMW successor. A value of kInitialTxn in
    // the writer slot refers to the abstract initial transaction. After
    // garbage collection the mapped txn may be deleted; the entry is kept
    // as a marker that the write already has a successive write.
    std::map<KeyWriter, TxnId> wwpairs;
    // Live write id -> writer txn.
    std::unordered_map<WriteId, TxnId> writer_of;
    // session -> ordered list of live txns.
    std::map<SessionId, std::vector<TxnId>> sessions;

    // Deleted transactions and their write ids.
    std::unordered_set<TxnId> tombstones;
    std::unordered_set<WriteId> tombstone_writes;

    bool alive(TxnId id) const { return txns.count(id) != 0; }
    void add_edge(TxnId from, TxnId to);
    bool has_edge(TxnId from, TxnId to) const;
    std::size_t edge_count() const;

    // Structural equality of the accumulated state (composition tests).
    bool same_state(const ExtendedHistory& other) const;
};

}  // namespace cobra
