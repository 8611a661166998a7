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

#include "cobra/history.hpp"

#include <algorithm>

namespace cobra {

bool Transaction::reads_key(const std::string& key) const {
    return read_of(key) != nullptr;
}

bool Transaction::writes_key(const std::string& key) const {
    return write_of(key) != nullptr;
}

bool Transaction::touches_key(const std::string& key) const {
    return reads_key(key) || writes_key(key);
}

bool Transaction::read_only() const {
    return std::all_of(ops.begin(), ops.end(), [](const Operation& op) {
        return op.kind == Operation::Kind::Read;
    });
}

bool Transaction::write_only() const {
    return std::all_of(ops.begin(), ops.end(), [](const Operation& op) {
        return op.kind == Operation::Kind::Write;
    });
}

const Operation* Transaction::read_of(const std::string& key) const {
    for (const auto& op : ops)
        if (op.kind == Operation::Kind::Read && op.key == key) return &op;
    return nullptr;
}

const Operation* Transaction::write_of(const std::string& key) const {
    for (const auto& op : ops)
        if (op.kind == Operation::Kind::Write && op.key == key) return &op;
    return nullptr;
}

std::vector<std::string> Transaction::written_keys() const {
    std::vector<std::string> keys;
    for (const auto& op : ops)
        if (op.kind == Operation::Kind::Write) keys.push_back(op.key);
    return keys;
}

std::optional<std::string> Transaction::check_shape() const {
    std::set<std::string> read_keys, written;
    for (const auto& op : ops) {
        if (op.kind == Operation::Kind::Read) {
            if (!read_keys.insert(op.key).second)
                return "transaction reads key '" + op.key + "' twice";
            if (written.count(op.key))
                return "transaction reads key '" + op.key + "' after writing it";
        } else {
            if (!written.insert(op.key).second)
                return "transaction writes key '" + op.key + "' twice";
            if (op.write_id == kInitialWrite)
                return "write id 0 is reserved for the initial value";
        }
    }
    if (fence) {
        for (const auto& op : ops)
            if (op.key != kEpochKey)
                return "fence transaction touches key '" + op.key + "'";
        if (ops.empty()) return "fence transaction has no operations";
    }
    return std::nullopt;
}

std::map<SessionId, std::vector<TxnId>> History::session_lists() const {
    std::map<SessionId, std::vector<std::pair<std::uint32_t, TxnId>>> tmp;
    for (const auto& t : txns) tmp[t.session].emplace_back(t.seq, t.id);
    std::map<SessionId, std::vector<TxnId>> out;
    for (auto& [sid, v] : tmp) {
        std::sort(v.begin(), v.end());
        auto& lst = out[sid];
        lst.reserve(v.size());
        for (auto& [seq, id] : v) lst.push_back(id);
    }
    return out;
}

const Transaction* History::find(TxnId id) const {
    for (const auto& t : txns)
        if (t.id == id) return &t;
    return nullptr;
}

void History::canonicalize() {
    std::sort(txns.begin(), txns.end(), [](const Transaction& a, const Transaction& b) {
        if (a.session != b.session) return a.session < b.session;
        if (a.seq != b.seq) return a.seq < b.seq;
        return a.id < b.id;
    });
}

void ExtendedHistory::add_edge(TxnId from, TxnId to) {
    if (from == to) return;
    out[from].insert(to);
}

bool ExtendedHistory::has_edge(TxnId from, TxnId to) const {
    auto it = out.find(from);
    return it != out.end() && it->second.count(to) != 0;
}

std::size_t ExtendedHistory::edge_count() const {
    std::size_t n = 0;
    for (const auto& [v, succs] : out) n += succs.size();
    return n;
}

bool ExtendedHistory::same_state(const ExtendedHistory& other) const {
    return txns == other.txns && out == other.out && readfrom == other.readfrom &&
           wwpairs == other.wwpairs && sessions == other.sessions;
}

}  // namespace cobra
