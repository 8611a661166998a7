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

#include "cobra/oracle.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "cobra/closure.hpp"

namespace cobra {

namespace {

// Applies one txn to the store; returns the undo list, or nullopt when
// some read does not see the store's current value.
std::optional<std::vector<std::pair<std::string, WriteId>>> apply(
    const Transaction& t, std::map<std::string, WriteId>& store) {
    std::vector<std::pair<std::string, WriteId>> undo;
    for (const auto& op : t.ops) {
        if (op.kind == Operation::Kind::Read) {
            auto it = store.find(op.key);
            WriteId cur = it == store.end() ? kInitialWrite : it->second;
            if (cur != op.write_id) {
                for (auto it2 = undo.rbegin(); it2 != undo.rend(); ++it2)
                    store[it2->first] = it2->second;
                return std::nullopt;
            }
        } else {
            auto it = store.find(op.key);
            undo.emplace_back(op.key, it == store.end() ? kInitialWrite : it->second);
            store[op.key] = op.write_id;
        }
    }
    return undo;
}

struct Search {
    const std::vector<const Transaction*>& txns;
    bool respect_sessions;
    std::map<std::string, WriteId> store;
    std::vector<char> used;
    // per session: ordered indices and how many are placed
    std::map<SessionId, std::vector<std::size_t>> session_idx;
    std::map<SessionId, std::size_t> session_done;

    bool dfs(std::size_t placed) {
        if (placed == txns.size()) return true;
        for (std::size_t i = 0; i < txns.size(); ++i) {
            if (used[i]) continue;
            if (respect_sessions) {
                const auto& order = session_idx.at(txns[i]->session);
                if (order[session_done.at(txns[i]->session)] != i) continue;
            }
            auto undo = apply(*txns[i], store);
            if (!undo) continue;
            used[i] = 1;
            if (respect_sessions) ++session_done[txns[i]->session];
            if (dfs(placed + 1)) return true;
            if (respect_sessions) --session_done[txns[i]->session];
            used[i] = 0;
            for (auto it = undo->rbegin(); it != undo->rend(); ++it) store[it->first] = it->second;
        }
        return false;
    }
};

}  // namespace

bool replay(const History& h, const std::vector<TxnId>& schedule) {
    if (schedule.size() != h.txns.size()) return false;
    std::set<TxnId> ids;
    for (TxnId id : schedule) ids.insert(id);
    std::map<std::string, WriteId> store;
    for (TxnId id : schedule) {
        const Transaction* t = h.find(id);
        if (!t) return false;
        if (!apply(*t, store)) return false;
    }
    return ids.size() == h.txns.size();
}

bool oracle_serializable(const History& h, bool respect_sessions, std::size_t max_txns) {
    if (h.txns.size() > max_txns)
        throw BoundExceeded("history of " + std::to_string(h.txns.size()) +
                            " txns exceeds oracle bound " + std::to_string(max_txns));
    std::vector<const Transaction*> txns;
    for (const auto& t : h.txns)
        if (t.committed) txns.push_back(&t);

    Search s{txns, respect_sessions, {}, std::vector<char>(txns.size(), 0), {}, {}};
    if (respect_sessions) {
        for (std::size_t i = 0; i < txns.size(); ++i) s.session_idx[txns[i]->session].push_back(i);
        for (auto& [sid, idxs] : s.session_idx) {
            std::sort(idxs.begin(), idxs.end(), [&](std::size_t a, std::size_t b) {
                return txns[a]->seq < txns[b]->seq;
            });
            idxs.push_back(std::numeric_limits<std::size_t>::max());  // sentinel for done==size
            s.session_done[sid] = 0;
        }
    }
    return s.dfs(0);
}

std::size_t polygraph_constraint_count(const History& h) {
    std::map<std::string, std::set<TxnId>> writers;
    for (const auto& t : h.txns)
        for (const auto& k : t.written_keys()) writers[k].insert(t.id);
    std::size_t count = 0;
    for (const auto& t : h.txns) {
        for (const auto& op : t.ops) {
            if (op.kind != Operation::Kind::Read) continue;
            auto it = writers.find(op.key);
            if (it == writers.end()) continue;
            std::size_t q = it->second.size();
            // Writers other than the one read and the reader itself.
            std::size_t skip = 0;
            if (op.write_id != kInitialWrite) ++skip;  // the source write
            if (t.writes_key(op.key)) ++skip;          // the reader's own write
            count += q - skip;
        }
    }
    return count;
}

bool brute_force_polygraph(const History& h, std::size_t max_constraints) {
    // Vertices: dense index per txn plus index 0 for the initial txn.
    std::vector<TxnId> ids{kInitialTxn};
    std::map<TxnId, int> index{{kInitialTxn, 0}};
    std::map<WriteId, TxnId> writer_of;
    std::map<std::string, std::vector<TxnId>> writers;
    for (const auto& t : h.txns) {
        index.emplace(t.id, static_cast<int>(ids.size()));
        ids.push_back(t.id);
        for (const auto& op : t.ops)
            if (op.kind == Operation::Kind::Write) {
                writer_of[op.write_id] = t.id;
                writers[op.key].push_back(t.id);
            }
    }
    const int n = static_cast<int>(ids.size());
    std::vector<std::pair<int, int>> known;
    for (int v = 1; v < n; ++v) known.emplace_back(0, v);

    // Bipath constraints: for Ti -wr-> Tj on key k and another writer
    // Tk of k, either Tj precedes Tk or Tk precedes Ti.
    std::vector<std::pair<std::pair<int, int>, std::pair<int, int>>> cons;
    for (const auto& t : h.txns) {
        for (const auto& op : t.ops) {
            if (op.kind != Operation::Kind::Read) continue;
            TxnId src = kInitialTxn;
            if (op.write_id != kInitialWrite) {
                auto w = writer_of.find(op.write_id);
                if (w == writer_of.end()) return false;  // incomplete history
                src = w->second;
                known.emplace_back(index.at(src), index.at(t.id));
            }
            for (TxnId other : writers[op.key]) {
                if (other == src || other == t.id) continue;
                cons.push_back({{index.at(t.id), index.at(other)},
                                {index.at(other), index.at(src)}});
            }
        }
    }
    if (cons.size() > max_constraints)
        throw BoundExceeded("polygraph with " + std::to_string(cons.size()) +
                            " constraints exceeds bound " + std::to_string(max_constraints));

    for (std::uint64_t mask = 0; mask < (1ULL << cons.size()); ++mask) {
        std::vector<std::vector<int>> adj(n);
        for (auto [u, v] : known) adj[u].push_back(v);
        for (std::size_t c = 0; c < cons.size(); ++c) {
            auto [u, v] = (mask >> c) & 1 ? cons[c].second : cons[c].first;
            adj[u].push_back(v);
        }
        if (topo_order(adj)) return true;
    }
    return false;
}

}  // namespace cobra
