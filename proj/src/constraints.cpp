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

#include "cobra/constraints.hpp"

#include <algorithm>
#include <unordered_map>

namespace cobra {

namespace {

// Live readers of <key, writer>, excluding `exclude`.
std::vector<TxnId> live_readers(const ExtendedHistory& e, const std::string& key, TxnId writer,
                                TxnId exclude) {
    std::vector<TxnId> out;
    auto it = e.readfrom.find({key, writer});
    if (it == e.readfrom.end()) return out;
    for (TxnId r : it->second)
        if (r != exclude && e.alive(r)) out.push_back(r);
    return out;
}

std::vector<Edge> side_edges(const ExtendedHistory& e, const Chain& from, const Chain& to) {
    std::vector<Edge> edges;
    for (TxnId r : live_readers(e, from.key, from.tail(), to.head()))
        edges.push_back({r, to.head()});
    if (edges.empty()) edges.push_back({from.tail(), to.head()});
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

}  // namespace

std::map<std::string, std::vector<Chain>> combine_writes(
    std::map<std::string, std::vector<Chain>> chains, const ExtendedHistory& e) {
    for (auto& [key, list] : chains) {
        // tail/head txn -> position in list; spliced-away entries go empty.
        std::unordered_map<TxnId, std::size_t> by_tail, by_head;
        for (std::size_t i = 0; i < list.size(); ++i) {
            by_tail[list[i].tail()] = i;
            by_head[list[i].head()] = i;
        }
        for (const auto& [kw, succ] : e.wwpairs) {
            if (kw.first != key) continue;
            if (!e.alive(succ)) continue;  // marker for a deleted successor
            auto t1 = by_tail.find(kw.second);
            auto t2 = by_head.find(succ);
            if (t1 == by_tail.end() || t2 == by_head.end())
                throw InternalInvariantViolation("RMW pair does not join chain tail to head on '" +
                                                 key + "'");
            std::size_t a = t1->second, b = t2->second;
            if (a == b) throw InternalInvariantViolation("RMW pair closes a chain on '" + key + "'");
            auto& ca = list[a].txns;
            auto& cb = list[b].txns;
            ca.insert(ca.end(), cb.begin(), cb.end());
            by_tail[ca.back()] = a;
            by_head.erase(cb.front());
            cb.clear();
        }
        list.erase(std::remove_if(list.begin(), list.end(),
                                  [](const Chain& c) { return c.txns.empty(); }),
                   list.end());
        std::sort(list.begin(), list.end(),
                  [](const Chain& a, const Chain& b) { return a.head() < b.head(); });
    }
    return chains;
}

void infer_rw_edges(const std::map<std::string, std::vector<Chain>>& chains, ExtendedHistory& e) {
    for (const auto& [key, list] : chains) {
        for (const Chain& c : list) {
            for (std::size_t i = 0; i + 1 < c.txns.size(); ++i) {
                TxnId next = c.txns[i + 1];
                for (TxnId r : live_readers(e, key, c.txns[i], next)) e.add_edge(r, next);
            }
        }
    }
}

Constraint coalesce(const Chain& ci, const Chain& cj, const ExtendedHistory& e) {
    return Constraint{side_edges(e, ci, cj), side_edges(e, cj, ci)};
}

ConstraintGenResult gen_constraints(ExtendedHistory& e) {
    ConstraintGenResult res;
    // One singleton chain per live writer.
    for (const auto& [id, t] : e.txns)
        for (const auto& key : t.written_keys()) res.chains[key].push_back(Chain{key, {id}});
    // An initial-txn chain per key observed at its initial value.
    std::set<std::string> initial_keys;
    for (const auto& [kw, readers] : e.readfrom)
        if (kw.second == kInitialTxn && !readers.empty()) initial_keys.insert(kw.first);
    for (const auto& [kw, succ] : e.wwpairs)
        if (kw.second == kInitialTxn) initial_keys.insert(kw.first);
    for (const auto& key : initial_keys)
        res.chains[key].push_back(Chain{key, {kInitialTxn}});

    res.chains = combine_writes(std::move(res.chains), e);
    infer_rw_edges(res.chains, e);

    for (const auto& [key, list] : res.chains) {
        for (std::size_t i = 0; i < list.size(); ++i) {
            for (std::size_t j = i + 1; j < list.size(); ++j) {
                const Chain& ci = list[i];
                const Chain& cj = list[j];
                if (ci.head() == kInitialTxn) {
                    // The initial chain precedes every other chain; its
                    // side of the constraint is forced into the graph.
                    for (const Edge& ed : side_edges(e, ci, cj))
                        if (ed.from != kInitialTxn) e.add_edge(ed.from, ed.to);
                    continue;
                }
                res.constraints.push_back(coalesce(ci, cj, e));
            }
        }
    }
    return res;
}

}  // namespace cobra
