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

#include "cobra/graph_builder.hpp"

#include <algorithm>

#include "cobra/closure.hpp"

namespace cobra {

std::string to_string(BuildReject::Reason r) {
    switch (r) {
        case BuildReject::Reason::MultipleSuccessiveWrites: return "multiple-successive-writes";
        case BuildReject::Reason::StaleReadOfDeleted: return "stale-read-of-deleted";
        case BuildReject::Reason::DuplicateTxn: return "duplicate-txn";
        case BuildReject::Reason::BadShape: return "bad-shape";
    }
    return "unknown";
}

std::optional<BuildReject> create_known_graph(ExtendedHistory& acc, const History& frag,
                                              bool session_order) {
    History sorted = frag;
    sorted.canonicalize();

    // First pass: admit nodes and register writes so in-fragment forward
    // reads resolve.
    for (const auto& t : sorted.txns) {
        if (!t.committed) continue;
        if (t.id == kInitialTxn)
            return BuildReject{BuildReject::Reason::BadShape, t.id, "", "txn id 0 is reserved"};
        if (acc.alive(t.id) || acc.tombstones.count(t.id))
            return BuildReject{BuildReject::Reason::DuplicateTxn, t.id, "", "duplicate txn id"};
        if (auto err = t.check_shape())
            return BuildReject{BuildReject::Reason::BadShape, t.id, "", *err};
        acc.txns.emplace(t.id, t);
        acc.out.try_emplace(t.id);
        for (const auto& op : t.ops)
            if (op.kind == Operation::Kind::Write) acc.writer_of[op.write_id] = t.id;
    }

    // Second pass: WR edges, readfrom, RMW successor pairs.
    for (const auto& t : sorted.txns) {
        if (!t.committed) continue;
        for (const auto& op : t.ops) {
            if (op.kind != Operation::Kind::Read) continue;
            TxnId writer = kInitialTxn;
            if (op.write_id != kInitialWrite) {
                if (acc.tombstone_writes.count(op.write_id))
                    return BuildReject{BuildReject::Reason::StaleReadOfDeleted, t.id, op.key,
                                       "read of deleted write " + std::to_string(op.write_id)};
                auto it = acc.writer_of.find(op.write_id);
                if (it == acc.writer_of.end()) throw UnresolvedRead(t.id, op.key, op.write_id);
                writer = it->second;
                acc.add_edge(writer, t.id);
            }
            acc.readfrom[{op.key, writer}].insert(t.id);
            if (t.write_of(op.key) != nullptr) {
                KeyWriter kw{op.key, writer};
                if (acc.wwpairs.count(kw))
                    return BuildReject{BuildReject::Reason::MultipleSuccessiveWrites, t.id,
                                       op.key,
                                       "two successive writes after txn " +
                                           std::to_string(writer)};
                acc.wwpairs.emplace(kw, t.id);
            }
        }
        auto& lst = acc.sessions[t.session];
        lst.push_back(t.id);
    }

    // Session lists stay ordered by issuing position.
    for (auto& [sid, lst] : acc.sessions) {
        std::sort(lst.begin(), lst.end(), [&](TxnId a, TxnId b) {
            return acc.txns.at(a).seq < acc.txns.at(b).seq;
        });
        if (session_order)
            for (std::size_t i = 0; i + 1 < lst.size(); ++i) acc.add_edge(lst[i], lst[i + 1]);
    }
    return std::nullopt;
}

std::optional<std::vector<TxnId>> check_easy_reject(const ExtendedHistory& e) {
    DenseGraph g = densify(e.out, e.txns);
    std::vector<int> cycle;
    if (topo_order(g.adj, &cycle)) return std::nullopt;
    std::vector<TxnId> ids;
    ids.reserve(cycle.size());
    for (int v : cycle) ids.push_back(g.ids[v]);
    return ids;
}

}  // namespace cobra
