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

#include "cobra/pruner.hpp"

#include <algorithm>

#include "cobra/closure.hpp"

namespace cobra {

namespace {

// A side conflicts when it holds an edge (u, v) with v already reaching
// u. Returns that edge, if any.
const Edge* conflicting_edge(const std::vector<Edge>& side, const DenseGraph& g,
                             const ReachabilityMatrix& r) {
    for (const Edge& ed : side) {
        auto fu = g.index.find(ed.from);
        auto fv = g.index.find(ed.to);
        if (fu == g.index.end() || fv == g.index.end()) continue;
        if (ed.from == ed.to || r.at(fv->second, fu->second)) return &ed;
    }
    return nullptr;
}

// Cycle certificate for a conflicting edge: path to -> ... -> from plus
// the edge from -> to.
std::vector<TxnId> cycle_for(const Edge& ed, const DenseGraph& g) {
    std::vector<int> path = find_path(g.adj, g.index.at(ed.to), g.index.at(ed.from));
    std::vector<TxnId> cyc;
    for (int v : path) cyc.push_back(g.ids[v]);
    if (cyc.empty()) cyc = {ed.to, ed.from};  // self-loop or degenerate
    return cyc;
}

}  // namespace

PruneOutcome prune(std::vector<Constraint>& con, ExtendedHistory& e, int max_iters) {
    PruneOutcome out;
    for (int iter = 0; iter < max_iters; ++iter) {
        out.iterations = iter + 1;
        DenseGraph g = densify(e.out, e.txns);
        auto closure = transitive_closure(g.adj);
        if (std::holds_alternative<std::vector<int>>(closure)) {
            out.status = PruneOutcome::Status::CycleInKnown;
            std::vector<TxnId> cyc;
            for (int v : std::get<std::vector<int>>(closure)) cyc.push_back(g.ids[v]);
            out.cycles.push_back(std::move(cyc));
            return out;
        }
        const auto& reach = std::get<ReachabilityMatrix>(closure);

        bool changed = false;
        std::vector<Constraint> survivors;
        survivors.reserve(con.size());
        for (Constraint& c : con) {
            const Edge* bad_first = conflicting_edge(c.first, g, reach);
            const Edge* bad_second = conflicting_edge(c.second, g, reach);
            if (bad_first && bad_second) {
                out.status = PruneOutcome::Status::BothSidesConflict;
                out.cycles.push_back(cycle_for(*bad_first, g));
                out.cycles.push_back(cycle_for(*bad_second, g));
                out.blamed = c;
                return out;
            }
            if (bad_first || bad_second) {
                const auto& keep = bad_first ? c.second : c.first;
                for (const Edge& ed : keep) e.add_edge(ed.from, ed.to);
                ++out.resolved;
                changed = true;
            } else {
                survivors.push_back(std::move(c));
            }
        }
        con = std::move(survivors);
        if (!changed) break;
    }
    return out;
}

}  // namespace cobra
