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

#include "cobra/closure.hpp"

#include <algorithm>
#include <deque>
#include <queue>

namespace cobra {

DenseGraph densify(const std::map<TxnId, std::set<TxnId>>& out,
                   const std::map<TxnId, Transaction>& txns) {
    DenseGraph g;
    g.ids.reserve(txns.size());
    for (const auto& [id, t] : txns) {
        g.index.emplace(id, static_cast<int>(g.ids.size()));
        g.ids.push_back(id);
    }
    g.adj.resize(g.ids.size());
    for (const auto& [from, succs] : out) {
        auto fit = g.index.find(from);
        if (fit == g.index.end()) continue;
        for (TxnId to : succs) {
            auto tit = g.index.find(to);
            if (tit != g.index.end()) g.adj[fit->second].push_back(tit->second);
        }
    }
    return g;
}

std::optional<std::vector<int>> topo_order(const std::vector<std::vector<int>>& adj,
                                           std::vector<int>* cycle_out) {
    const int n = static_cast<int>(adj.size());
    std::vector<int> indeg(n, 0);
    for (const auto& succs : adj)
        for (int v : succs) ++indeg[v];
    std::vector<int> order;
    order.reserve(n);
    std::deque<int> q;
    for (int v = 0; v < n; ++v)
        if (indeg[v] == 0) q.push_back(v);
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        order.push_back(v);
        for (int w : adj[v])
            if (--indeg[w] == 0) q.push_back(w);
    }
    if (static_cast<int>(order.size()) == n) return order;

    if (cycle_out) {
        // Every remaining vertex (indeg > 0) has a remaining predecessor:
        // its indegree was never decremented to zero. Walking predecessors
        // therefore always stays in the remaining set and must repeat.
        std::vector<int> pred(n, -1);
        for (int v = 0; v < n; ++v) {
            if (indeg[v] == 0) continue;
            for (int w : adj[v])
                if (indeg[w] > 0) pred[w] = v;
        }
        std::vector<int> state(n, 0);
        std::vector<int> stack;
        int v = -1;
        for (int u = 0; u < n && v < 0; ++u)
            if (indeg[u] > 0) v = u;
        while (state[v] != 1) {
            state[v] = 1;
            stack.push_back(v);
            v = pred[v];
        }
        auto it = std::find(stack.begin(), stack.end(), v);
        cycle_out->assign(it, stack.end());
        // Predecessor walk lists the cycle against edge direction.
        std::reverse(cycle_out->begin(), cycle_out->end());
    }
    return std::nullopt;
}

std::variant<ReachabilityMatrix, std::vector<int>> transitive_closure(
    const std::vector<std::vector<int>>& adj) {
    std::vector<int> cycle;
    auto order = topo_order(adj, &cycle);
    if (!order) return cycle;

    const int n = static_cast<int>(adj.size());
    ReachabilityMatrix r(n);
    const std::size_t words = r.words();
    // Reverse topological sweep: successors are final when a row is built,
    // so one pass reaches the fixpoint.
    for (int i = n - 1; i >= 0; --i) {
        int v = (*order)[i];
        std::uint64_t* rv = r.row(v);
        for (int w : adj[v]) {
            r.set(v, w);
            const std::uint64_t* rw = r.row(w);
            for (std::size_t k = 0; k < words; ++k) rv[k] |= rw[k];
        }
    }
    return r;
}

ReachabilityMatrix closure_by_bfs(const std::vector<std::vector<int>>& adj) {
    const int n = static_cast<int>(adj.size());
    ReachabilityMatrix r(n);
    std::vector<int> seen(n, -1);
    for (int s = 0; s < n; ++s) {
        std::queue<int> q;
        q.push(s);
        seen[s] = s;
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (int w : adj[v])
                if (seen[w] != s) {
                    seen[w] = s;
                    r.set(s, w);
                    q.push(w);
                }
        }
    }
    return r;
}

std::vector<int> find_path(const std::vector<std::vector<int>>& adj, int from, int to) {
    const int n = static_cast<int>(adj.size());
    std::vector<int> parent(n, -1);
    std::queue<int> q;
    q.push(from);
    parent[from] = from;
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (int w : adj[v]) {
            if (parent[w] != -1) continue;
            parent[w] = v;
            if (w == to) {
                std::vector<int> path{to};
                while (path.back() != from) path.push_back(parent[path.back()]);
                std::reverse(path.begin(), path.end());
                return path;
            }
            q.push(w);
        }
    }
    return {};
}

std::vector<int> scc_ids(const std::vector<std::vector<int>>& adj, int* num_sccs) {
    const int n = static_cast<int>(adj.size());
    std::vector<int> comp(n, -1), low(n, 0), disc(n, -1), stk;
    std::vector<bool> on_stack(n, false);
    int timer = 0, count = 0;
    // Iterative Tarjan; frame holds (vertex, next child index).
    std::vector<std::pair<int, std::size_t>> frames;
    for (int root = 0; root < n; ++root) {
        if (disc[root] != -1) continue;
        frames.emplace_back(root, 0);
        while (!frames.empty()) {
            auto& [v, ci] = frames.back();
            if (ci == 0) {
                disc[v] = low[v] = timer++;
                stk.push_back(v);
                on_stack[v] = true;
            }
            if (ci < adj[v].size()) {
                int w = adj[v][ci++];
                if (disc[w] == -1) {
                    frames.emplace_back(w, 0);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], disc[w]);
                }
            } else {
                if (low[v] == disc[v]) {
                    while (true) {
                        int w = stk.back();
                        stk.pop_back();
                        on_stack[w] = false;
                        comp[w] = count;
                        if (w == v) break;
                    }
                    ++count;
                }
                int done = v;
                frames.pop_back();
                if (!frames.empty())
                    low[frames.back().first] = std::min(low[frames.back().first], low[done]);
            }
        }
    }
    if (num_sccs) *num_sccs = count;
    return comp;
}

}  // namespace cobra
