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
#include <unordered_map>
#include <variant>
#include <vector>

#include "cobra/history.hpp"

namespace cobra {

// Dense-index view of a txn graph. Index order is ascending txn id, so
// densification is deterministic.
struct DenseGraph {
    std::vector<TxnId> ids;                   // index -> txn id
    std::unordered_map<TxnId, int> index;     // txn id -> index
    std::vector<std::vector<int>> adj;

    int n() const { return static_cast<int>(ids.size()); }
    void add_edge(int u, int v) { adj[u].push_back(v); }
};

DenseGraph densify(const std::map<TxnId, std::set<TxnId>>& out,
                   const std::map<TxnId, Transaction>& txns);

// Bit-packed all-pairs reachability. Entry (i,j) is 1 iff i != j and a
// path i -> ... -> j exists.
class ReachabilityMatrix {
public:
    ReachabilityMatrix() = default;
    explicit ReachabilityMatrix(int n)
        : n_(n), words_((static_cast<std::size_t>(n) + 63) / 64), bits_(words_ * n, 0) {}

    int size() const { return n_; }
    bool at(int i, int j) const {
        return (bits_[static_cast<std::size_t>(i) * words_ + j / 64] >> (j % 64)) & 1ULL;
    }
    void set(int i, int j) {
        bits_[static_cast<std::size_t>(i) * words_ + j / 64] |= 1ULL << (j % 64);
    }
    std::uint64_t* row(int i) { return bits_.data() + static_cast<std::size_t>(i) * words_; }
    const std::uint64_t* row(int i) const {
        return bits_.data() + static_cast<std::size_t>(i) * words_;
    }
    std::size_t words() const { return words_; }

private:
    int n_ = 0;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> bits_;
};

// Kahn topological sort. Returns the order, or nullopt with a witness
// cycle (v0, v1, ..., vk) meaning v0 -> v1 -> ... -> vk -> v0.
std::optional<std::vector<int>> topo_order(const std::vector<std::vector<int>>& adj,
                                           std::vector<int>* cycle_out = nullptr);

// Exact reachability via a bitset sweep in reverse topological order,
// or the witness cycle when the graph is cyclic.
std::variant<ReachabilityMatrix, std::vector<int>> transitive_closure(
    const std::vector<std::vector<int>>& adj);

// Reference closure by per-node BFS (test oracle for the bitset sweep).
ReachabilityMatrix closure_by_bfs(const std::vector<std::vector<int>>& adj);

// Shortest path from -> to as a vertex list (inclusive); empty if none.
std::vector<int> find_path(const std::vector<std::vector<int>>& adj, int from, int to);

// Tarjan strongly connected components; returns component id per vertex,
// ids are arbitrary but deterministic.
std::vector<int> scc_ids(const std::vector<std::vector<int>>& adj, int* num_sccs = nullptr);

}  // namespace cobra
