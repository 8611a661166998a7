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

#include "cobra/solver.hpp"

#include <algorithm>
#include <chrono>
#include <istream>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

namespace cobra {

namespace {

// Directed graph kept topologically ordered across edge insertions
// (Pearce-Kelly); insertions are undoable via a trail.
class OnlineTopo {
public:
    explicit OnlineTopo(int n)
        : adj_(n), radj_(n), pos_(n), vert_(n), visited_(n, 0), parent_(n, -1) {
        std::iota(pos_.begin(), pos_.end(), 0);
        std::iota(vert_.begin(), vert_.end(), 0);
    }

    std::size_t trail_size() const { return trail_.size(); }

    void rollback(std::size_t mark) {
        while (trail_.size() > mark) {
            Op op = trail_.back();
            trail_.pop_back();
            if (op.kind == Op::Edge) {
                int v = adj_[op.a].back();
                adj_[op.a].pop_back();
                radj_[v].pop_back();
            } else {
                pos_[op.a] = op.b;
                vert_[op.b] = op.a;
            }
        }
    }

    // Adds u -> v, restoring a valid order. On a would-be cycle returns
    // false and leaves the graph unchanged; cycle_out lists vertices
    // v -> ... -> u (the closing edge u -> v is the rejected one).
    bool add_edge(int u, int v, std::vector<int>* cycle_out) {
        if (u == v) {
            if (cycle_out) *cycle_out = {u};
            return false;
        }
        if (pos_[u] > pos_[v]) {
            // Forward discovery from v bounded by pos[u].
            const int ub = pos_[u];
            scratch_f_.clear();
            parent_[v] = -2;
            visit_stack_.assign(1, v);
            mark_visited(v);
            bool cycle = false;
            while (!visit_stack_.empty()) {
                int x = visit_stack_.back();
                visit_stack_.pop_back();
                scratch_f_.push_back(x);
                if (x == u) {
                    cycle = true;
                    break;
                }
                for (int w : adj_[x]) {
                    if (pos_[w] > ub || visited(w)) continue;
                    mark_visited(w);
                    parent_[w] = x;
                    visit_stack_.push_back(w);
                }
            }
            if (cycle) {
                if (cycle_out) {
                    cycle_out->clear();
                    std::vector<int> rev;
                    for (int x = u; x != -2; x = parent_[x]) rev.push_back(x);
                    cycle_out->assign(rev.rbegin(), rev.rend());
                }
                clear_visited();
                return false;
            }
            std::vector<int> delta_f;
            delta_f.swap(scratch_f_);
            clear_visited();

            // Backward discovery from u bounded by pos[v].
            const int lb = pos_[v];
            std::vector<int> delta_b;
            visit_stack_.assign(1, u);
            mark_visited(u);
            while (!visit_stack_.empty()) {
                int x = visit_stack_.back();
                visit_stack_.pop_back();
                delta_b.push_back(x);
                for (int w : radj_[x]) {
                    if (pos_[w] < lb || visited(w)) continue;
                    mark_visited(w);
                    visit_stack_.push_back(w);
                }
            }
            clear_visited();

            auto by_pos = [&](int a, int b) { return pos_[a] < pos_[b]; };
            std::sort(delta_f.begin(), delta_f.end(), by_pos);
            std::sort(delta_b.begin(), delta_b.end(), by_pos);
            std::vector<int> slots;
            slots.reserve(delta_f.size() + delta_b.size());
            for (int x : delta_b) slots.push_back(pos_[x]);
            for (int x : delta_f) slots.push_back(pos_[x]);
            std::sort(slots.begin(), slots.end());
            std::size_t si = 0;
            for (int x : delta_b) place(x, slots[si++]);
            for (int x : delta_f) place(x, slots[si++]);
        }
        adj_[u].push_back(v);
        radj_[v].push_back(u);
        trail_.push_back({Op::Edge, u, 0});
        return true;
    }

    int pos(int v) const { return pos_[v]; }

    const std::vector<std::vector<int>>& adj() const { return adj_; }

private:
    struct Op {
        enum Kind { Edge, Pos } kind;
        int a, b;
    };

    void place(int v, int p) {
        if (pos_[v] == p) return;
        trail_.push_back({Op::Pos, v, pos_[v]});
        pos_[v] = p;
        vert_[p] = v;
    }

    void mark_visited(int v) {
        visited_[v] = 1;
        touched_.push_back(v);
    }
    bool visited(int v) const { return visited_[v]; }
    void clear_visited() {
        for (int v : touched_) visited_[v] = 0;
        touched_.clear();
    }

    std::vector<std::vector<int>> adj_, radj_;
    std::vector<int> pos_, vert_;
    std::vector<Op> trail_;
    std::vector<int> visit_stack_, scratch_f_, touched_;
    std::vector<char> visited_;
    std::vector<int> parent_;
};

struct Frame {
    std::size_t choice;    // index into inst.choices
    int tried = 0;         // how many sides attempted
    int side_order[2];     // preference order, 0 = a, 1 = b
    std::size_t mark = 0;  // trail mark before this decision
    std::vector<int> branch_cycles[2];
};

}  // namespace

SolverInstance encode(const ExtendedHistory& e, const std::vector<Constraint>& con) {
    SolverInstance inst;
    std::map<TxnId, int> index;
    for (const auto& [id, t] : e.txns) {
        index.emplace(id, inst.n++);
        inst.ids.push_back(id);
    }
    for (const auto& [from, succs] : e.out) {
        auto fi = index.find(from);
        if (fi == index.end()) continue;
        for (TxnId to : succs) {
            auto ti = index.find(to);
            if (ti != index.end()) inst.fixed_edges.emplace_back(fi->second, ti->second);
        }
    }
    for (const Constraint& c : con) {
        SolverInstance::Choice ch;
        for (const Edge& ed : c.first) ch.a.emplace_back(index.at(ed.from), index.at(ed.to));
        for (const Edge& ed : c.second) ch.b.emplace_back(index.at(ed.from), index.at(ed.to));
        inst.choices.push_back(std::move(ch));
    }
    return inst;
}

std::string export_instance(const SolverInstance& inst) {
    std::ostringstream os;
    os << "n " << inst.n << '\n';
    for (auto [i, j] : inst.fixed_edges) os << "e " << i << ' ' << j << '\n';
    for (const auto& ch : inst.choices) {
        os << "c " << ch.a.size() << ' ' << ch.b.size() << '\n';
        for (auto [i, j] : ch.a) os << "a " << i << ' ' << j << '\n';
        for (auto [i, j] : ch.b) os << "b " << i << ' ' << j << '\n';
    }
    return os.str();
}

SolverInstance parse_instance(std::istream& in) {
    SolverInstance inst;
    std::string tag;
    if (!(in >> tag) || tag != "n" || !(in >> inst.n))
        throw std::runtime_error("instance: expected 'n <vertices>'");
    inst.ids.resize(inst.n);
    std::iota(inst.ids.begin(), inst.ids.end(), TxnId{0});
    while (in >> tag) {
        if (tag == "e") {
            int i, j;
            if (!(in >> i >> j)) throw std::runtime_error("instance: bad edge line");
            inst.fixed_edges.emplace_back(i, j);
        } else if (tag == "c") {
            std::size_t na, nb;
            if (!(in >> na >> nb)) throw std::runtime_error("instance: bad choice line");
            SolverInstance::Choice ch;
            for (std::size_t k = 0; k < na + nb; ++k) {
                std::string side;
                int i, j;
                if (!(in >> side >> i >> j) || (side != "a" && side != "b"))
                    throw std::runtime_error("instance: bad side line");
                (side == "a" ? ch.a : ch.b).emplace_back(i, j);
            }
            if (ch.a.size() != na || ch.b.size() != nb)
                throw std::runtime_error("instance: side count mismatch");
            inst.choices.push_back(std::move(ch));
        } else {
            throw std::runtime_error("instance: unknown tag '" + tag + "'");
        }
    }
    return inst;
}

SolverInstance parse_instance(const std::string& text) {
    std::istringstream iss(text);
    return parse_instance(iss);
}

SolveResult solve(const SolverInstance& inst, double budget_secs) {
    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    auto over_budget = [&] {
        return budget_secs > 0 &&
               std::chrono::duration<double>(Clock::now() - start).count() > budget_secs;
    };

    SolveResult res;
    OnlineTopo topo(inst.n);
    std::vector<int> cycle;
    for (auto [u, v] : inst.fixed_edges) {
        if (!topo.add_edge(u, v, &cycle)) {
            res.status = SolveResult::Status::Reject;
            res.cycles.push_back(cycle);
            return res;
        }
    }

    // Decision order: fewest total edges first, lowest endpoint breaking
    // ties; deterministic.
    std::vector<std::size_t> order(inst.choices.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto choice_key = [&](std::size_t i) {
        const auto& ch = inst.choices[i];
        int lo = inst.n;
        for (auto [u, v] : ch.a) lo = std::min({lo, u, v});
        for (auto [u, v] : ch.b) lo = std::min({lo, u, v});
        return std::make_tuple(ch.a.size() + ch.b.size(), lo, i);
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return choice_key(x) < choice_key(y); });

    std::vector<int> assignment(inst.choices.size(), -1);
    std::vector<Frame> frames;
    frames.reserve(order.size());
    std::vector<int> last_cycle;

    auto make_frame = [&](std::size_t depth) {
        Frame f;
        f.choice = order[depth];
        f.mark = topo.trail_size();
        const auto& ch = inst.choices[f.choice];
        // Prefer the side already consistent with the current order.
        auto violations = [&](const std::vector<std::pair<int, int>>& side) {
            int n = 0;
            for (auto [u, v] : side)
                if (topo.pos(u) > topo.pos(v)) ++n;
            return n;
        };
        bool b_first = violations(ch.b) < violations(ch.a);
        f.side_order[0] = b_first ? 1 : 0;
        f.side_order[1] = b_first ? 0 : 1;
        return f;
    };

    if (!inst.choices.empty()) frames.push_back(make_frame(0));
    while (!frames.empty()) {
        Frame& f = frames.back();
        if (f.tried == 2) {
            // Both sides exhausted; back up chronologically.
            if (frames.size() == 1) {
                res.status = SolveResult::Status::Reject;
                for (int s = 0; s < 2; ++s)
                    if (!f.branch_cycles[s].empty()) res.cycles.push_back(f.branch_cycles[s]);
                if (res.cycles.empty() && !last_cycle.empty()) res.cycles.push_back(last_cycle);
                std::set<std::size_t> blamed{f.choice};
                std::set<std::pair<int, int>> fixed(inst.fixed_edges.begin(),
                                                    inst.fixed_edges.end());
                for (const auto& cyc : res.cycles) {
                    for (std::size_t k = 0; k < cyc.size(); ++k) {
                        std::pair<int, int> ed{cyc[k], cyc[(k + 1) % cyc.size()]};
                        if (fixed.count(ed)) continue;
                        for (std::size_t ci = 0; ci < inst.choices.size(); ++ci) {
                            const auto& ch = inst.choices[ci];
                            if (std::find(ch.a.begin(), ch.a.end(), ed) != ch.a.end() ||
                                std::find(ch.b.begin(), ch.b.end(), ed) != ch.b.end())
                                blamed.insert(ci);
                        }
                    }
                }
                res.blamed.assign(blamed.begin(), blamed.end());
                return res;
            }
            frames.pop_back();
            Frame& parent = frames.back();
            topo.rollback(parent.mark);
            assignment[parent.choice] = -1;
            // The parent's chosen side failed by subtree exhaustion; pass
            // the most recent conflict up as its witness.
            parent.branch_cycles[parent.side_order[parent.tried - 1]] = last_cycle;
            continue;
        }

        int side = f.side_order[f.tried++];
        const auto& edges = side == 0 ? inst.choices[f.choice].a : inst.choices[f.choice].b;
        std::size_t mark = topo.trail_size();
        bool ok = true;
        for (auto [u, v] : edges) {
            if (!topo.add_edge(u, v, &cycle)) {
                ok = false;
                break;
            }
        }
        if (!ok) {
            topo.rollback(mark);
            ++res.conflicts;
            f.branch_cycles[side] = cycle;
            last_cycle = cycle;
            if (over_budget()) {
                res.status = SolveResult::Status::TimeBudgetExceeded;
                return res;
            }
            continue;
        }
        assignment[f.choice] = side;
        if (frames.size() == order.size()) break;  // all choices assigned
        frames.push_back(make_frame(frames.size()));
    }

    res.status = SolveResult::Status::Accept;
    res.assignment = assignment;
    return res;
}

std::vector<TxnId> extract_schedule(const SolverInstance& inst,
                                    const std::vector<int>& assignment) {
    std::vector<std::vector<int>> adj(inst.n);
    std::vector<int> indeg(inst.n, 0);
    auto add = [&](int u, int v) {
        adj[u].push_back(v);
        ++indeg[v];
    };
    for (auto [u, v] : inst.fixed_edges) add(u, v);
    for (std::size_t i = 0; i < inst.choices.size(); ++i) {
        const auto& side = assignment[i] == 0 ? inst.choices[i].a : inst.choices[i].b;
        for (auto [u, v] : side) add(u, v);
    }
    // Dense indices ascend with txn id, so a min-heap gives the smallest
    // ready txn first.
    std::priority_queue<int, std::vector<int>, std::greater<>> heap;
    for (int v = 0; v < inst.n; ++v)
        if (indeg[v] == 0) heap.push(v);
    std::vector<TxnId> schedule;
    schedule.reserve(inst.n);
    while (!heap.empty()) {
        int v = heap.top();
        heap.pop();
        schedule.push_back(inst.ids[v]);
        for (int w : adj[v])
            if (--indeg[w] == 0) heap.push(w);
    }
    return schedule;
}

bool validate_certificate(const SolverInstance& inst, const std::vector<int>& cycle,
                          const std::vector<std::size_t>& blamed) {
    if (cycle.empty()) return false;
    std::set<std::pair<int, int>> allowed(inst.fixed_edges.begin(), inst.fixed_edges.end());
    for (std::size_t ci : blamed) {
        if (ci >= inst.choices.size()) return false;
        for (auto ed : inst.choices[ci].a) allowed.insert(ed);
        for (auto ed : inst.choices[ci].b) allowed.insert(ed);
    }
    for (std::size_t k = 0; k < cycle.size(); ++k) {
        if (!allowed.count({cycle[k], cycle[(k + 1) % cycle.size()]})) return false;
    }
    return true;
}

}  // namespace cobra
