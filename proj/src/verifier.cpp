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

#include "cobra/verifier.hpp"

#include <fstream>
#include <set>

#include "cobra/closure.hpp"
#include "cobra/graph_builder.hpp"
#include "cobra/pruner.hpp"

namespace cobra {

namespace {

std::size_t pairs(std::size_t n) { return n * (n - 1) / 2; }

void fill_chain_stats(const ConstraintGenResult& gen, const ExtendedHistory& e,
                      VerifyStats& stats) {
    std::map<std::string, std::size_t> writers;
    for (const auto& [id, t] : e.txns)
        for (const auto& k : t.written_keys()) ++writers[k];
    for (const auto& [k, n] : writers) stats.constraints_before_combine += pairs(n);
    for (const auto& [k, list] : gen.chains) {
        std::size_t real = 0;
        for (const auto& c : list)
            if (c.head() != kInitialTxn || c.txns.size() > 1) ++real;
        if (real) ++stats.chains_per_key_histogram[real];
    }
}

}  // namespace

VerifyResult encode_and_solve(ExtendedHistory& e, const VerifyOptions& opts,
                              std::vector<Constraint>* con_out) {
    VerifyResult r;
    r.stats.txns = e.txns.size();
    r.stats.live_set = e.txns.size();

    // A cyclic known graph rejects before constraint generation; write
    // combining assumes the read-from pairs themselves are acyclic.
    {
        DenseGraph g = densify(e.out, e.txns);
        std::vector<int> cyc;
        if (!topo_order(g.adj, &cyc)) {
            r.status = VerifyResult::Status::Reject;
            r.reason = "known-cycle";
            std::vector<TxnId> ids;
            for (int v : cyc) ids.push_back(g.ids[v]);
            r.cycles.push_back(std::move(ids));
            r.stats.known_edges = e.edge_count();
            return r;
        }
    }

    ConstraintGenResult gen = gen_constraints(e);
    fill_chain_stats(gen, e, r.stats);
    r.stats.constraints_after_combine = gen.constraints.size();
    r.stats.constraints_after_coalesce = gen.constraints.size();

    std::vector<Constraint> con = std::move(gen.constraints);
    if (opts.prune) {
        PruneOutcome po = prune(con, e, opts.max_prune_iters);
        if (po.status == PruneOutcome::Status::CycleInKnown) {
            r.status = VerifyResult::Status::Reject;
            r.reason = "known-cycle";
            r.cycles = po.cycles;
            r.stats.known_edges = e.edge_count();
            return r;
        }
        if (po.status == PruneOutcome::Status::BothSidesConflict) {
            r.status = VerifyResult::Status::Reject;
            r.reason = "constraint-conflict";
            r.cycles = po.cycles;
            if (po.blamed) r.blamed.push_back(*po.blamed);
            r.stats.known_edges = e.edge_count();
            return r;
        }
    }
    r.stats.constraints_after_prune = con.size();
    r.stats.known_edges = e.edge_count();
    if (con_out) *con_out = con;

    SolverInstance inst = encode(e, con);
    if (!opts.export_instance_path.empty()) {
        std::ofstream out(opts.export_instance_path);
        out << export_instance(inst);
    }
    SolveResult sr = solve(inst, opts.time_budget_secs);
    switch (sr.status) {
        case SolveResult::Status::Accept:
            r.status = VerifyResult::Status::Accept;
            r.schedule = extract_schedule(inst, sr.assignment);
            break;
        case SolveResult::Status::TimeBudgetExceeded:
            r.status = VerifyResult::Status::TimeBudgetExceeded;
            r.reason = "time-budget-exceeded";
            break;
        case SolveResult::Status::Reject:
            r.status = VerifyResult::Status::Reject;
            r.reason = sr.blamed.empty() ? "known-cycle" : "unsatisfiable-constraints";
            for (const auto& cyc : sr.cycles) {
                std::vector<TxnId> ids;
                for (int v : cyc) ids.push_back(inst.ids[v]);
                r.cycles.push_back(std::move(ids));
            }
            for (std::size_t ci : sr.blamed) r.blamed.push_back(con[ci]);
            break;
    }
    return r;
}

bool validate_cycles(const VerifyResult& r, const ExtendedHistory& e) {
    std::set<std::pair<TxnId, TxnId>> allowed;
    for (const auto& [from, succs] : e.out)
        for (TxnId to : succs) allowed.emplace(from, to);
    for (const Constraint& c : r.blamed) {
        for (const Edge& ed : c.first) allowed.emplace(ed.from, ed.to);
        for (const Edge& ed : c.second) allowed.emplace(ed.from, ed.to);
    }
    if (r.cycles.empty()) return false;
    for (const auto& cyc : r.cycles) {
        if (cyc.empty()) return false;
        if (cyc.size() == 1) return false;  // self-loops never arise
        for (std::size_t k = 0; k < cyc.size(); ++k)
            if (!allowed.count({cyc[k], cyc[(k + 1) % cyc.size()]})) return false;
    }
    return true;
}

VerifyResult verify(const History& h, const VerifyOptions& opts) {
    VerifyResult r;
    ExtendedHistory e;
    try {
        if (auto rej = create_known_graph(e, h, opts.session_order)) {
            r.status = VerifyResult::Status::Reject;
            r.reason = to_string(rej->reason);
            r.certificate_valid = true;  // index-level rejects carry no cycle
            r.stats.txns = h.txns.size();
            return r;
        }
    } catch (const UnresolvedRead& ur) {
        r.status = VerifyResult::Status::Reject;
        r.reason = "unresolved-read";
        r.certificate_valid = true;
        return r;
    }
    r = encode_and_solve(e, opts, nullptr);
    if (r.status == VerifyResult::Status::Reject)
        r.certificate_valid = validate_cycles(r, e);
    return r;
}

}  // namespace cobra
