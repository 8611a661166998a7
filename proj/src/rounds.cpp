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

#include "cobra/rounds.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "cobra/closure.hpp"
#include "cobra/codec.hpp"
#include "cobra/graph_builder.hpp"

namespace cobra {

EpochInfo assign_epochs(const ExtendedHistory& e) {
    EpochInfo info;
    for (const auto& [id, t] : e.txns) info.epoch[id] = kInfEpoch;

    DenseGraph g = densify(e.out, e.txns);
    auto order = topo_order(g.adj);
    if (!order) return info;  // cyclic state is rejected before GC runs

    // Fences that write EPOCH get consecutive numbers in topological
    // order; fences that only read EPOCH inherit from the writer read.
    long long epoch_num = 0;
    for (int v : *order) {
        const Transaction& t = e.txns.at(g.ids[v]);
        if (t.writes_key(kEpochKey)) info.epoch[t.id] = epoch_num++;
    }
    for (int v : *order) {
        const Transaction& t = e.txns.at(g.ids[v]);
        if (t.writes_key(kEpochKey) || !t.reads_key(kEpochKey)) continue;
        const Operation* rop = t.read_of(kEpochKey);
        long long ep = -1;  // read of the initial EPOCH value
        if (rop->write_id != kInitialWrite) {
            auto w = e.writer_of.find(rop->write_id);
            if (w != e.writer_of.end()) ep = info.epoch.at(w->second);
        }
        info.epoch[t.id] = ep;
    }

    long long agree = kInfEpoch;
    bool all_fenced = !e.sessions.empty();
    for (const auto& [sid, lst] : e.sessions) {
        long long cur = kInfEpoch;
        bool fenced = false;
        for (auto it = lst.rbegin(); it != lst.rend(); ++it) {
            const Transaction& t = e.txns.at(*it);
            if (t.touches_key(kEpochKey)) {
                if (!fenced) agree = std::min(agree, info.epoch.at(t.id));
                fenced = true;
                cur = info.epoch.at(t.id);
            } else {
                info.epoch[t.id] = (cur == kInfEpoch) ? kInfEpoch : cur - 1;
            }
        }
        all_fenced = all_fenced && fenced;
    }
    info.epoch_agree = (all_fenced && agree != kInfEpoch) ? agree : -1;
    return info;
}

std::vector<std::vector<TxnId>> gen_psccs(const std::vector<Constraint>& con,
                                          const ExtendedHistory& e) {
    DenseGraph g = densify(e.out, e.txns);
    for (const Constraint& c : con) {
        for (const Edge& ed : c.first) g.add_edge(g.index.at(ed.from), g.index.at(ed.to));
        for (const Edge& ed : c.second) g.add_edge(g.index.at(ed.from), g.index.at(ed.to));
    }
    int count = 0;
    std::vector<int> comp = scc_ids(g.adj, &count);
    std::vector<std::vector<TxnId>> psccs(count);
    for (int v = 0; v < g.n(); ++v) psccs[comp[v]].push_back(g.ids[v]);
    return psccs;
}

GcStats mark_and_delete(ExtendedHistory& e, const std::vector<Constraint>& con,
                        const EpochInfo& epochs) {
    GcStats stats;
    stats.epoch_agree = epochs.epoch_agree;
    stats.live_after = e.txns.size();
    const long long fepoch = epochs.epoch_agree - 2;
    if (fepoch < 0) return stats;

    DenseGraph g = densify(e.out, e.txns);
    auto order = topo_order(g.adj);
    if (!order) return stats;
    auto closure_v = transitive_closure(g.adj);
    if (!std::holds_alternative<ReachabilityMatrix>(closure_v)) return stats;
    const auto& reach = std::get<ReachabilityMatrix>(closure_v);

    std::vector<std::vector<int>> radj(g.n());
    for (int v = 0; v < g.n(); ++v)
        for (int w : g.adj[v]) radj[w].push_back(v);

    auto ep = [&](int v) { return epochs.epoch.at(g.ids[v]); };

    // Frozen: own epoch and every ancestor's epoch settled below fepoch.
    std::vector<char> frozen(g.n(), 0);
    for (int v : *order) {
        bool ok = ep(v) <= fepoch;
        for (int p : radj[v]) ok = ok && frozen[p];
        frozen[v] = ok;
    }

    // Obsolete per written key: some settled successor overwrites it.
    std::map<std::string, std::vector<int>> settled_writers;
    for (int v = 0; v < g.n(); ++v) {
        if (ep(v) > fepoch) continue;
        for (const auto& k : e.txns.at(g.ids[v]).written_keys()) settled_writers[k].push_back(v);
    }
    auto obsolete = [&](int v) {
        const Transaction& t = e.txns.at(g.ids[v]);
        if (ep(v) > fepoch) return false;
        for (const auto& k : t.written_keys()) {
            bool superseded = false;
            for (int w : settled_writers[k])
                if (w != v && reach.at(v, w)) {
                    superseded = true;
                    break;
                }
            if (!superseded) return false;
        }
        return !t.written_keys().empty();
    };

    std::vector<char> candidate(g.n(), 0);
    for (int v = 0; v < g.n(); ++v) {
        if (!frozen[v]) continue;
        const Transaction& t = e.txns.at(g.ids[v]);
        if (t.read_only() || obsolete(v)) candidate[v] = 1;
    }

    std::set<TxnId> deletable;
    for (const auto& pscc : gen_psccs(con, e)) {
        bool all = true;
        for (TxnId id : pscc) all = all && candidate[g.index.at(id)];
        if (!all) continue;
        for (TxnId id : pscc)
            if (!e.txns.at(id).touches_key(kEpochKey)) deletable.insert(id);
    }

    // Contract deleted nodes one at a time, splicing predecessors to
    // successors so known paths among survivors are preserved.
    std::map<TxnId, std::set<TxnId>> rin;
    for (const auto& [from, succs] : e.out)
        for (TxnId to : succs) rin[to].insert(from);

    for (TxnId id : deletable) {
        const Transaction t = e.txns.at(id);
        std::set<TxnId> preds = rin.count(id) ? rin[id] : std::set<TxnId>{};
        std::set<TxnId> succs = e.out.count(id) ? e.out[id] : std::set<TxnId>{};
        for (TxnId p : preds) {
            e.out[p].erase(id);
            for (TxnId s : succs) {
                if (p == s) continue;
                e.out[p].insert(s);
                rin[s].insert(p);
            }
        }
        for (TxnId s : succs) rin[s].erase(id);
        e.out.erase(id);
        rin.erase(id);

        for (const auto& op : t.ops) {
            if (op.kind == Operation::Kind::Read) {
                TxnId writer = kInitialTxn;
                if (op.write_id != kInitialWrite) {
                    auto w = e.writer_of.find(op.write_id);
                    writer = (w == e.writer_of.end()) ? kInitialTxn : w->second;
                    if (w == e.writer_of.end()) continue;
                }
                auto rf = e.readfrom.find({op.key, writer});
                if (rf != e.readfrom.end()) {
                    rf->second.erase(id);
                    if (rf->second.empty()) e.readfrom.erase(rf);
                }
            } else {
                e.readfrom.erase({op.key, id});
                e.wwpairs.erase({op.key, id});
                e.writer_of.erase(op.write_id);
                e.tombstone_writes.insert(op.write_id);
            }
        }
        // RMW-successor entries pointing at the deleted txn stay behind
        // as markers while their writer lives; a later RMW of that write
        // must still be rejected as a second successive write.

        auto& lst = e.sessions[t.session];
        lst.erase(std::remove(lst.begin(), lst.end(), id), lst.end());
        e.txns.erase(id);
        e.tombstones.insert(id);
        ++stats.deleted;
    }
    stats.live_after = e.txns.size();
    return stats;
}

RoundVerdict RoundVerifier::process(const History& fragment) {
    RoundVerdict verdict;
    verdict.round = round_++;

    std::vector<Transaction> pending = std::move(deferred_);
    deferred_.clear();
    for (const auto& t : fragment.txns)
        if (t.committed) pending.push_back(t);

    // A txn is ready when its reads resolve against known, tombstoned,
    // or ready in-batch writes and its in-batch session predecessors are
    // ready; deferring a txn defers its session successors.
    std::vector<char> ready(pending.size(), 1);
    std::unordered_map<WriteId, std::size_t> batch_writer;
    for (std::size_t i = 0; i < pending.size(); ++i)
        for (const auto& op : pending[i].ops)
            if (op.kind == Operation::Kind::Write) batch_writer[op.write_id] = i;
    bool changed = true;
    while (changed) {
        changed = false;
        std::map<SessionId, std::vector<std::size_t>> by_session;
        for (std::size_t i = 0; i < pending.size(); ++i)
            by_session[pending[i].session].push_back(i);
        for (auto& [sid, idxs] : by_session)
            std::sort(idxs.begin(), idxs.end(), [&](std::size_t a, std::size_t b) {
                return pending[a].seq < pending[b].seq;
            });
        for (std::size_t i = 0; i < pending.size(); ++i) {
            if (!ready[i]) continue;
            bool ok = true;
            for (const auto& op : pending[i].ops) {
                if (op.kind != Operation::Kind::Read || op.write_id == kInitialWrite) continue;
                if (e_.writer_of.count(op.write_id) || e_.tombstone_writes.count(op.write_id))
                    continue;
                auto bw = batch_writer.find(op.write_id);
                if (bw == batch_writer.end() || !ready[bw->second]) {
                    ok = false;
                    break;
                }
            }
            if (ok) continue;
            ready[i] = 0;
            changed = true;
        }
        // Session order: anything after a deferred txn defers too.
        for (auto& [sid, idxs] : by_session) {
            bool blocked = false;
            for (std::size_t i : idxs) {
                if (!ready[i]) blocked = true;
                else if (blocked) {
                    ready[i] = 0;
                    changed = true;
                }
            }
        }
    }

    History round_h;
    for (std::size_t i = 0; i < pending.size(); ++i) {
        if (ready[i])
            round_h.add(pending[i]);
        else
            deferred_.push_back(pending[i]);
    }
    if (deferred_.size() > cfg_.defer_cap)
        throw DeferOverflow("deferred transaction buffer exceeds cap of " +
                            std::to_string(cfg_.defer_cap));
    verdict.deferred = deferred_.size();

    if (auto rej = create_known_graph(e_, round_h, cfg_.verify.session_order)) {
        verdict.result.status = VerifyResult::Status::Reject;
        verdict.result.reason = to_string(rej->reason);
        verdict.result.certificate_valid = true;
        verdict.live_set = e_.txns.size();
        return verdict;
    }

    std::vector<Constraint> con;
    verdict.result = encode_and_solve(e_, cfg_.verify, &con);
    if (verdict.result.status == VerifyResult::Status::Reject)
        verdict.result.certificate_valid = validate_cycles(verdict.result, e_);

    if (verdict.result.status == VerifyResult::Status::Accept && cfg_.gc) {
        EpochInfo epochs = assign_epochs(e_);
        GcStats gc = mark_and_delete(e_, con, epochs);
        verdict.deleted = gc.deleted;
    }
    verdict.live_set = e_.txns.size();
    return verdict;
}

void RoundVerifier::save_checkpoint(std::ostream& out) const {
    out << "checkpoint 1\n";
    out << "round " << round_ << '\n';
    for (const auto& [id, t] : e_.txns) out << format_txn(t) << '\n';
    for (const auto& [from, succs] : e_.out)
        for (TxnId to : succs) out << "E " << from << ' ' << to << '\n';
    for (const auto& [kw, succ] : e_.wwpairs)
        out << "W " << kw.first << ' ' << kw.second << ' ' << succ << '\n';
    for (TxnId id : std::set<TxnId>(e_.tombstones.begin(), e_.tombstones.end()))
        out << "D " << id << '\n';
    for (WriteId w : std::set<WriteId>(e_.tombstone_writes.begin(), e_.tombstone_writes.end()))
        out << "X " << w << '\n';
    for (const auto& t : deferred_) out << "F " << format_txn(t) << '\n';
}

RoundVerifier RoundVerifier::load_checkpoint(std::istream& in, RoundsConfig cfg) {
    RoundVerifier rv(std::move(cfg));
    std::string line;
    if (!std::getline(in, line) || line != "checkpoint 1")
        throw std::runtime_error("checkpoint: bad header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream iss(line);
        std::string tag;
        iss >> tag;
        if (tag == "round") {
            iss >> rv.round_;
        } else if (tag == "T") {
            History one = parse_history(line);
            for (auto& t : one.txns) {
                rv.e_.txns.emplace(t.id, t);
                rv.e_.out.try_emplace(t.id);
                for (const auto& op : t.ops)
                    if (op.kind == Operation::Kind::Write) rv.e_.writer_of[op.write_id] = t.id;
            }
        } else if (tag == "E") {
            TxnId from, to;
            iss >> from >> to;
            rv.e_.add_edge(from, to);
        } else if (tag == "W") {
            std::string key;
            TxnId writer, succ;
            iss >> key >> writer >> succ;
            rv.e_.wwpairs[{key, writer}] = succ;
        } else if (tag == "D") {
            TxnId id;
            iss >> id;
            rv.e_.tombstones.insert(id);
        } else if (tag == "X") {
            WriteId w;
            iss >> w;
            rv.e_.tombstone_writes.insert(w);
        } else if (tag == "F") {
            History one = parse_history(line.substr(2));
            for (auto& t : one.txns) rv.deferred_.push_back(t);
        } else {
            throw std::runtime_error("checkpoint: unknown tag '" + tag + "'");
        }
        if (iss.fail() && tag != "T" && tag != "F")
            throw std::runtime_error("checkpoint: malformed line '" + line + "'");
    }
    // readfrom and session lists are derivable from the live txns.
    for (const auto& [id, t] : rv.e_.txns) {
        for (const auto& op : t.ops) {
            if (op.kind != Operation::Kind::Read) continue;
            TxnId writer = kInitialTxn;
            if (op.write_id != kInitialWrite) {
                auto w = rv.e_.writer_of.find(op.write_id);
                if (w == rv.e_.writer_of.end()) continue;  // writer was deleted
                writer = w->second;
            }
            rv.e_.readfrom[{op.key, writer}].insert(id);
        }
        rv.e_.sessions[t.session].push_back(id);
    }
    for (auto& [sid, lst] : rv.e_.sessions)
        std::sort(lst.begin(), lst.end(), [&](TxnId a, TxnId b) {
            return rv.e_.txns.at(a).seq < rv.e_.txns.at(b).seq;
        });
    return rv;
}

}  // namespace cobra
