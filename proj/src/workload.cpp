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

#include "cobra/workload.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

namespace cobra {

namespace {

// rng() % n is used throughout instead of std::uniform_int_distribution,
// whose output is implementation-defined.
std::uint64_t pick(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

std::string key_name(int i) { return "k" + std::to_string(i); }

std::vector<int> sample_keys(std::mt19937_64& rng, int keys, int want) {
    want = std::min(want, keys);
    std::set<int> chosen;
    while (static_cast<int>(chosen.size()) < want)
        chosen.insert(static_cast<int>(pick(rng, keys)));
    return {chosen.begin(), chosen.end()};
}

struct Sim {
    const WorkloadConfig& cfg;
    std::mt19937_64 rng;
    std::map<std::string, WriteId> store;
    WriteId next_wid = 1;

    WriteId write(const std::string& k) {
        WriteId w = next_wid++;
        store[k] = w;
        return w;
    }
    WriteId read(const std::string& k) const {
        auto it = store.find(k);
        return it == store.end() ? kInitialWrite : it->second;
    }

    Transaction make_txn(SessionId s, std::uint32_t seq) {
        Transaction t;
        t.session = s;
        t.seq = seq;
        t.id = (static_cast<TxnId>(s) << 32) | (seq + 1);
        switch (cfg.benchmark) {
            case Benchmark::BlindW_RW:
            case Benchmark::BlindW_RM: {
                int ro_pct = cfg.benchmark == Benchmark::BlindW_RW ? 50 : 90;
                bool read_only = pick(rng, 100) < static_cast<std::uint64_t>(ro_pct);
                for (int k : sample_keys(rng, cfg.keys, cfg.ops_per_txn)) {
                    if (read_only)
                        t.ops.push_back({Operation::Kind::Read, key_name(k), read(key_name(k))});
                    else
                        t.ops.push_back({Operation::Kind::Write, key_name(k), write(key_name(k))});
                }
                break;
            }
            case Benchmark::RMWOnly: {
                auto keys = sample_keys(rng, cfg.keys, std::max(1, cfg.ops_per_txn / 2));
                for (int k : keys)
                    t.ops.push_back({Operation::Kind::Read, key_name(k), read(key_name(k))});
                for (int k : keys)
                    t.ops.push_back({Operation::Kind::Write, key_name(k), write(key_name(k))});
                break;
            }
            case Benchmark::ReadHeavy: {
                auto keys = sample_keys(rng, cfg.keys, cfg.ops_per_txn);
                std::vector<Operation> writes;
                for (int k : keys) {
                    if (pick(rng, 100) < 90)
                        t.ops.push_back({Operation::Kind::Read, key_name(k), read(key_name(k))});
                    else
                        writes.push_back({Operation::Kind::Write, key_name(k),
                                          write(key_name(k))});
                }
                t.ops.insert(t.ops.end(), writes.begin(), writes.end());
                break;
            }
        }
        return t;
    }

    Transaction make_fence(SessionId s, std::uint32_t seq) {
        Transaction t;
        t.session = s;
        t.seq = seq;
        t.id = (static_cast<TxnId>(s) << 32) | (seq + 1);
        t.fence = true;
        bool read_fence = cfg.read_fence_fraction > 0 &&
                          pick(rng, 1000) < static_cast<std::uint64_t>(cfg.read_fence_fraction * 1000);
        t.ops.push_back({Operation::Kind::Read, kEpochKey, read(kEpochKey)});
        if (!read_fence)
            t.ops.push_back({Operation::Kind::Write, kEpochKey, write(kEpochKey)});
        return t;
    }
};

struct Anchor {
    std::vector<std::size_t> txns;  // indices into h.txns
    std::string key;
};

[[noreturn]] void not_applicable(const std::string& why) { throw PatternNotApplicable(why); }

}  // namespace

History generate(const WorkloadConfig& cfg) {
    Sim sim{cfg, std::mt19937_64(cfg.seed)};
    History h;
    const int sessions = std::max(1, cfg.num_sessions);
    std::vector<int> quota(sessions);
    for (int i = 0; i < cfg.total_txns; ++i) ++quota[i % sessions];
    std::vector<std::uint32_t> seq(sessions, 0);
    std::vector<int> since_fence(sessions, 0);

    std::vector<int> open;
    for (int s = 0; s < sessions; ++s)
        if (quota[s] > 0) open.push_back(s);
    while (!open.empty()) {
        int oi = static_cast<int>(pick(sim.rng, open.size()));
        int s = open[oi];
        SessionId sid = static_cast<SessionId>(s + 1);
        if (cfg.fence_every > 0 && since_fence[s] == cfg.fence_every) {
            h.add(sim.make_fence(sid, seq[s]++));
            since_fence[s] = 0;
            continue;
        }
        h.add(sim.make_txn(sid, seq[s]++));
        ++since_fence[s];
        if (--quota[s] == 0) open.erase(open.begin() + oi);
    }
    h.canonicalize();
    return h;
}

InjectionResult inject(const History& h, AnomalyKind kind, std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    InjectionResult res;
    res.history = h;
    auto& txns = res.history.txns;

    WriteId next_wid = 1;
    TxnId max_id = 0;
    for (const auto& t : txns) {
        max_id = std::max(max_id, t.id);
        for (const auto& op : t.ops) next_wid = std::max(next_wid, op.write_id + 1);
    }

    // Indices per session ordered by seq, fences excluded (their shape
    // must not change).
    std::map<SessionId, std::vector<std::size_t>> per_session;
    for (std::size_t i = 0; i < txns.size(); ++i)
        if (!txns[i].fence) per_session[txns[i].session].push_back(i);
    for (auto& [sid, v] : per_session)
        std::sort(v.begin(), v.end(),
                  [&](std::size_t a, std::size_t b) { return txns[a].seq < txns[b].seq; });

    auto append = [&](std::size_t i, Operation op) {
        txns[i].ops.push_back(op);
        res.log.push_back("txn " + std::to_string(txns[i].id) + " += " +
                          (op.kind == Operation::Kind::Read ? "r:" : "w:") + op.key + ":" +
                          std::to_string(op.write_id));
    };

    switch (kind) {
        case AnomalyKind::StaleRead: {
            // B, issued after two same-session writes w1 then w2 of key
            // k, reads k from w1.
            std::vector<Anchor> anchors;
            for (const auto& [sid, idxs] : per_session) {
                std::map<std::string, std::vector<std::size_t>> writes;
                for (std::size_t i : idxs)
                    for (const auto& key : txns[i].written_keys()) writes[key].push_back(i);
                for (const auto& [key, ws] : writes) {
                    if (ws.size() < 2) continue;
                    for (std::size_t wi = 0; wi + 1 < ws.size(); ++wi) {
                        for (std::size_t b : idxs) {
                            if (txns[b].seq <= txns[ws[wi + 1]].seq) continue;
                            if (txns[b].touches_key(key)) continue;
                            anchors.push_back({{ws[wi], ws[wi + 1], b}, key});
                        }
                    }
                }
            }
            if (anchors.empty()) not_applicable("no session writes a key twice before a third txn");
            const Anchor& a = anchors[pick(rng, anchors.size())];
            WriteId stale = txns[a.txns[0]].write_of(a.key)->write_id;
            append(a.txns[2], {Operation::Kind::Read, a.key, stale});
            break;
        }
        case AnomalyKind::LostUpdate: {
            // Two txns read-modify-write the same version of a key.
            std::vector<Anchor> anchors;
            for (std::size_t w = 0; w < txns.size(); ++w) {
                if (txns[w].fence) continue;
                for (const auto& key : txns[w].written_keys()) {
                    std::vector<std::size_t> hosts;
                    for (std::size_t b = 0; b < txns.size(); ++b)
                        if (b != w && !txns[b].fence && !txns[b].touches_key(key))
                            hosts.push_back(b);
                    if (hosts.size() >= 2) anchors.push_back({{w, hosts[0], hosts[1]}, key});
                }
            }
            if (anchors.empty()) not_applicable("no write with two txns free of its key");
            const Anchor& a = anchors[pick(rng, anchors.size())];
            WriteId src = txns[a.txns[0]].write_of(a.key)->write_id;
            for (int j = 1; j <= 2; ++j) {
                append(a.txns[j], {Operation::Kind::Read, a.key, src});
                append(a.txns[j], {Operation::Kind::Write, a.key, next_wid++});
            }
            break;
        }
        case AnomalyKind::WriteCycle: {
            std::vector<std::size_t> hosts;
            for (std::size_t i = 0; i < txns.size(); ++i)
                if (!txns[i].fence) hosts.push_back(i);
            if (hosts.size() < 2) not_applicable("needs two non-fence txns");
            std::size_t ai = hosts[pick(rng, hosts.size())];
            std::size_t bi = ai;
            while (bi == ai) bi = hosts[pick(rng, hosts.size())];
            WriteId ida = next_wid++, idb = next_wid++;
            append(ai, {Operation::Kind::Read, "inj_wc_y", idb});
            append(ai, {Operation::Kind::Write, "inj_wc_x", ida});
            append(bi, {Operation::Kind::Read, "inj_wc_x", ida});
            append(bi, {Operation::Kind::Write, "inj_wc_y", idb});
            break;
        }
        case AnomalyKind::SessionOrderViolation: {
            std::vector<SessionId> candidates;
            for (const auto& [sid, idxs] : per_session)
                if (idxs.size() >= 2) candidates.push_back(sid);
            if (candidates.empty()) not_applicable("needs a session with two txns");
            const auto& idxs = per_session.at(candidates[pick(rng, candidates.size())]);
            std::size_t p1 = pick(rng, idxs.size() - 1);
            std::size_t p2 = p1 + 1 + pick(rng, idxs.size() - p1 - 1);
            WriteId nid = next_wid++;
            append(idxs[p2], {Operation::Kind::Write, "inj_so", nid});
            append(idxs[p1], {Operation::Kind::Read, "inj_so", nid});
            break;
        }
        case AnomalyKind::FutureReadAcrossEpochs: {
            // T4 reads x from T1 although T2 overwrote it, and y from T3
            // which follows T2: T4 -rw-> T2 ~~> T3 -wr-> T4.
            std::vector<SessionId> candidates;
            for (const auto& [sid, idxs] : per_session)
                if (idxs.size() >= 3) candidates.push_back(sid);
            if (candidates.empty()) not_applicable("needs a session with three txns");
            const auto& idxs = per_session.at(candidates[pick(rng, candidates.size())]);
            std::size_t t1 = idxs[0], t2 = idxs[1], t3 = idxs[2];
            WriteId i1 = next_wid++, i2 = next_wid++, i3 = next_wid++;
            append(t1, {Operation::Kind::Write, "inj_fr_x", i1});
            append(t2, {Operation::Kind::Read, "inj_fr_x", i1});
            append(t2, {Operation::Kind::Write, "inj_fr_x", i2});
            append(t3, {Operation::Kind::Write, "inj_fr_y", i3});

            Transaction t4;
            SessionId host = txns[t3].session;
            std::uint32_t max_seq = 0;
            for (const auto& t : txns)
                if (t.session == host) max_seq = std::max(max_seq, t.seq);
            t4.session = host;
            t4.seq = max_seq + 1;
            t4.id = max_id + 1;
            t4.ops.push_back({Operation::Kind::Read, "inj_fr_x", i1});
            t4.ops.push_back({Operation::Kind::Read, "inj_fr_y", i3});
            res.history.add(t4);
            res.log.push_back("added txn " + std::to_string(t4.id) +
                              " reading inj_fr_x:" + std::to_string(i1) + " and inj_fr_y:" +
                              std::to_string(i3));
            break;
        }
    }
    res.history.canonicalize();
    return res;
}

std::optional<Benchmark> parse_benchmark(const std::string& name) {
    if (name == "blindw-rw") return Benchmark::BlindW_RW;
    if (name == "blindw-rm") return Benchmark::BlindW_RM;
    if (name == "rmw-only") return Benchmark::RMWOnly;
    if (name == "read-heavy") return Benchmark::ReadHeavy;
    return std::nullopt;
}

std::optional<AnomalyKind> parse_anomaly(const std::string& name) {
    if (name == "stale-read") return AnomalyKind::StaleRead;
    if (name == "lost-update") return AnomalyKind::LostUpdate;
    if (name == "write-cycle") return AnomalyKind::WriteCycle;
    if (name == "session-order-violation") return AnomalyKind::SessionOrderViolation;
    if (name == "future-read-across-epochs") return AnomalyKind::FutureReadAcrossEpochs;
    return std::nullopt;
}

std::string to_string(Benchmark b) {
    switch (b) {
        case Benchmark::BlindW_RW: return "blindw-rw";
        case Benchmark::BlindW_RM: return "blindw-rm";
        case Benchmark::RMWOnly: return "rmw-only";
        case Benchmark::ReadHeavy: return "read-heavy";
    }
    return "?";
}

std::string to_string(AnomalyKind k) {
    switch (k) {
        case AnomalyKind::StaleRead: return "stale-read";
        case AnomalyKind::LostUpdate: return "lost-update";
        case AnomalyKind::WriteCycle: return "write-cycle";
        case AnomalyKind::SessionOrderViolation: return "session-order-violation";
        case AnomalyKind::FutureReadAcrossEpochs: return "future-read-across-epochs";
    }
    return "?";
}

}  // namespace cobra
