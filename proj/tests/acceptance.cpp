// Acceptance gate: one line per criterion, exit 0 iff all pass.
#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "cobra/constraints.hpp"
#include "cobra/graph_builder.hpp"
#include "cobra/oracle.hpp"
#include "cobra/pruner.hpp"
#include "cobra/rounds.hpp"
#include "cobra/solver.hpp"
#include "cobra/verifier.hpp"
#include "cobra/workload.hpp"
#include "common.hpp"

using namespace cobra;
using namespace testutil;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<History> split_rounds(const History& h, std::size_t per_round) {
    std::vector<History> frags;
    for (std::size_t at = 0; at < h.txns.size(); at += per_round) {
        History frag;
        for (std::size_t i = at; i < std::min(h.txns.size(), at + per_round); ++i)
            frag.add(h.txns[i]);
        frags.push_back(std::move(frag));
    }
    return frags;
}

// Returns the per-round statuses, stopping after the first reject.
std::vector<VerifyResult::Status> run_stream(const std::vector<History>& frags, bool gc) {
    RoundsConfig rc;
    rc.gc = gc;
    RoundVerifier rv(rc);
    std::vector<VerifyResult::Status> verdicts;
    for (const History& f : frags) {
        verdicts.push_back(rv.process(f).result.status);
        if (verdicts.back() == VerifyResult::Status::Reject) break;
    }
    return verdicts;
}

// 1: the verifier and the permutation oracle agree on >= 1000 random
// small histories, in under a minute.
bool criterion1() {
    auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(101);
    for (int i = 0; i < 1000; ++i) {
        History h = random_history(rng, 8, 3, 3);
        bool expect = oracle_serializable(h, true);
        VerifyResult r = verify(h);
        bool got = r.status == VerifyResult::Status::Accept;
        if (got != expect) return false;
        if (!got && !r.certificate_valid) return false;
    }
    return seconds_since(start) < 60.0;
}

// 2: the worked constraint-pipeline examples come out structurally exact.
bool criterion2() {
    {  // one known read edge, one two-sided constraint
        History h = hist({txn(1, 1, 0, {W("x", 1)}), txn(2, 2, 0, {W("x", 2)}),
                          txn(3, 3, 0, {R("x", 1)})});
        ExtendedHistory e;
        if (create_known_graph(e, h)) return false;
        ConstraintGenResult gen = gen_constraints(e);
        if (gen.constraints != std::vector<Constraint>{Constraint{{{3, 2}}, {{2, 1}}}})
            return false;
        SolverInstance inst = encode(e, gen.constraints);
        if (inst.n != 3 || inst.fixed_edges.size() != 1 || inst.choices.size() != 1) return false;
    }
    {  // write combining: two RMW chains
        History h = hist({txn(1, 1, 0, {W("k", 1)}), txn(2, 2, 0, {R("k", 1), W("k", 2)}),
                          txn(3, 3, 0, {W("k", 3)}), txn(4, 4, 0, {R("k", 3), W("k", 4)})});
        ExtendedHistory e;
        if (create_known_graph(e, h)) return false;
        ConstraintGenResult gen = gen_constraints(e);
        if (gen.chains.at("k") != std::vector<Chain>{Chain{"k", {1, 2}}, Chain{"k", {3, 4}}})
            return false;
        if (gen.constraints != std::vector<Constraint>{Constraint{{{2, 3}}, {{4, 1}}}})
            return false;
    }
    {  // coalescing: all readers of a write share one constraint
        History h = hist({txn(1, 1, 0, {W("x", 1)}), txn(2, 2, 0, {W("x", 2)}),
                          txn(3, 3, 0, {R("x", 1)}), txn(4, 4, 0, {R("x", 1)}),
                          txn(5, 5, 0, {R("x", 2)})});
        ExtendedHistory e;
        if (create_known_graph(e, h)) return false;
        ConstraintGenResult gen = gen_constraints(e);
        if (gen.constraints != std::vector<Constraint>{Constraint{{{3, 2}, {4, 2}}, {{5, 1}}}})
            return false;
    }
    {  // pruning drops the side that closes a cycle
        ExtendedHistory e;
        for (TxnId id : {1, 2, 3}) {
            Transaction t;
            t.id = id;
            t.session = static_cast<SessionId>(id);
            e.txns.emplace(id, t);
            e.out.try_emplace(id);
        }
        e.add_edge(2, 3);
        std::vector<Constraint> con{Constraint{{{3, 2}}, {{2, 1}}}};
        PruneOutcome out = prune(con, e);
        if (out.status != PruneOutcome::Status::Ok || out.resolved != 1) return false;
        if (!e.has_edge(2, 1) || e.has_edge(3, 2)) return false;
    }
    return true;
}

// 3: pruning never changes a verdict (500 histories); garbage collection
// never changes a verdict sequence (200 five-round streams), including
// streams with an injected violation, which both modes reject in the
// same round.
bool criterion3() {
    std::mt19937_64 rng(303);
    for (int i = 0; i < 500; ++i) {
        History h = random_history(rng, 8, 3, 3);
        VerifyOptions on, off;
        off.prune = false;
        if (verify(h, on).status != verify(h, off).status) return false;
    }

    const AnomalyKind kinds[] = {AnomalyKind::StaleRead, AnomalyKind::LostUpdate,
                                 AnomalyKind::WriteCycle};
    int streams = 0;
    for (std::uint64_t seed = 0; streams < 200; ++seed) {
        if (seed > 400) return false;
        WorkloadConfig cfg;
        cfg.benchmark = Benchmark::RMWOnly;
        cfg.num_sessions = 2;
        cfg.total_txns = 250;
        cfg.keys = 6;
        cfg.ops_per_txn = 4;
        cfg.fence_every = 10;
        cfg.seed = seed;
        History h = generate(cfg);
        std::size_t per_round = (h.txns.size() + 4) / 5;  // five rounds
        auto clean = split_rounds(h, per_round);
        auto on = run_stream(clean, true);
        if (on != run_stream(clean, false)) return false;
        for (auto s : on)
            if (s != VerifyResult::Status::Accept) return false;

        InjectionResult bad;
        try {
            bad = inject(h, kinds[seed % 3], seed);
        } catch (const PatternNotApplicable&) {
            continue;
        }
        auto frags = split_rounds(bad.history, per_round);
        auto gc_on = run_stream(frags, true);
        auto gc_off = run_stream(frags, false);
        if (gc_on != gc_off) return false;
        if (gc_on.back() != VerifyResult::Status::Reject) return false;
        ++streams;
    }
    return true;
}

// 4: violations spanning a deletion boundary are still caught. In the
// first pattern the overwriting txn must outlive collection so the late
// stale read closes a cycle; in the second, a superseded txn under an
// unresolved constraint is retained until later reads finalize it.
bool criterion4() {
    {
        History round1 = hist({txn(1, 1, 0, {W("x", 1)}), txn(2, 1, 1, {R("x", 1), W("x", 2)}),
                               txn(3, 1, 2, {W("y", 3)}), fence(11, 1, 3, 0, 901),
                               fence(21, 2, 0, 901, 902), fence(12, 1, 4, 902, 903),
                               fence(22, 2, 1, 903, 904), fence(13, 1, 5, 904, 905),
                               fence(23, 2, 2, 905, 906)});
        RoundVerifier rv;
        RoundVerdict v1 = rv.process(round1);
        if (v1.result.status != VerifyResult::Status::Accept) return false;
        if (v1.deleted == 0) return false;
        if (!rv.state().alive(2)) return false;
        RoundVerdict v2 = rv.process(hist({txn(4, 2, 3, {R("x", 1), R("y", 3)})}));
        if (v2.result.status != VerifyResult::Status::Reject) return false;
        if (!v2.result.certificate_valid) return false;
    }
    {
        History round1 = hist({
            txn(31, 1, 0, {W("b", 10)}), txn(32, 1, 1, {R("b", 10), W("b", 11)}),
            txn(1, 1, 2, {W("d", 1)}), fence(11, 1, 3, 0, 801), fence(12, 1, 4, 803, 804),
            fence(13, 1, 5, 806, 807), txn(3, 2, 0, {W("c", 3), W("d", 4)}),
            txn(5, 2, 1, {R("c", 3), W("c", 6), W("d", 7)}), fence(21, 2, 2, 802, 803),
            fence(22, 2, 3, 805, 806), fence(41, 3, 0, 801, 802), txn(4, 3, 1, {W("c", 5)}),
            fence(42, 3, 2, 804, 805),
        });
        RoundVerifier rv;
        RoundVerdict v1 = rv.process(round1);
        if (v1.result.status != VerifyResult::Status::Accept) return false;
        if (v1.deleted == 0 || rv.state().alive(31)) return false;
        if (!rv.state().alive(3)) return false;  // superseded but constrained
        RoundVerdict v2 = rv.process(hist({txn(7, 3, 3, {R("d", 1)}), txn(8, 3, 4, {R("c", 6)})}));
        if (v2.result.status != VerifyResult::Status::Reject) return false;
        if (!v2.result.certificate_valid) return false;
    }
    return true;
}

// 5: read-modify-write-only workloads combine into one chain per key,
// leaving zero constraints, across key and txn counts.
bool criterion5() {
    for (int keys : {1, 3, 10}) {
        for (int txns : {100, 500, 1000}) {
            WorkloadConfig cfg;
            cfg.benchmark = Benchmark::RMWOnly;
            cfg.num_sessions = 2;
            cfg.total_txns = txns;
            cfg.keys = keys;
            cfg.ops_per_txn = 4;
            cfg.fence_every = 0;
            cfg.seed = static_cast<std::uint64_t>(keys * 1000 + txns);
            VerifyResult r = verify(generate(cfg));
            if (r.status != VerifyResult::Status::Accept) return false;
            if (r.stats.constraints_after_combine != 0) return false;
        }
    }
    return true;
}

// 6: with fences flowing, the live set stays within four round-sizes
// across a long stream.
bool criterion6() {
    WorkloadConfig cfg;
    cfg.benchmark = Benchmark::RMWOnly;
    cfg.num_sessions = 2;
    cfg.total_txns = 1100;
    cfg.keys = 8;
    cfg.ops_per_txn = 4;
    cfg.fence_every = 20;
    cfg.seed = 606;
    History h = generate(cfg);
    const std::size_t round_size = 50;
    auto frags = split_rounds(h, round_size);
    if (frags.size() < 20) return false;
    RoundVerifier rv;
    for (const History& f : frags) {
        RoundVerdict v = rv.process(f);
        if (v.result.status != VerifyResult::Status::Accept) return false;
        if (v.live_set > 4 * round_size) return false;
    }
    return true;
}

// 7: ten-thousand-txn runs finish within budget: blind writes under five
// minutes, read-modify-write-heavy under thirty seconds.
bool criterion7() {
    {
        WorkloadConfig cfg;
        cfg.benchmark = Benchmark::BlindW_RW;
        cfg.num_sessions = 10;
        cfg.total_txns = 10000;
        cfg.keys = 10000;
        cfg.ops_per_txn = 8;
        cfg.fence_every = 50;
        cfg.seed = 707;
        History h = generate(cfg);
        auto start = std::chrono::steady_clock::now();
        if (verify(h).status != VerifyResult::Status::Accept) return false;
        double secs = seconds_since(start);
        std::printf("  blindw-rw 10k txns: %.1fs (budget 300s)\n", secs);
        if (secs >= 300.0) return false;
    }
    {
        WorkloadConfig cfg;
        cfg.benchmark = Benchmark::RMWOnly;
        cfg.num_sessions = 10;
        cfg.total_txns = 10000;
        cfg.keys = 200;
        cfg.ops_per_txn = 8;
        cfg.fence_every = 50;
        cfg.seed = 717;
        History h = generate(cfg);
        auto start = std::chrono::steady_clock::now();
        if (verify(h).status != VerifyResult::Status::Accept) return false;
        double secs = seconds_since(start);
        std::printf("  rmw-only 10k txns: %.1fs (budget 30s)\n", secs);
        if (secs >= 30.0) return false;
    }
    return true;
}

// 8: every anomaly kind, injected into >= 50 mid-size histories, is
// rejected with an edge-validated certificate.
bool criterion8() {
    const AnomalyKind kinds[] = {AnomalyKind::StaleRead, AnomalyKind::LostUpdate,
                                 AnomalyKind::WriteCycle, AnomalyKind::SessionOrderViolation,
                                 AnomalyKind::FutureReadAcrossEpochs};
    for (AnomalyKind kind : kinds) {
        int applied = 0;
        for (std::uint64_t seed = 0; applied < 50; ++seed) {
            if (seed > 500) return false;
            WorkloadConfig cfg;
            cfg.benchmark = seed % 2 ? Benchmark::BlindW_RW : Benchmark::RMWOnly;
            cfg.num_sessions = 3;
            cfg.total_txns = 50 + static_cast<int>(seed % 10) * 50;
            cfg.keys = 10;
            cfg.ops_per_txn = 4;
            cfg.fence_every = 10;
            cfg.seed = seed;
            InjectionResult res;
            try {
                res = inject(generate(cfg), kind, seed);
            } catch (const PatternNotApplicable&) {
                continue;
            }
            if (res.log.empty()) return false;
            VerifyResult r = verify(res.history);
            if (r.status != VerifyResult::Status::Reject) return false;
            if (!r.certificate_valid) return false;
            ++applied;
        }
    }
    return true;
}

}  // namespace

int main() {
    bool (*criteria[])() = {criterion1, criterion2, criterion3, criterion4,
                            criterion5, criterion6, criterion7, criterion8};
    bool all = true;
    for (int i = 0; i < 8; ++i) {
        bool ok = criteria[i]();
        std::printf("criterion %d: %s\n", i + 1, ok ? "PASS" : "FAIL");
        std::fflush(stdout);
        all = all && ok;
    }
    return all ? 0 : 1;
}
