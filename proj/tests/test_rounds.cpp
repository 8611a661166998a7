#include <random>
#include <sstream>

#include "cobra/closure.hpp"
#include "cobra/graph_builder.hpp"
#include "cobra/rounds.hpp"
#include "cobra/workload.hpp"
#include "common.hpp"
#include "doctest.h"

using namespace cobra;
using namespace testutil;

namespace {

ExtendedHistory build(const History& h) {
    ExtendedHistory e;
    auto rej = create_known_graph(e, h, true);
    REQUIRE(!rej.has_value());
    return e;
}

// Round 1 of the stale-future-read pattern: a write, an overwriting RMW,
// then an unrelated write, all in one session.
History stale_round1(bool with_fences) {
    std::vector<Transaction> txns{txn(1, 1, 0, {W("x", 1)}),
                                  txn(2, 1, 1, {R("x", 1), W("x", 2)}),
                                  txn(3, 1, 2, {W("y", 3)})};
    if (with_fences) {
        // Enough fences on both sessions to settle txns 1..3.
        txns.push_back(fence(11, 1, 3, 0, 901));
        txns.push_back(fence(21, 2, 0, 901, 902));
        txns.push_back(fence(12, 1, 4, 902, 903));
        txns.push_back(fence(22, 2, 1, 903, 904));
        txns.push_back(fence(13, 1, 5, 904, 905));
        txns.push_back(fence(23, 2, 2, 905, 906));
    }
    return hist(std::move(txns));
}

History stale_round2() {
    return hist({txn(4, 2, 3, {R("x", 1), R("y", 3)})});
}

// Constraint-finalization pattern. Sessions: 1 holds a deletable filler
// RMW pair and txn 1; 2 holds txns 3 and 5; 3 holds txn 4 and, in round
// 2, the two readers that finalize both constraints into a cycle.
History finalize_round1() {
    return hist({
        // session 1: filler chain on key b, then the write of d read later
        txn(31, 1, 0, {W("b", 10)}),
        txn(32, 1, 1, {R("b", 10), W("b", 11)}),
        txn(1, 1, 2, {W("d", 1)}),
        fence(11, 1, 3, 0, 801),       // epoch 0
        fence(12, 1, 4, 803, 804),     // epoch 3
        fence(13, 1, 5, 806, 807),     // epoch 6
        // session 2: two writers of c (and d), chained by an RMW on c
        txn(3, 2, 0, {W("c", 3), W("d", 4)}),
        txn(5, 2, 1, {R("c", 3), W("c", 6), W("d", 7)}),
        fence(21, 2, 2, 802, 803),     // epoch 2
        fence(22, 2, 3, 805, 806),     // epoch 5
        // session 3: a competing writer of c after the first fence
        fence(41, 3, 0, 801, 802),     // epoch 1
        txn(4, 3, 1, {W("c", 5)}),
        fence(42, 3, 2, 804, 805),     // epoch 4
    });
}

History finalize_round2() {
    return hist({txn(7, 3, 3, {R("d", 1)}), txn(8, 3, 4, {R("c", 6)})});
}

}  // namespace

TEST_CASE("epoch numbers follow the fence chain") {
    // Chain positions: 0 and 1 in session 2, then 2 in session 1, 3 in
    // session 2, 4 in session 1, with one normal txn between the session
    // 1 fences.
    History h = hist({
        fence(21, 2, 0, 0, 901), fence(22, 2, 1, 901, 902),
        fence(11, 1, 0, 902, 903),                 // epoch 2
        txn(1, 1, 1, {W("x", 1)}),                 // between epochs 2 and 4
        fence(23, 2, 2, 903, 904),                 // epoch 3
        fence(12, 1, 2, 904, 905),                 // epoch 4
    });
    EpochInfo info = assign_epochs(build(h));
    CHECK(info.epoch.at(11) == 2);
    CHECK(info.epoch.at(12) == 4);
    CHECK(info.epoch.at(1) == 3);
    CHECK(info.epoch_agree == 3);  // session 2's last fence
}

TEST_CASE("epoch agreement is the minimum last-fence epoch") {
    // Eight fences; session 1's last has chain position 5, session 2's 7.
    History h = hist({
        fence(11, 1, 0, 0, 901), fence(12, 1, 1, 901, 902), fence(13, 1, 2, 902, 903),
        fence(21, 2, 0, 903, 904), fence(22, 2, 1, 904, 905),
        fence(14, 1, 3, 905, 906),  // epoch 5, session 1's last
        fence(23, 2, 2, 906, 907), fence(24, 2, 3, 907, 908),
    });
    EpochInfo info = assign_epochs(build(h));
    CHECK(info.epoch.at(14) == 5);
    CHECK(info.epoch.at(24) == 7);
    CHECK(info.epoch_agree == 5);
}

TEST_CASE("txns after a session's last fence sit at infinite epoch") {
    History h = hist({fence(11, 1, 0, 0, 901), txn(1, 1, 1, {W("x", 1)}),
                      fence(21, 2, 0, 901, 902)});
    EpochInfo info = assign_epochs(build(h));
    CHECK(info.epoch.at(1) == kInfEpoch);
}

TEST_CASE("a session without fences disables agreement") {
    History h = hist({fence(11, 1, 0, 0, 901), txn(1, 2, 0, {W("x", 1)})});
    EpochInfo info = assign_epochs(build(h));
    CHECK(info.epoch_agree == -1);
}

TEST_CASE("read-only fences inherit the epoch of the fence they read") {
    History h = hist({fence(11, 1, 0, 0, 901), fence(12, 1, 1, 901, 902),
                      txn(21, 2, 0, {R(kEpochKey, 901)}, true)});
    EpochInfo info = assign_epochs(build(h));
    CHECK(info.epoch.at(21) == 0);
    CHECK(info.epoch_agree == 0);
}

TEST_CASE("epoch guarantee: settled txns reach every session's last fence") {
    WorkloadConfig cfg;
    cfg.benchmark = Benchmark::RMWOnly;
    cfg.num_sessions = 3;
    cfg.total_txns = 90;
    cfg.keys = 5;
    cfg.ops_per_txn = 4;
    cfg.fence_every = 6;
    for (cfg.seed = 0; cfg.seed < 5; ++cfg.seed) {
        ExtendedHistory e = build(generate(cfg));
        EpochInfo info = assign_epochs(e);
        REQUIRE(info.epoch_agree >= 2);
        DenseGraph g = densify(e.out, e.txns);
        ReachabilityMatrix reach = closure_by_bfs(g.adj);
        // Settled txns precede anything arriving later, because every
        // future txn follows its session's last fence.
        std::map<SessionId, TxnId> last_fence;
        for (const auto& [id, t] : e.txns)
            if (t.fence) last_fence[t.session] = std::max(last_fence[t.session], id);
        for (const auto& [ti, ei] : info.epoch) {
            if (ei > info.epoch_agree - 2) continue;
            for (const auto& [s, lf] : last_fence) {
                if (ti == lf) continue;
                CHECK(reach.at(g.index.at(ti), g.index.at(lf)));
            }
        }
    }
}

TEST_CASE("psccs group known edges with every constraint edge") {
    // Five single-op txns on one key; the unsolved constraint ties all
    // five into one component.
    History h = hist({txn(1, 1, 0, {W("x", 1)}), txn(2, 2, 0, {W("x", 2)}),
                      txn(3, 3, 0, {R("x", 1)}), txn(4, 4, 0, {R("x", 1)}),
                      txn(5, 5, 0, {R("x", 2)})});
    ExtendedHistory e = build(h);
    ConstraintGenResult gen = gen_constraints(e);
    auto psccs = gen_psccs(gen.constraints, e);
    REQUIRE(psccs.size() == 1);
    CHECK(psccs[0].size() == 5);

    // With no constraints every txn stands alone.
    ExtendedHistory e2 = build(hist({txn(1, 1, 0, {W("x", 1)}), txn(2, 2, 0, {W("y", 2)})}));
    CHECK(gen_psccs({}, e2).size() == 2);
}

TEST_CASE("streamed rounds match one-shot verification") {
    WorkloadConfig cfg;
    cfg.benchmark = Benchmark::RMWOnly;
    cfg.num_sessions = 2;
    cfg.total_txns = 100;
    cfg.keys = 4;
    cfg.ops_per_txn = 4;
    cfg.fence_every = 10;
    for (cfg.seed = 0; cfg.seed < 5; ++cfg.seed) {
        History h = generate(cfg);
        RoundVerifier rv;
        std::size_t deleted = 0;
        for (std::size_t at = 0; at < h.txns.size(); at += 25) {
            History frag;
            for (std::size_t i = at; i < std::min(h.txns.size(), at + 25); ++i)
                frag.add(h.txns[i]);
            RoundVerdict v = rv.process(frag);
            CHECK(v.result.status == VerifyResult::Status::Accept);
            deleted += v.deleted;
        }
        CHECK(deleted > 0);
        CHECK(verify(h).status == VerifyResult::Status::Accept);
    }
}

TEST_CASE("empty rounds accept and leave state unchanged") {
    RoundVerifier rv;
    rv.process(stale_round1(false));
    ExtendedHistory before = rv.state();
    RoundVerdict v = rv.process(History{});
    CHECK(v.result.status == VerifyResult::Status::Accept);
    CHECK(rv.state().same_state(before));
}

TEST_CASE("without fences nothing is deleted and the late cycle is caught") {
    RoundVerifier rv;
    RoundVerdict v1 = rv.process(stale_round1(false));
    CHECK(v1.result.status == VerifyResult::Status::Accept);
    CHECK(v1.deleted == 0);
    CHECK(rv.state().alive(2));  // the overwriting txn must survive

    RoundVerdict v2 = rv.process(stale_round2());
    REQUIRE(v2.result.status == VerifyResult::Status::Reject);
    CHECK(v2.result.certificate_valid);
    // The certificate walks the stale reader, the overwriter, and the
    // later write it read.
    REQUIRE(!v2.result.cycles.empty());
    std::set<TxnId> on_cycle(v2.result.cycles[0].begin(), v2.result.cycles[0].end());
    CHECK(on_cycle.count(2) == 1);
    CHECK(on_cycle.count(4) == 1);
}

TEST_CASE("with deletion between rounds the stale read still rejects") {
    RoundVerifier rv;
    RoundVerdict v1 = rv.process(stale_round1(true));
    CHECK(v1.result.status == VerifyResult::Status::Accept);
    CHECK(v1.deleted > 0);
    CHECK(rv.state().alive(2));  // most recent write of x is kept

    RoundVerdict v2 = rv.process(stale_round2());
    REQUIRE(v2.result.status == VerifyResult::Status::Reject);
    CHECK(v2.result.certificate_valid);
    // Whether txn 1 was deleted (tombstone hit) or kept (cycle), the
    // violation must surface in this round.
}

TEST_CASE("future reads finalize constraints only if their txns survive") {
    RoundVerifier rv;
    RoundVerdict v1 = rv.process(finalize_round1());
    REQUIRE(v1.result.status == VerifyResult::Status::Accept);
    // The filler pair's head is deletable; the constrained txns are not.
    CHECK(v1.deleted > 0);
    CHECK(!rv.state().alive(31));
    CHECK(rv.state().alive(3));  // kept by its component despite being superseded
    CHECK(rv.state().alive(1));
    CHECK(rv.state().alive(4));
    CHECK(rv.state().alive(5));

    RoundVerdict v2 = rv.process(finalize_round2());
    REQUIRE(v2.result.status == VerifyResult::Status::Reject);
    CHECK(v2.result.certificate_valid);
}

TEST_CASE("gc on and off agree across random streams") {
    WorkloadConfig cfg;
    cfg.benchmark = Benchmark::RMWOnly;
    cfg.num_sessions = 2;
    cfg.total_txns = 60;
    cfg.keys = 3;
    cfg.ops_per_txn = 2;
    cfg.fence_every = 6;
    for (cfg.seed = 20; cfg.seed < 30; ++cfg.seed) {
        History h = generate(cfg);
        auto run = [&](bool gc, const History& stream) {
            RoundsConfig rc;
            rc.gc = gc;
            RoundVerifier rv(rc);
            std::vector<VerifyResult::Status> verdicts;
            for (std::size_t at = 0; at < stream.txns.size(); at += 20) {
                History frag;
                for (std::size_t i = at; i < std::min(stream.txns.size(), at + 20); ++i)
                    frag.add(stream.txns[i]);
                verdicts.push_back(rv.process(frag).result.status);
                if (verdicts.back() == VerifyResult::Status::Reject) break;
            }
            return verdicts;
        };
        CHECK(run(true, h) == run(false, h));
        InjectionResult bad = inject(h, AnomalyKind::StaleRead, cfg.seed);
        CHECK(run(true, bad.history) == run(false, bad.history));
    }
}

TEST_CASE("reads of not-yet-seen writes defer to a later round") {
    RoundVerifier rv;
    History first = hist({txn(1, 1, 0, {W("x", 1)}),
                          txn(2, 2, 0, {R("x", 99)}),     // writer arrives later
                          txn(3, 2, 1, {R("x", 1)})});    // session successor defers too
    RoundVerdict v1 = rv.process(first);
    CHECK(v1.result.status == VerifyResult::Status::Accept);
    CHECK(v1.deferred == 2);
    CHECK(!rv.state().alive(2));

    RoundVerdict v2 = rv.process(hist({txn(4, 3, 0, {W("x", 99)})}));
    CHECK(v2.result.status == VerifyResult::Status::Accept);
    CHECK(v2.deferred == 0);
    CHECK(rv.state().alive(2));
    CHECK(rv.state().alive(3));
}

TEST_CASE("the deferral buffer cap is a hard error") {
    RoundsConfig cfg;
    cfg.defer_cap = 1;
    RoundVerifier rv(cfg);
    History h = hist({txn(1, 1, 0, {R("x", 91)}), txn(2, 2, 0, {R("x", 92)})});
    CHECK_THROWS_AS(rv.process(h), DeferOverflow);
}

TEST_CASE("checkpoints resume mid-stream with identical state") {
    WorkloadConfig cfg;
    cfg.benchmark = Benchmark::RMWOnly;
    cfg.num_sessions = 2;
    cfg.total_txns = 80;
    cfg.keys = 3;
    cfg.ops_per_txn = 2;
    cfg.fence_every = 8;
    cfg.seed = 5;
    History h = generate(cfg);
    std::vector<History> frags;
    for (std::size_t at = 0; at < h.txns.size(); at += 20) {
        History frag;
        for (std::size_t i = at; i < std::min(h.txns.size(), at + 20); ++i) frag.add(h.txns[i]);
        frags.push_back(std::move(frag));
    }

    RoundVerifier straight;
    for (const auto& f : frags) CHECK(straight.process(f).result.status ==
                                      VerifyResult::Status::Accept);

    RoundVerifier part1;
    part1.process(frags[0]);
    part1.process(frags[1]);
    std::ostringstream saved;
    part1.save_checkpoint(saved);
    std::istringstream in(saved.str());
    RoundVerifier resumed = RoundVerifier::load_checkpoint(in);
    CHECK(resumed.round_index() == 2);
    for (std::size_t i = 2; i < frags.size(); ++i)
        CHECK(resumed.process(frags[i]).result.status == VerifyResult::Status::Accept);
    CHECK(resumed.state().same_state(straight.state()));
}

TEST_CASE("fences survive deletion") {
    RoundVerifier rv;
    rv.process(stale_round1(true));
    for (TxnId id : {11, 12, 13, 21, 22, 23}) CHECK(rv.state().alive(id));
    for (TxnId id : rv.state().tombstones) CHECK(!rv.state().txns.count(id));
}
