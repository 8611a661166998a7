#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cobra/history.hpp"

namespace testutil {

using namespace cobra;

inline Operation R(const std::string& k, WriteId w) {
    return Operation{Operation::Kind::Read, k, w};
}

inline Operation W(const std::string& k, WriteId w) {
    return Operation{Operation::Kind::Write, k, w};
}

inline Transaction txn(TxnId id, SessionId s, std::uint32_t seq, std::vector<Operation> ops,
                       bool fence = false) {
    Transaction t;
    t.id = id;
    t.session = s;
    t.seq = seq;
    t.fence = fence;
    t.ops = std::move(ops);
    return t;
}

// Fence reading the previous fence's EPOCH write (0 = initial value).
inline Transaction fence(TxnId id, SessionId s, std::uint32_t seq, WriteId reads,
                         WriteId writes) {
    return txn(id, s, seq, {R(kEpochKey, reads), W(kEpochKey, writes)}, true);
}

inline History hist(std::vector<Transaction> txns) {
    History h;
    for (auto& t : txns) h.add(std::move(t));
    h.canonicalize();
    return h;
}

// Random small history: valid shape, reads resolve to some write of the
// key (possibly a later txn's, possibly the initial value), but with no
// serializability guarantee. Covers reads, blind writes, RMWs, and
// optionally a chained fence per session.
inline History random_history(std::mt19937_64& rng, int max_txns = 8, int max_sessions = 3,
                              int max_keys = 3, bool with_fences = false) {
    const int n = 1 + static_cast<int>(rng() % max_txns);
    const int sessions = 1 + static_cast<int>(rng() % max_sessions);
    const int keys = 1 + static_cast<int>(rng() % max_keys);

    struct Slot {
        int t;
        std::string key;
        int mode;  // 0 read, 1 write, 2 rmw
    };
    std::vector<Transaction> txns(n);
    std::vector<std::uint32_t> seq(sessions + 1, 0);
    std::vector<Slot> slots;
    std::map<std::string, std::vector<std::pair<int, WriteId>>> writes;  // key -> (txn, wid)
    WriteId wid = 1;

    for (int i = 0; i < n; ++i) {
        txns[i].id = static_cast<TxnId>(i + 1);
        txns[i].session = 1 + static_cast<SessionId>(rng() % sessions);
        txns[i].seq = seq[txns[i].session]++;
        int nkeys = 1 + static_cast<int>(rng() % 2);
        std::set<int> chosen;
        while (static_cast<int>(chosen.size()) < std::min(nkeys, keys))
            chosen.insert(static_cast<int>(rng() % keys));
        for (int k : chosen) {
            Slot s{i, "k" + std::to_string(k), static_cast<int>(rng() % 3)};
            if (s.mode != 0) writes[s.key].emplace_back(i, wid++);
            slots.push_back(s);
        }
    }

    // Reads reference a random write of the key (not the reader's own),
    // or the initial value.
    auto pick_read = [&](const Slot& s) -> WriteId {
        std::vector<WriteId> opts{kInitialWrite};
        for (auto [t, w] : writes[s.key])
            if (t != s.t) opts.push_back(w);
        return opts[rng() % opts.size()];
    };
    std::size_t wi = 0;
    std::vector<std::size_t> write_at(slots.size(), 0);
    for (std::size_t i = 0; i < slots.size(); ++i)
        if (slots[i].mode != 0) write_at[i] = wi++;
    // Recover the wid assigned to each writing slot in order.
    std::map<std::string, std::size_t> next_of_key;
    std::vector<WriteId> slot_wid(slots.size(), 0);
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i].mode == 0) continue;
        slot_wid[i] = writes[slots[i].key][next_of_key[slots[i].key]++].second;
    }
    for (std::size_t i = 0; i < slots.size(); ++i) {
        const Slot& s = slots[i];
        if (s.mode != 1) txns[s.t].ops.push_back(R(s.key, pick_read(s)));
    }
    for (std::size_t i = 0; i < slots.size(); ++i) {
        const Slot& s = slots[i];
        if (s.mode != 0) txns[s.t].ops.push_back(W(s.key, slot_wid[i]));
    }

    History h;
    for (auto& t : txns) h.add(std::move(t));

    if (with_fences) {
        // One fence per session, chained in random session order.
        std::vector<SessionId> order;
        for (SessionId s = 1; s <= static_cast<SessionId>(sessions); ++s) order.push_back(s);
        std::shuffle(order.begin(), order.end(), rng);
        WriteId prev = kInitialWrite;
        TxnId fid = static_cast<TxnId>(n) + 1;
        for (SessionId s : order) {
            WriteId w = wid++;
            h.add(fence(fid++, s, seq[s]++, prev, w));
            prev = w;
        }
    }
    h.canonicalize();
    return h;
}

}  // namespace testutil
