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

#include <iosfwd>
#include <limits>
#include <map>
#include <vector>

#include "cobra/history.hpp"
#include "cobra/verifier.hpp"

namespace cobra {

inline constexpr long long kInfEpoch = std::numeric_limits<long long>::max();

struct EpochInfo {
    std::map<TxnId, long long> epoch;
    // Smallest last-fence epoch over all sessions; -1 when some session
    // has no fence yet, which disables deletion entirely.
    long long epoch_agree = -1;
};

// Numbers fence transactions along the EPOCH-write chain in topological
// order; read-only fences inherit from the fence they read; a normal
// txn sits one epoch below its session's next fence, or at infinity
// after the last one. Requires an acyclic, accepted state.
EpochInfo assign_epochs(const ExtendedHistory& e);

// Strongly connected components of the known graph plus every edge of
// every surviving constraint.
std::vector<std::vector<TxnId>> gen_psccs(const std::vector<Constraint>& con,
                                          const ExtendedHistory& e);

struct GcStats {
    std::size_t deleted = 0;
    std::size_t live_after = 0;
    long long epoch_agree = -1;
};

// Deletes transactions that are frozen, fully superseded (read-only or
// obsolete on every written key), grouped with like components, and not
// fences. Deleting a txn splices its predecessors to its successors so
// reachability among survivors is preserved, and keeps RMW-successor
// entries whose writer survives as markers.
GcStats mark_and_delete(ExtendedHistory& e, const std::vector<Constraint>& con,
                        const EpochInfo& epochs);

struct RoundsConfig {
    VerifyOptions verify;
    bool gc = true;
    std::size_t defer_cap = 100000;
};

struct RoundVerdict {
    std::size_t round = 0;
    VerifyResult result;
    std::size_t live_set = 0;
    std::size_t deleted = 0;
    std::size_t deferred = 0;
};

struct DeferOverflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Streaming verifier: feed continuations one round at a time. State
// persists across rounds; a Reject leaves the verifier unusable.
class RoundVerifier {
public:
    explicit RoundVerifier(RoundsConfig cfg = {}) : cfg_(std::move(cfg)) {}

    RoundVerdict process(const History& fragment);

    const ExtendedHistory& state() const { return e_; }
    std::size_t round_index() const { return round_; }
    const std::vector<Transaction>& deferred() const { return deferred_; }

    void save_checkpoint(std::ostream& out) const;
    static RoundVerifier load_checkpoint(std::istream& in, RoundsConfig cfg = {});

private:
    RoundsConfig cfg_;
    ExtendedHistory e_;
    std::vector<Transaction> deferred_;
    std::size_t round_ = 0;
};

}  // namespace cobra
