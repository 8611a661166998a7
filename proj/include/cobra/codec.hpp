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
#include <stdexcept>
#include <string>

#include "cobra/history.hpp"

namespace cobra {

// Line-oriented history format, one transaction per line:
//
//   T <txn_id> <session_id> <seq> <commit|abort> <fence|norm> <op>*
//
// where each op is `w:<key>:<write_id>` or `r:<key>:<write_id>`.
// Keys contain no whitespace and no colons; write ids are unsigned
// decimal and 0 denotes the initial value.

struct CodecError : std::runtime_error {
    enum class Kind { Syntax, DuplicateTxn, DuplicateWriteId, NonUniqueKeyAccess };
    Kind kind;
    std::size_t line;  // 1-based; 0 when not line-specific
    CodecError(Kind k, std::size_t ln, const std::string& msg)
        : std::runtime_error(msg), kind(k), line(ln) {}
};

// Parses a history stream. Aborted transactions are dropped after
// validation. Throws CodecError.
History parse_history(std::istream& in);
History parse_history(const std::string& text);

// Canonical form: transactions ordered by (session, seq), `\n` endings,
// no header. parse(serialize(h)) == h for every valid h.
std::string serialize_history(const History& h);
void serialize_history(const History& h, std::ostream& out);

// Renders one transaction as a history line (no trailing newline).
std::string format_txn(const Transaction& t);

}  // namespace cobra
