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

#include "cobra/codec.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace cobra {

namespace {

using Kind = CodecError::Kind;

[[noreturn]] void syntax(std::size_t line, const std::string& what) {
    throw CodecError(Kind::Syntax, line, "line " + std::to_string(line) + ": " + what);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream iss(s);
    std::string tok;
    while (iss >> tok) out.push_back(tok);
    return out;
}

std::uint64_t parse_u64(const std::string& s, std::size_t line, const char* field) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        syntax(line, std::string("bad ") + field + " '" + s + "'");
    return v;
}

Operation parse_op(const std::string& tok, std::size_t line) {
    // w:<key>:<write_id> or r:<key>:<write_id>
    if (tok.size() < 5 || tok[1] != ':') syntax(line, "bad op '" + tok + "'");
    Operation op;
    if (tok[0] == 'w')
        op.kind = Operation::Kind::Write;
    else if (tok[0] == 'r')
        op.kind = Operation::Kind::Read;
    else
        syntax(line, "bad op kind in '" + tok + "'");
    auto last = tok.rfind(':');
    if (last == 1) syntax(line, "bad op '" + tok + "'");
    op.key = tok.substr(2, last - 2);
    if (op.key.empty() || op.key.find(':') != std::string::npos)
        syntax(line, "bad key in '" + tok + "'");
    op.write_id = parse_u64(tok.substr(last + 1), line, "write_id");
    return op;
}

}  // namespace

History parse_history(std::istream& in) {
    History h;
    std::unordered_set<TxnId> seen_txn;
    std::unordered_set<WriteId> seen_write;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto toks = split_ws(line);
        if (toks.empty()) continue;
        if (toks[0] != "T" || toks.size() < 6)
            syntax(lineno, "expected 'T <txn> <session> <seq> <commit|abort> <fence|norm> <op>*'");
        Transaction t;
        t.id = parse_u64(toks[1], lineno, "txn_id");
        t.session = static_cast<SessionId>(parse_u64(toks[2], lineno, "session_id"));
        t.seq = static_cast<std::uint32_t>(parse_u64(toks[3], lineno, "seq"));
        if (toks[4] == "commit")
            t.committed = true;
        else if (toks[4] == "abort")
            t.committed = false;
        else
            syntax(lineno, "expected 'commit' or 'abort', got '" + toks[4] + "'");
        if (toks[5] == "fence")
            t.fence = true;
        else if (toks[5] == "norm")
            t.fence = false;
        else
            syntax(lineno, "expected 'fence' or 'norm', got '" + toks[5] + "'");
        for (std::size_t i = 6; i < toks.size(); ++i) t.ops.push_back(parse_op(toks[i], lineno));

        if (t.id == kInitialTxn) syntax(lineno, "txn id 0 is reserved");
        if (!seen_txn.insert(t.id).second)
            throw CodecError(Kind::DuplicateTxn, lineno,
                             "duplicate txn id " + std::to_string(t.id));
        if (auto err = t.check_shape()) {
            // Double-access errors carry their own kind.
            bool dup_access = err->find("twice") != std::string::npos ||
                              err->find("after writing") != std::string::npos;
            throw CodecError(dup_access ? Kind::NonUniqueKeyAccess : Kind::Syntax, lineno, *err);
        }
        if (!t.committed) continue;
        for (const auto& op : t.ops)
            if (op.kind == Operation::Kind::Write && !seen_write.insert(op.write_id).second)
                throw CodecError(Kind::DuplicateWriteId, lineno,
                                 "duplicate write id " + std::to_string(op.write_id));
        h.add(std::move(t));
    }
    h.canonicalize();
    return h;
}

History parse_history(const std::string& text) {
    std::istringstream iss(text);
    return parse_history(iss);
}

std::string format_txn(const Transaction& t) {
    std::ostringstream os;
    os << "T " << t.id << ' ' << t.session << ' ' << t.seq << ' '
       << (t.committed ? "commit" : "abort") << ' ' << (t.fence ? "fence" : "norm");
    for (const auto& op : t.ops) {
        os << ' ' << (op.kind == Operation::Kind::Write ? 'w' : 'r') << ':' << op.key << ':'
           << op.write_id;
    }
    return os.str();
}

void serialize_history(const History& h, std::ostream& out) {
    History sorted = h;
    sorted.canonicalize();
    for (const auto& t : sorted.txns) out << format_txn(t) << '\n';
}

std::string serialize_history(const History& h) {
    std::ostringstream os;
    serialize_history(h, os);
    return os.str();
}

}  // namespace cobra
