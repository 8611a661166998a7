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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cobra/codec.hpp"
#include "cobra/oracle.hpp"
#include "cobra/verifier.hpp"
#include "cobra/workload.hpp"

namespace py = pybind11;

namespace {

py::dict verify_text(const std::string& text, bool session_order, bool prune) {
    cobra::History h = cobra::parse_history(text);
    cobra::VerifyOptions opts;
    opts.session_order = session_order;
    opts.prune = prune;
    cobra::VerifyResult r = cobra::verify(h, opts);
    py::dict d;
    d["status"] = r.status == cobra::VerifyResult::Status::Accept ? "accept"
                  : r.status == cobra::VerifyResult::Status::Reject ? "reject"
                                                                    : "time-budget-exceeded";
    d["reason"] = r.reason;
    d["cycles"] = r.cycles;
    d["schedule"] = r.schedule;
    return d;
}

std::string generate_text(const std::string& benchmark, int sessions, int txns, int keys,
                          int fence_every, std::uint64_t seed) {
    auto b = cobra::parse_benchmark(benchmark);
    if (!b) throw py::value_error("unknown benchmark '" + benchmark + "'");
    cobra::WorkloadConfig cfg;
    cfg.benchmark = *b;
    cfg.num_sessions = sessions;
    cfg.total_txns = txns;
    cfg.keys = keys;
    cfg.fence_every = fence_every;
    cfg.seed = seed;
    return cobra::serialize_history(cobra::generate(cfg));
}

std::string inject_text(const std::string& text, const std::string& anomaly,
                        std::uint64_t seed) {
    auto k = cobra::parse_anomaly(anomaly);
    if (!k) throw py::value_error("unknown anomaly '" + anomaly + "'");
    cobra::History h = cobra::parse_history(text);
    return cobra::serialize_history(cobra::inject(h, *k, seed).history);
}

bool oracle_text(const std::string& text, bool respect_sessions) {
    return cobra::oracle_serializable(cobra::parse_history(text), respect_sessions);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "serializability checking for client-observed transaction histories";
    m.def("verify", &verify_text, py::arg("history"), py::arg("session_order") = true,
          py::arg("prune") = true,
          "Check a history (text form) and return the verdict as a dict.");
    m.def("generate", &generate_text, py::arg("benchmark"), py::arg("sessions") = 2,
          py::arg("txns") = 100, py::arg("keys") = 100, py::arg("fence_every") = 20,
          py::arg("seed") = 0, "Generate a serializable benchmark history (text form).");
    m.def("inject", &inject_text, py::arg("history"), py::arg("anomaly"), py::arg("seed") = 0,
          "Mutate a history to exhibit an anomaly.");
    m.def("oracle_serializable", &oracle_text, py::arg("history"),
          py::arg("respect_sessions") = true,
          "Small-scale ground truth by schedule enumeration.");
}
