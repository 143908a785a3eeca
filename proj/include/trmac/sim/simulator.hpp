// Copyright 2026 The trmac-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

#include "trmac/channel.hpp"
#include "trmac/mac/frame.hpp"
#include "trmac/sim/metrics.hpp"
#include "trmac/sim/scenario.hpp"
#include "trmac/tr_phy.hpp"

namespace trmac::sim {

/// A frame as it impinges on one receiver.
struct IncomingFrame {
    mac::FrameKind kind = mac::FrameKind::ProbeRequest;
    NodeId src = 0;
    std::optional<LinkId> tr_basis;
    double start = 0.0;  ///< first sample at the receiver
    double end = 0.0;    ///< last sample at the receiver
};

struct ReceptionOutcome {
    bool success = false;
    double sinr = 0.0;
    double interference = 0.0;  ///< worst-case concurrent interference, watts
};

/// SINR bookkeeping for receptions over a fixed channel table. Correlation
/// terms are cached per (transmitter, receiver, matched link).
class Adjudicator {
public:
    Adjudicator(const channel::ChannelTable& channels, phy::PhyConfig phy);

    /// Power a frame contributes at `receiver`, in watts. TR frames contribute
    /// their inter-link interference power; direct frames their retained-tap
    /// power.
    double received_power(NodeId receiver, const IncomingFrame& frame);

    /// Success requires: the victim was not transmitting during the frame, and
    /// the SINR against the worst instant of concurrent interference is at
    /// least the minimum required SINR.
    ReceptionOutcome adjudicate(NodeId victim, const IncomingFrame& frame,
                                std::span<const IncomingFrame> concurrent,
                                std::span<const std::pair<double, double>> victim_transmissions);

    const phy::CorrelationTerms& terms(NodeId tx, NodeId rx, LinkId basis);

private:
    const channel::ChannelTable& channels_;
    phy::PhyConfig phy_;
    std::map<std::tuple<NodeId, NodeId, NodeId, NodeId>, phy::CorrelationTerms> terms_;
    std::map<std::pair<NodeId, NodeId>, phy::SdtTerms> sdt_;
};

struct RunOutput {
    MetricsRecord metrics;
    std::uint64_t trace_hash = 0;
    std::uint64_t events = 0;
    std::uint64_t conflict_deferrals = 0;  ///< TRMAC threshold deferrals
    std::uint64_t probe_reuses = 0;
};

struct RunOptions {
    std::ostream* trace = nullptr;             ///< NDJSON event trace
    std::vector<TraceRecord>* records = nullptr;
};

/// Runs a materialized, valid scenario to run.duration. Throws ConfigError
/// before any event executes when the scenario is invalid.
RunOutput run(const Scenario& scenario, const RunOptions& options = {});

}  // namespace trmac::sim
