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
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trmac/mac/frame.hpp"

namespace trmac::sim {

enum class TraceKind : std::uint8_t {
    PacketGenerated,
    AttemptStarted,
    TxStart,
    RxSuccess,
    RxFailure,
    DataReceived,  ///< first correct reception of a data frame at a hop
    Delivered,     ///< reached the final destination
    Forwarded,
    PacketDone,
    Dropped,
};

std::string_view to_string(TraceKind kind) noexcept;

/// One line of the event trace. `value` is kind-specific: end-to-end delay for
/// Delivered, end of the busy interval for a data TxStart, SINR for receptions.
struct TraceRecord {
    double time = 0.0;
    NodeId node = 0;
    TraceKind kind = TraceKind::PacketGenerated;
    std::optional<mac::FrameKind> frame;
    NodeId src = 0;
    NodeId dst = 0;
    std::uint64_t packet = 0;
    std::uint32_t flow = 0;
    std::uint32_t hop = 0;  ///< route hop the packet is on
    int bits = 0;
    double value = 0.0;
};

/// Newline-free JSON object for the trace stream.
std::string format_trace(const TraceRecord& r);

struct FlowCounts {
    std::uint64_t generated = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped = 0;
};

struct MetricsBin {
    double end = 0.0;  ///< cumulative values cover [warmup, end)
    double mean_delay = 0.0;
    double drop_ratio = 0.0;
    double throughput = 0.0;
    std::uint64_t delivered = 0;
};

struct MetricsRecord {
    double duration = 0.0;
    std::vector<double> delays;  ///< end-to-end delay per delivered packet, in delivery order
    std::uint64_t generated = 0;
    std::uint64_t delivered = 0;
    /// Packets given up on at some hop before the next hop ever received them.
    /// A sender that exhausts its retries after a lost acknowledgement does
    /// not lose the packet, so that case is counted in ack_losses instead.
    std::uint64_t dropped = 0;
    std::uint64_t ack_losses = 0;
    std::uint64_t attempts = 0;  ///< data transmission attempts including retransmissions
    std::uint64_t data_frames_received = 0;
    double received_bits = 0.0;
    double busy_time = 0.0;
    std::vector<FlowCounts> flows;
    std::vector<MetricsBin> bins;

    double mean_delay() const noexcept;
    /// Dropped packets over data transmission attempts; 0 when nothing was sent.
    double drop_ratio() const noexcept;
    /// Correctly received payload bits per second of busy time; 0 when idle.
    double throughput() const noexcept;
    std::uint64_t in_flight() const noexcept { return generated - delivered - dropped; }
};

/// Folds trace records (in time order) into metrics.
class MetricsCollector {
public:
    MetricsCollector(std::size_t flow_count, double duration, double bin_width = 100.0,
                     double warmup = 0.0);

    void observe(const TraceRecord& r);
    MetricsRecord finish() const;

private:
    struct Stamp {
        double time;
        double value;
    };

    std::size_t flow_count_;
    double duration_;
    double bin_width_;
    double warmup_;
    MetricsRecord m_;
    std::vector<Stamp> delay_log_;
    std::vector<double> drop_times_;
    std::vector<double> attempt_times_;
    std::vector<Stamp> bits_log_;
    std::vector<std::pair<double, double>> busy_;  ///< merged, in start order
    std::set<std::pair<std::uint64_t, std::uint32_t>> received_;  ///< (packet, hop)
};

MetricsRecord collect_metrics(std::span<const TraceRecord> trace, std::size_t flow_count,
                              double duration, double bin_width = 100.0, double warmup = 0.0);

}  // namespace trmac::sim
