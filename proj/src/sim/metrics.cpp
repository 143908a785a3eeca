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

#include "trmac/sim/metrics.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>

namespace trmac::sim {

std::string_view to_string(TraceKind kind) noexcept {
    switch (kind) {
        case TraceKind::PacketGenerated: return "generated";
        case TraceKind::AttemptStarted: return "attempt";
        case TraceKind::TxStart: return "tx_start";
        case TraceKind::RxSuccess: return "rx_ok";
        case TraceKind::RxFailure: return "rx_fail";
        case TraceKind::DataReceived: return "data_rx";
        case TraceKind::Delivered: return "delivered";
        case TraceKind::Forwarded: return "forwarded";
        case TraceKind::PacketDone: return "acked";
        case TraceKind::Dropped: return "dropped";
    }
    return "?";
}

std::string format_trace(const TraceRecord& r) {
    char buf[256];
    const auto frame = r.frame ? mac::to_string(*r.frame) : std::string_view("-");
    const int n = std::snprintf(
        buf, sizeof buf,
        "{\"t\":%.9f,\"node\":%u,\"event\":\"%s\",\"frame\":\"%.*s\",\"src\":%u,\"dst\":%u,"
        "\"packet\":%" PRIu64 ",\"flow\":%u,\"hop\":%u,\"value\":%.9g}",
        r.time, r.node, std::string(to_string(r.kind)).c_str(), static_cast<int>(frame.size()),
        frame.data(), r.src, r.dst, r.packet, r.flow, r.hop, r.value);
    return std::string(buf, static_cast<std::size_t>(std::max(n, 0)));
}

double MetricsRecord::mean_delay() const noexcept {
    if (delays.empty()) return 0.0;
    double acc = 0.0;
    for (double d : delays) acc += d;
    return acc / static_cast<double>(delays.size());
}

double MetricsRecord::drop_ratio() const noexcept {
    return attempts == 0 ? 0.0 : static_cast<double>(dropped) / static_cast<double>(attempts);
}

double MetricsRecord::throughput() const noexcept {
    return busy_time > 0.0 ? received_bits / busy_time : 0.0;
}

MetricsCollector::MetricsCollector(std::size_t flow_count, double duration, double bin_width,
                                   double warmup)
    : flow_count_(flow_count), duration_(duration), bin_width_(bin_width), warmup_(warmup) {
    m_.duration = duration;
    m_.flows.resize(flow_count);
}

void MetricsCollector::observe(const TraceRecord& r) {
    if (r.time < warmup_) return;
    auto flow = [&]() -> FlowCounts* {
        return r.flow < flow_count_ ? &m_.flows[r.flow] : nullptr;
    };
    switch (r.kind) {
        case TraceKind::PacketGenerated:
            ++m_.generated;
            if (auto* f = flow()) ++f->generated;
            break;
        case TraceKind::AttemptStarted:
            ++m_.attempts;
            attempt_times_.push_back(r.time);
            break;
        case TraceKind::TxStart: {
            if (!r.frame || !mac::carries_data(*r.frame)) break;
            const double start = r.time;
            const double end = std::min(r.value, duration_);
            if (!(end > start)) break;
            if (!busy_.empty() && start <= busy_.back().second)
                busy_.back().second = std::max(busy_.back().second, end);
            else
                busy_.emplace_back(start, end);
            break;
        }
        case TraceKind::DataReceived:
            ++m_.data_frames_received;
            received_.emplace(r.packet, r.hop);
            m_.received_bits += r.bits;
            bits_log_.push_back({r.time, static_cast<double>(r.bits)});
            break;
        case TraceKind::Delivered:
            ++m_.delivered;
            m_.delays.push_back(r.value);
            delay_log_.push_back({r.time, r.value});
            if (auto* f = flow()) ++f->delivered;
            break;
        case TraceKind::Dropped:
            if (received_.count({r.packet, r.hop})) {
                ++m_.ack_losses;
                break;
            }
            ++m_.dropped;
            drop_times_.push_back(r.time);
            if (auto* f = flow()) ++f->dropped;
            break;
        default:
            break;
    }
}

MetricsRecord MetricsCollector::finish() const {
    MetricsRecord out = m_;
    out.busy_time = 0.0;
    for (const auto& [s, e] : busy_) out.busy_time += e - s;

    const double span = duration_ - warmup_;
    if (span <= 0.0) return out;
    const auto bins = static_cast<std::size_t>(std::ceil(span / bin_width_ - 1e-9));
    std::size_t di = 0, dr = 0, at = 0, bi = 0;
    double delay_sum = 0.0, bits = 0.0;
    for (std::size_t k = 0; k < bins; ++k) {
        const double end = std::min(warmup_ + (static_cast<double>(k) + 1.0) * bin_width_, duration_);
        while (di < delay_log_.size() && delay_log_[di].time < end) delay_sum += delay_log_[di++].value;
        while (dr < drop_times_.size() && drop_times_[dr] < end) ++dr;
        while (at < attempt_times_.size() && attempt_times_[at] < end) ++at;
        while (bi < bits_log_.size() && bits_log_[bi].time < end) bits += bits_log_[bi++].value;
        double busy = 0.0;
        for (const auto& [s, e] : busy_) {
            if (s >= end) break;
            busy += std::min(e, end) - s;
        }
        MetricsBin b;
        b.end = end;
        b.delivered = di;
        b.mean_delay = di ? delay_sum / static_cast<double>(di) : 0.0;
        b.drop_ratio = at ? static_cast<double>(dr) / static_cast<double>(at) : 0.0;
        b.throughput = busy > 0.0 ? bits / busy : 0.0;
        out.bins.push_back(b);
    }
    return out;
}

MetricsRecord collect_metrics(std::span<const TraceRecord> trace, std::size_t flow_count,
                              double duration, double bin_width, double warmup) {
    MetricsCollector c(flow_count, duration, bin_width, warmup);
    for (const auto& r : trace) c.observe(r);
    return c.finish();
}

}  // namespace trmac::sim
