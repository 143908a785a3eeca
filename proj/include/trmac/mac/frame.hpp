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
#include <string_view>

#include "trmac/common.hpp"

namespace trmac::mac {

enum class FrameKind : std::uint8_t { ProbeRequest, Probe, TrData, TrAck, Rts, Cts, Data, Ack };

std::string_view to_string(FrameKind kind) noexcept;

/// TR_DATA and TR_ACK are shaped by a time-reversed CIR; everything else is a
/// plain direct transmission.
constexpr bool is_time_reversed(FrameKind kind) noexcept {
    return kind == FrameKind::TrData || kind == FrameKind::TrAck;
}

constexpr bool carries_data(FrameKind kind) noexcept {
    return kind == FrameKind::TrData || kind == FrameKind::Data;
}

/// Application packet travelling along a static route.
struct Packet {
    std::uint64_t id = 0;
    std::uint32_t flow = 0;
    NodeId origin = 0;
    NodeId destination = 0;
    double created_at = 0.0;
    int bits = 0;
    std::uint32_t hop = 0;  ///< index of the transmitting node on the route
};

/// Victim-side quantities a probe carries so overhearing nodes can evaluate
/// the cross-correlation threshold.
struct Piggyback {
    double victim_link_norm = 0.0;
    double victim_autocorr_offpeak_sum = 0.0;
};

struct Frame {
    FrameKind kind = FrameKind::ProbeRequest;
    NodeId src = 0;
    NodeId dst = 0;
    int payload_bits = 0;
    int header_bits = 0;
    double tx_duration = 0.0;
    std::optional<Piggyback> piggyback;
    std::optional<LinkId> tr_basis;
    std::optional<Packet> packet;
};

struct FrameSizes {
    double data_rate = 512.0;  ///< bits per second
    int control_bits = 32;

    double duration(int bits) const noexcept { return bits / data_rate; }
};

/// Builds a frame with its airtime derived from the bit count. Throws
/// InvalidArgument when a TR frame lacks a basis link or bits are negative.
Frame make_frame(FrameKind kind, NodeId src, NodeId dst, const FrameSizes& sizes,
                 std::optional<Packet> packet = std::nullopt);

/// Protocol timing. T_cl and T_th are derived so their identities always hold.
struct MacTimers {
    double t_p = 1000.0 / 1500.0;  ///< maximum one-hop propagation delay
    double t_tr = 0.5;             ///< TR_DATA airtime
    double delta = 0.25;           ///< guard time
    double coherence = 30.0;       ///< T, bound on probe reuse
    int n_max = 3;

    double t_cl() const noexcept { return t_p + t_tr + delta; }
    double t_th() const noexcept { return 2.0 * t_p + t_tr + delta; }

    void validate() const;
};

}  // namespace trmac::mac
