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

#include "trmac/mac/frame.hpp"

namespace trmac::mac {

std::string_view to_string(FrameKind kind) noexcept {
    switch (kind) {
        case FrameKind::ProbeRequest: return "P_R";
        case FrameKind::Probe: return "PRO";
        case FrameKind::TrData: return "TR_DATA";
        case FrameKind::TrAck: return "TR_ACK";
        case FrameKind::Rts: return "RTS";
        case FrameKind::Cts: return "CTS";
        case FrameKind::Data: return "DATA";
        case FrameKind::Ack: return "ACK";
    }
    return "?";
}

Frame make_frame(FrameKind kind, NodeId src, NodeId dst, const FrameSizes& sizes,
                 std::optional<Packet> packet) {
    Frame f;
    f.kind = kind;
    f.src = src;
    f.dst = dst;
    if (carries_data(kind)) {
        if (!packet) throw InvalidArgument("data frame without a packet");
        if (packet->bits < 0) throw InvalidArgument("negative payload size");
        f.payload_bits = packet->bits;
    } else {
        f.header_bits = sizes.control_bits;
    }
    if (is_time_reversed(kind)) f.tr_basis = LinkId{src, dst};
    f.packet = std::move(packet);
    f.tx_duration = sizes.duration(f.payload_bits + f.header_bits);
    return f;
}

void MacTimers::validate() const {
    if (!(t_p > 0.0) || !(t_tr > 0.0) || !(delta > 0.0) || !(coherence > 0.0))
        throw InvalidArgument("MAC timers must be positive");
    if (n_max < 1) throw InvalidArgument("N_max must be at least 1");
}

}  // namespace trmac::mac
