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
#include <functional>
#include <variant>
#include <vector>

#include "trmac/channel.hpp"
#include "trmac/mac/frame.hpp"

namespace trmac::mac {

using TimerId = std::uint64_t;

/// Start `frame` after `delay` seconds, or when the radio frees up.
struct Transmit {
    Frame frame;
    double delay = 0.0;
};
struct ArmTimer {
    TimerId id = 0;
    double delay = 0.0;
};
struct CancelTimer {
    TimerId id = 0;
};
/// A data frame was received for the first time at this node.
struct DeliverUp {
    Packet packet;
};
/// The sender saw the acknowledgement for its head-of-line packet.
struct PacketDone {
    Packet packet;
};
struct PacketDropped {
    Packet packet;
};
/// A (re)transmission attempt began for a packet.
struct AttemptStarted {
    Packet packet;
    int retransmission = 0;
};

using Action = std::variant<Transmit, ArmTimer, CancelTimer, DeliverUp, PacketDone, PacketDropped,
                            AttemptStarted>;
using Actions = std::vector<Action>;

/// Per-node protocol state machine. Engines never see the event queue; they
/// react to calls and return the actions the simulator must carry out.
class MacEngine {
public:
    virtual ~MacEngine() = default;

    virtual Actions enqueue(const Packet& packet, NodeId next_hop, double now) = 0;
    /// `frame` was decoded here; `measured` is the channel from its source.
    virtual Actions on_receive(const Frame& frame, const channel::Cir& measured, double now) = 0;
    virtual Actions on_tx_end(const Frame& frame, double now) = 0;
    virtual Actions on_timer(TimerId id, double now) = 0;
    /// Physical carrier went from busy to idle.
    virtual Actions on_channel_idle(double /*now*/) { return {}; }

    /// Overheard frames of this kind should be decoded and passed up.
    virtual bool wants_overheard(FrameKind kind) const noexcept = 0;
    virtual std::size_t backlog() const noexcept = 0;
};

}  // namespace trmac::mac
