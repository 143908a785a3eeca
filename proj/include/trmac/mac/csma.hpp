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

#include <deque>
#include <functional>
#include <optional>
#include <set>
#include <unordered_set>
#include <utility>

#include "trmac/mac/engine.hpp"
#include "trmac/rng.hpp"

namespace trmac::mac {

enum class CsmaVariant {
    Standard,    ///< maximum backoff 2^i s at the i-th retransmission
    Simplified,  ///< constant maximum backoff
};

struct CsmaConfig {
    CsmaVariant variant = CsmaVariant::Standard;
    double backoff_unit = 1.0;       ///< seconds; standard window is unit * 2^i
    double constant_backoff = 2.0;   ///< seconds; simplified window
    bool virtual_carrier_sense = true;
};

/// RTS/CTS/DATA/ACK handshake with physical carrier sensing, binary
/// exponential (or constant) backoff, and an optional NAV from overheard
/// RTS/CTS frames.
class CsmaEngine final : public MacEngine {
public:
    using SenseFn = std::function<bool()>;

    CsmaEngine(NodeId self, std::set<NodeId> neighbors, MacTimers timers, FrameSizes sizes,
               CsmaConfig config, std::uint64_t rng_seed, SenseFn carrier_busy);

    Actions enqueue(const Packet& packet, NodeId next_hop, double now) override;
    Actions on_receive(const Frame& frame, const channel::Cir& measured, double now) override;
    Actions on_tx_end(const Frame& frame, double now) override;
    Actions on_timer(TimerId id, double now) override;
    Actions on_channel_idle(double now) override;

    bool wants_overheard(FrameKind kind) const noexcept override {
        return config_.virtual_carrier_sense && (kind == FrameKind::Rts || kind == FrameKind::Cts);
    }
    std::size_t backlog() const noexcept override {
        return queue_.size() + (current_ ? 1 : 0);
    }

    /// Upper edge of the backoff window for retransmission index i.
    double max_backoff(int retransmission) const noexcept;
    /// Draws a backoff uniformly from [0, max_backoff(i)].
    double draw_backoff(int retransmission);

    enum class SendState { Idle, WaitIdle, Backoff, AwaitCts, AwaitAck };
    SendState send_state() const noexcept { return state_; }
    double nav_until() const noexcept { return nav_until_; }

private:
    struct Current {
        Packet packet;
        NodeId next_hop = 0;
        int retries = 0;
    };

    bool busy(double now) const;
    void start_next(double now, Actions& out);
    void try_access(double now, Actions& out);
    void wait_for_idle(double now, Actions& out);
    void send_rts(Actions& out);
    void retry_or_drop(double now, Actions& out);
    void finish(Actions& out);
    void stop_responding(double now, Actions& out);
    void recheck(double now, Actions& out);
    TimerId arm(double delay, Actions& out);
    void cancel(TimerId& id, Actions& out);

    NodeId self_;
    std::set<NodeId> neighbors_;
    MacTimers timers_;
    FrameSizes sizes_;
    CsmaConfig config_;
    Rng rng_;
    SenseFn carrier_busy_;

    std::deque<std::pair<Packet, NodeId>> queue_;
    std::optional<Current> current_;
    SendState state_ = SendState::Idle;
    TimerId send_timer_ = 0;
    TimerId nav_timer_ = 0;
    double nav_until_ = 0.0;

    std::optional<NodeId> responding_to_;
    TimerId respond_timer_ = 0;
    bool respond_pending_ = false;

    std::unordered_set<std::uint64_t> delivered_;
    TimerId next_timer_ = 1;
};

}  // namespace trmac::mac
