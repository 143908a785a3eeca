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
#include <map>
#include <optional>
#include <set>
#include <unordered_set>
#include <utility>

#include "trmac/mac/engine.hpp"
#include "trmac/rng.hpp"
#include "trmac/tr_phy.hpp"

namespace trmac::mac {

/// A probe heard from `origin`, kept for waveform reuse and threshold checks.
struct ProCacheEntry {
    NodeId origin = 0;
    NodeId addressed_to = 0;
    channel::Cir cir;  ///< channel between origin and this node
    std::optional<Piggyback> piggyback;
    double received_at = 0.0;
};

/// Time-reversal MAC. The sender requests a probe, reuses cached probes
/// younger than T, and defers its TR_DATA when its waveform would correlate too
/// strongly with the channel to a receiver that recently announced a reception.
class TrmacEngine final : public MacEngine {
public:
    /// Retransmissions wait an extra uniform draw from [0, retry_jitter) so
    /// that backlogged senders with identical timeouts do not stay phase-locked.
    TrmacEngine(NodeId self, std::set<NodeId> neighbors, MacTimers timers, FrameSizes sizes,
                phy::PhyConfig phy, double retry_jitter = 0.0, std::uint64_t rng_seed = 0);

    Actions enqueue(const Packet& packet, NodeId next_hop, double now) override;
    Actions on_receive(const Frame& frame, const channel::Cir& measured, double now) override;
    Actions on_tx_end(const Frame& frame, double now) override;
    Actions on_timer(TimerId id, double now) override;

    bool wants_overheard(FrameKind kind) const noexcept override {
        return kind == FrameKind::Probe;
    }
    std::size_t backlog() const noexcept override {
        return queue_.size() + (current_ ? 1 : 0);
    }

    /// Deferral before TR_DATA for the head-of-line packet.
    double backoff(double now);

    enum class SendState { Idle, AwaitProbe, Backoff, AwaitAck };
    SendState send_state() const noexcept { return state_; }
    int retransmissions() const noexcept { return current_ ? current_->retries : 0; }
    std::optional<NodeId> reserved_for() const noexcept { return reserved_for_; }
    std::size_t deferred_requests() const noexcept { return deferred_.size(); }
    const std::map<NodeId, ProCacheEntry>& pro_cache() const noexcept { return cache_; }
    /// Number of times a conflicting probe forced a longer deferral.
    std::uint64_t conflict_deferrals() const noexcept { return conflict_deferrals_; }
    std::uint64_t probe_reuses() const noexcept { return probe_reuses_; }

private:
    struct Current {
        Packet packet;
        NodeId next_hop = 0;
        int retries = 0;
        double t_pro_next_hop = 0.0;
    };
    struct Deferred {
        NodeId requester;
        channel::Cir measured;
    };

    void start_next(double now, Actions& out);
    void begin_access(double now, Actions& out);
    void send_probe_request(Actions& out, double delay = 0.0);
    void schedule_data(double now, Actions& out);
    void send_data(Actions& out, double delay = 0.0);
    void retry_or_drop(double now, Actions& out);
    void finish(Actions& out);
    void reply_probe(NodeId requester, const channel::Cir& measured, Actions& out);
    void release_reservation(double now, Actions& out);
    TimerId arm(double delay, Actions& out);
    void cancel(TimerId& id, Actions& out);

    NodeId self_;
    std::set<NodeId> neighbors_;
    MacTimers timers_;
    FrameSizes sizes_;
    phy::PhyConfig phy_;
    double retry_jitter_;
    Rng rng_;

    std::deque<std::pair<Packet, NodeId>> queue_;
    std::optional<Current> current_;
    SendState state_ = SendState::Idle;
    TimerId send_timer_ = 0;

    std::map<NodeId, ProCacheEntry> cache_;

    std::optional<NodeId> reserved_for_;
    TimerId reservation_timer_ = 0;
    bool reservation_probe_pending_ = false;
    std::deque<Deferred> deferred_;

    std::unordered_set<std::uint64_t> delivered_;
    TimerId next_timer_ = 1;
    std::uint64_t conflict_deferrals_ = 0;
    std::uint64_t probe_reuses_ = 0;
};

}  // namespace trmac::mac
