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

#include "trmac/mac/trmac.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace trmac::mac {

TrmacEngine::TrmacEngine(NodeId self, std::set<NodeId> neighbors, MacTimers timers,
                         FrameSizes sizes, phy::PhyConfig phy, double retry_jitter,
                         std::uint64_t rng_seed)
    : self_(self),
      neighbors_(std::move(neighbors)),
      timers_(timers),
      sizes_(sizes),
      phy_(phy),
      retry_jitter_(retry_jitter),
      rng_(rng_seed) {
    timers_.validate();
    phy_.validate();
    if (!(retry_jitter_ >= 0.0)) throw InvalidArgument("retry jitter must be >= 0");
}

TimerId TrmacEngine::arm(double delay, Actions& out) {
    const TimerId id = next_timer_++;
    out.push_back(ArmTimer{id, delay});
    return id;
}

void TrmacEngine::cancel(TimerId& id, Actions& out) {
    if (id != 0) out.push_back(CancelTimer{id});
    id = 0;
}

Actions TrmacEngine::enqueue(const Packet& packet, NodeId next_hop, double now) {
    if (!neighbors_.contains(next_hop))
        throw InvalidArgument("node " + std::to_string(next_hop) + " is not a neighbor of " +
                              std::to_string(self_));
    Actions out;
    queue_.emplace_back(packet, next_hop);
    if (!current_) start_next(now, out);
    return out;
}

void TrmacEngine::start_next(double now, Actions& out) {
    if (queue_.empty()) return;
    auto [packet, next_hop] = queue_.front();
    queue_.pop_front();
    current_ = Current{packet, next_hop, 0, 0.0};
    out.push_back(AttemptStarted{packet, 0});
    begin_access(now, out);
}

void TrmacEngine::begin_access(double now, Actions& out) {
    const NodeId b = current_->next_hop;
    if (auto it = cache_.find(b); it != cache_.end() && now - it->second.received_at < timers_.coherence) {
        current_->t_pro_next_hop = now - it->second.received_at;
        ++probe_reuses_;
        schedule_data(now, out);
        return;
    }
    current_->t_pro_next_hop = timers_.t_cl();
    send_probe_request(out);
}

void TrmacEngine::send_probe_request(Actions& out, double delay) {
    state_ = SendState::AwaitProbe;
    out.push_back(Transmit{make_frame(FrameKind::ProbeRequest, self_, current_->next_hop, sizes_), delay});
}

double TrmacEngine::backoff(double now) {
    if (!current_) return 0.0;
    const NodeId b = current_->next_hop;
    const double t_cl = timers_.t_cl();
    const double t_pro_b = current_->t_pro_next_hop;
    double wait = std::max(t_cl - t_pro_b, 0.0);

    auto own = cache_.find(b);
    if (own == cache_.end()) return wait;
    const channel::Cir& link = own->second.cir;

    for (const auto& [j, entry] : cache_) {
        if (j == b || entry.addressed_to == self_ || !entry.piggyback) continue;
        const double age = now - entry.received_at;
        if (age >= t_cl) continue;
        const auto terms = phy::correlation_terms(entry.cir, link, phy_.D);
        const auto threshold = phy::eta_threshold(entry.piggyback->victim_link_norm,
                                                  entry.piggyback->victim_autocorr_offpeak_sum,
                                                  terms, phy_);
        if (!threshold || terms.peak > *threshold) {
            wait = std::max({wait, t_cl - age, t_cl - t_pro_b, 0.0});
            ++conflict_deferrals_;
        }
    }
    return wait;
}

void TrmacEngine::schedule_data(double now, Actions& out) {
    const double wait = backoff(now);
    if (wait > 0.0) {
        state_ = SendState::Backoff;
        send_timer_ = arm(wait, out);
        return;
    }
    send_data(out);
}

void TrmacEngine::send_data(Actions& out, double delay) {
    state_ = SendState::AwaitAck;
    out.push_back(Transmit{
        make_frame(FrameKind::TrData, self_, current_->next_hop, sizes_, current_->packet), delay});
}

void TrmacEngine::retry_or_drop(double now, Actions& out) {
    if (current_->retries >= timers_.n_max) {
        out.push_back(PacketDropped{current_->packet});
        finish(out);
        start_next(now, out);
        return;
    }
    ++current_->retries;
    out.push_back(AttemptStarted{current_->packet, current_->retries});
    const double jitter = retry_jitter_ > 0.0 ? rng_.uniform(0.0, retry_jitter_) : 0.0;
    if (state_ == SendState::AwaitProbe) {
        current_->t_pro_next_hop = timers_.t_cl();
        send_probe_request(out, jitter);
    } else {
        send_data(out, jitter);
    }
}

void TrmacEngine::finish(Actions& out) {
    cancel(send_timer_, out);
    current_.reset();
    state_ = SendState::Idle;
}

void TrmacEngine::reply_probe(NodeId requester, const channel::Cir& measured, Actions& out) {
    reserved_for_ = requester;
    reservation_probe_pending_ = true;
    cancel(reservation_timer_, out);
    const auto own = phy::correlation_terms(measured, measured, phy_.D);
    Frame pro = make_frame(FrameKind::Probe, self_, requester, sizes_);
    pro.piggyback = Piggyback{std::sqrt(own.norm_sq), own.offpeak_sum};
    out.push_back(Transmit{std::move(pro), 0.0});
}

void TrmacEngine::release_reservation(double /*now*/, Actions& out) {
    reserved_for_.reset();
    reservation_probe_pending_ = false;
    cancel(reservation_timer_, out);
    if (!deferred_.empty()) {
        Deferred next = std::move(deferred_.front());
        deferred_.pop_front();
        reply_probe(next.requester, next.measured, out);
    }
}

Actions TrmacEngine::on_receive(const Frame& frame, const channel::Cir& measured, double now) {
    Actions out;
    const bool addressed = frame.dst == self_;
    switch (frame.kind) {
        case FrameKind::ProbeRequest: {
            if (!addressed) break;  // overheard requests are discarded
            if (!reserved_for_ || *reserved_for_ == frame.src) {
                reply_probe(frame.src, measured, out);
            } else {
                const bool queued = std::any_of(deferred_.begin(), deferred_.end(),
                                                [&](const Deferred& d) { return d.requester == frame.src; });
                if (!queued) deferred_.push_back(Deferred{frame.src, measured});
            }
            break;
        }
        case FrameKind::Probe: {
            cache_.insert_or_assign(frame.src, ProCacheEntry{frame.src, frame.dst, measured,
                                                             frame.piggyback, now});
            if (addressed && state_ == SendState::AwaitProbe && current_ &&
                current_->next_hop == frame.src) {
                cancel(send_timer_, out);
                schedule_data(now, out);
            }
            break;
        }
        case FrameKind::TrData: {
            if (!addressed || !frame.packet) break;
            // The trailing probe of a TR_DATA refreshes the reverse link.
            cache_.insert_or_assign(frame.src,
                                    ProCacheEntry{frame.src, frame.dst, measured, std::nullopt, now});
            if (delivered_.insert(frame.packet->id).second) out.push_back(DeliverUp{*frame.packet});
            Frame ack = make_frame(FrameKind::TrAck, self_, frame.src, sizes_);
            ack.packet = frame.packet;
            out.push_back(Transmit{std::move(ack), 0.0});
            if (reserved_for_ && *reserved_for_ == frame.src) release_reservation(now, out);
            break;
        }
        case FrameKind::TrAck: {
            if (!addressed || !frame.packet || state_ != SendState::AwaitAck || !current_ ||
                current_->packet.id != frame.packet->id)
                break;
            out.push_back(PacketDone{current_->packet});
            finish(out);
            start_next(now, out);
            break;
        }
        case FrameKind::Rts:
        case FrameKind::Cts:
        case FrameKind::Data:
        case FrameKind::Ack:
            throw InvalidArgument("TRMAC engine received a " + std::string(to_string(frame.kind)) +
                                  " frame");
    }
    return out;
}

Actions TrmacEngine::on_tx_end(const Frame& frame, double /*now*/) {
    Actions out;
    switch (frame.kind) {
        case FrameKind::ProbeRequest:
            if (state_ == SendState::AwaitProbe && current_ && frame.dst == current_->next_hop)
                send_timer_ = arm(timers_.t_th(), out);
            break;
        case FrameKind::TrData:
            if (state_ == SendState::AwaitAck && current_ && frame.packet &&
                frame.packet->id == current_->packet.id)
                send_timer_ = arm(timers_.t_th(), out);
            break;
        case FrameKind::Probe:
            // A reservation that sees no TR_DATA within T_th lapses.
            if (reserved_for_ && *reserved_for_ == frame.dst && reservation_probe_pending_) {
                reservation_probe_pending_ = false;
                reservation_timer_ = arm(timers_.t_th(), out);
            }
            break;
        default:
            break;
    }
    return out;
}

Actions TrmacEngine::on_timer(TimerId id, double now) {
    Actions out;
    if (id == reservation_timer_) {
        reservation_timer_ = 0;
        release_reservation(now, out);
        return out;
    }
    if (id != send_timer_ || !current_) return out;
    send_timer_ = 0;
    switch (state_) {
        case SendState::Backoff: send_data(out); break;
        case SendState::AwaitProbe:
        case SendState::AwaitAck: retry_or_drop(now, out); break;
        case SendState::Idle: break;
    }
    return out;
}

}  // namespace trmac::mac
