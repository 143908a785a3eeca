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

#include "trmac/mac/csma.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace trmac::mac {

CsmaEngine::CsmaEngine(NodeId self, std::set<NodeId> neighbors, MacTimers timers, FrameSizes sizes,
                       CsmaConfig config, std::uint64_t rng_seed, SenseFn carrier_busy)
    : self_(self),
      neighbors_(std::move(neighbors)),
      timers_(timers),
      sizes_(sizes),
      config_(config),
      rng_(rng_seed),
      carrier_busy_(std::move(carrier_busy)) {
    timers_.validate();
    if (!(config_.backoff_unit > 0.0) || !(config_.constant_backoff > 0.0))
        throw InvalidArgument("backoff windows must be positive");
}

double CsmaEngine::max_backoff(int retransmission) const noexcept {
    if (config_.variant == CsmaVariant::Simplified) return config_.constant_backoff;
    return config_.backoff_unit * std::ldexp(1.0, retransmission);
}

double CsmaEngine::draw_backoff(int retransmission) {
    return rng_.uniform(0.0, max_backoff(retransmission));
}

TimerId CsmaEngine::arm(double delay, Actions& out) {
    const TimerId id = next_timer_++;
    out.push_back(ArmTimer{id, delay});
    return id;
}

void CsmaEngine::cancel(TimerId& id, Actions& out) {
    if (id != 0) out.push_back(CancelTimer{id});
    id = 0;
}

bool CsmaEngine::busy(double now) const {
    return (carrier_busy_ && carrier_busy_()) || now < nav_until_ || responding_to_.has_value();
}

Actions CsmaEngine::enqueue(const Packet& packet, NodeId next_hop, double now) {
    if (!neighbors_.contains(next_hop))
        throw InvalidArgument("node " + std::to_string(next_hop) + " is not a neighbor of " +
                              std::to_string(self_));
    Actions out;
    queue_.emplace_back(packet, next_hop);
    if (!current_) start_next(now, out);
    return out;
}

void CsmaEngine::start_next(double now, Actions& out) {
    if (queue_.empty()) return;
    auto [packet, next_hop] = queue_.front();
    queue_.pop_front();
    current_ = Current{packet, next_hop, 0};
    out.push_back(AttemptStarted{packet, 0});
    try_access(now, out);
}

void CsmaEngine::try_access(double now, Actions& out) {
    if (busy(now)) {
        wait_for_idle(now, out);
        return;
    }
    send_rts(out);
}

void CsmaEngine::wait_for_idle(double now, Actions& out) {
    state_ = SendState::WaitIdle;
    if (now < nav_until_ && nav_timer_ == 0) nav_timer_ = arm(nav_until_ - now, out);
}

void CsmaEngine::send_rts(Actions& out) {
    state_ = SendState::AwaitCts;
    out.push_back(Transmit{make_frame(FrameKind::Rts, self_, current_->next_hop, sizes_), 0.0});
}

void CsmaEngine::retry_or_drop(double now, Actions& out) {
    if (current_->retries >= timers_.n_max) {
        out.push_back(PacketDropped{current_->packet});
        finish(out);
        start_next(now, out);
        return;
    }
    ++current_->retries;
    out.push_back(AttemptStarted{current_->packet, current_->retries});
    state_ = SendState::Backoff;
    send_timer_ = arm(draw_backoff(current_->retries), out);
}

void CsmaEngine::finish(Actions& out) {
    cancel(send_timer_, out);
    current_.reset();
    state_ = SendState::Idle;
}

void CsmaEngine::recheck(double now, Actions& out) {
    if (state_ != SendState::WaitIdle) return;
    if (busy(now)) {
        wait_for_idle(now, out);
        return;
    }
    state_ = SendState::Backoff;
    send_timer_ = arm(draw_backoff(current_->retries), out);
}

void CsmaEngine::stop_responding(double now, Actions& out) {
    responding_to_.reset();
    respond_pending_ = false;
    cancel(respond_timer_, out);
    recheck(now, out);
}

Actions CsmaEngine::on_receive(const Frame& frame, const channel::Cir& /*measured*/, double now) {
    Actions out;
    const bool addressed = frame.dst == self_;
    const double t_p = timers_.t_p;
    const double t_ctrl = sizes_.duration(sizes_.control_bits);
    const double t_data = timers_.t_tr;
    switch (frame.kind) {
        case FrameKind::Rts:
            if (!addressed) {
                if (config_.virtual_carrier_sense)
                    nav_until_ = std::max(nav_until_, now + 3.0 * t_p + 2.0 * t_ctrl + t_data);
                break;
            }
            if (responding_to_ && *responding_to_ != frame.src) break;
            if (state_ == SendState::AwaitCts || state_ == SendState::AwaitAck) break;
            if (now < nav_until_) break;
            responding_to_ = frame.src;
            respond_pending_ = true;
            cancel(respond_timer_, out);
            out.push_back(Transmit{make_frame(FrameKind::Cts, self_, frame.src, sizes_), 0.0});
            break;
        case FrameKind::Cts:
            if (!addressed) {
                if (config_.virtual_carrier_sense)
                    nav_until_ = std::max(nav_until_, now + 2.0 * t_p + t_ctrl + t_data);
                break;
            }
            if (state_ != SendState::AwaitCts || !current_ || current_->next_hop != frame.src) break;
            cancel(send_timer_, out);
            state_ = SendState::AwaitAck;
            out.push_back(Transmit{
                make_frame(FrameKind::Data, self_, current_->next_hop, sizes_, current_->packet), 0.0});
            break;
        case FrameKind::Data: {
            if (!addressed || !frame.packet) break;
            if (delivered_.insert(frame.packet->id).second) out.push_back(DeliverUp{*frame.packet});
            Frame ack = make_frame(FrameKind::Ack, self_, frame.src, sizes_);
            ack.packet = frame.packet;
            out.push_back(Transmit{std::move(ack), 0.0});
            if (responding_to_ && *responding_to_ == frame.src) stop_responding(now, out);
            break;
        }
        case FrameKind::Ack:
            if (!addressed || !frame.packet || state_ != SendState::AwaitAck || !current_ ||
                current_->packet.id != frame.packet->id)
                break;
            out.push_back(PacketDone{current_->packet});
            finish(out);
            start_next(now, out);
            break;
        default:
            throw InvalidArgument("CSMA engine received a " + std::string(to_string(frame.kind)) +
                                  " frame");
    }
    return out;
}

Actions CsmaEngine::on_tx_end(const Frame& frame, double /*now*/) {
    Actions out;
    switch (frame.kind) {
        case FrameKind::Rts:
            if (state_ == SendState::AwaitCts && current_ && frame.dst == current_->next_hop)
                send_timer_ = arm(timers_.t_th(), out);
            break;
        case FrameKind::Data:
            if (state_ == SendState::AwaitAck && current_ && frame.packet &&
                frame.packet->id == current_->packet.id)
                send_timer_ = arm(timers_.t_th(), out);
            break;
        case FrameKind::Cts:
            if (respond_pending_ && responding_to_ && *responding_to_ == frame.dst) {
                respond_pending_ = false;
                respond_timer_ = arm(timers_.t_th(), out);
            }
            break;
        default:
            break;
    }
    return out;
}

Actions CsmaEngine::on_timer(TimerId id, double now) {
    Actions out;
    if (id == nav_timer_) {
        nav_timer_ = 0;
        if (now < nav_until_)
            nav_timer_ = arm(nav_until_ - now, out);
        else
            recheck(now, out);
        return out;
    }
    if (id == respond_timer_) {
        respond_timer_ = 0;
        stop_responding(now, out);
        return out;
    }
    if (id != send_timer_ || !current_) return out;
    send_timer_ = 0;
    switch (state_) {
        case SendState::Backoff:
            if (busy(now))
                wait_for_idle(now, out);
            else
                send_rts(out);
            break;
        case SendState::AwaitCts:
        case SendState::AwaitAck: retry_or_drop(now, out); break;
        case SendState::Idle:
        case SendState::WaitIdle: break;
    }
    return out;
}

Actions CsmaEngine::on_channel_idle(double now) {
    Actions out;
    recheck(now, out);
    return out;
}

}  // namespace trmac::mac
