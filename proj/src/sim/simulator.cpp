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

#include "trmac/sim/simulator.hpp"

#include <algorithm>
#include <deque>
#include <memory>
#include <ostream>
#include <queue>
#include <set>
#include <unordered_set>

#include "trmac/mac/csma.hpp"
#include "trmac/mac/trmac.hpp"
#include "trmac/rng.hpp"

namespace trmac::sim {

Adjudicator::Adjudicator(const channel::ChannelTable& channels, phy::PhyConfig phy)
    : channels_(channels), phy_(phy) {}

const phy::CorrelationTerms& Adjudicator::terms(NodeId tx, NodeId rx, LinkId basis) {
    const auto key = std::make_tuple(tx, rx, basis.tx, basis.rx);
    auto it = terms_.find(key);
    if (it == terms_.end())
        it = terms_.emplace(key, phy::correlation_terms(channels_.cir(tx, rx),
                                                        channels_.cir(basis.tx, basis.rx), phy_.D))
                 .first;
    return it->second;
}

double Adjudicator::received_power(NodeId receiver, const IncomingFrame& frame) {
    if (frame.tr_basis) return phy::p_ili(terms(frame.src, receiver, *frame.tr_basis), phy_);
    const auto key = std::make_pair(frame.src, receiver);
    auto it = sdt_.find(key);
    if (it == sdt_.end())
        it = sdt_.emplace(key, phy::sdt_terms(channels_.cir(frame.src, receiver), phy_)).first;
    return it->second.signal + it->second.residual;
}

ReceptionOutcome Adjudicator::adjudicate(
    NodeId victim, const IncomingFrame& frame, std::span<const IncomingFrame> concurrent,
    std::span<const std::pair<double, double>> victim_transmissions) {
    ReceptionOutcome out;
    for (const auto& [s, e] : victim_transmissions)
        if (s < frame.end && e > frame.start) return out;  // half-duplex

    // Interference is piecewise constant; its maximum sits at the window start
    // or at the start of some overlapping arrival.
    std::vector<double> probes{frame.start};
    for (const auto& c : concurrent)
        if (c.start > frame.start && c.start < frame.end) probes.push_back(c.start);
    for (double t : probes) {
        double sum = 0.0;
        for (const auto& c : concurrent)
            if (c.start <= t && c.end > t) sum += received_power(victim, c);
        out.interference = std::max(out.interference, sum);
    }

    if (frame.tr_basis) {
        const auto& own = terms(frame.src, victim, *frame.tr_basis);
        out.sinr = phy::sinr_atrsts(own, {}, phy_, out.interference);
    } else {
        auto it = sdt_.find({frame.src, victim});
        if (it == sdt_.end()) {
            received_power(victim, frame);
            it = sdt_.find({frame.src, victim});
        }
        out.sinr = it->second.signal / (it->second.residual + phy_.noise_variance + out.interference);
    }
    out.success = out.sinr >= phy_.min_required_sinr;
    return out;
}

namespace {

enum class EventKind : std::uint8_t { PacketArrival, TxRequest, TxEnd, RxStart, RxEnd, Timer };

struct Event {
    double time;
    std::uint64_t seq;
    EventKind kind;
    NodeId node;
    std::uint64_t ref;
};

struct Later {
    bool operator()(const Event& a, const Event& b) const noexcept {
        if (a.time != b.time) return a.time > b.time;
        return a.seq > b.seq;
    }
};

struct Transmission {
    mac::Frame frame;
    double start;
    double end;
};

struct ArrivalRecord {
    std::uint64_t tx;
    IncomingFrame frame;
    double power;
    bool active;
};

struct NodeState {
    std::unique_ptr<mac::MacEngine> engine;
    bool transmitting = false;
    std::deque<mac::Frame> tx_queue;
    std::vector<ArrivalRecord> arrivals;
    std::vector<std::pair<double, double>> own_tx;
    double last_success_end = -1.0;
    bool carrier_busy = false;
    std::unordered_set<mac::TimerId> cancelled;
};

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

class Simulator {
public:
    Simulator(const Scenario& s, const RunOptions& options)
        : scenario_(s),
          options_(options),
          routes_(compute_routes(s)),
          channels_(s.topology.nodes, s.environment, s.effective_channel()),
          adjudicator_(channels_, s.phy),
          collector_(s.topology.flows.size(), s.run.duration, s.run.metrics_bin, s.run.warmup),
          threshold_(s.sense_threshold()) {
        const auto n = s.topology.nodes.size();
        nodes_.resize(n);
        std::vector<std::set<NodeId>> neighbors(n);
        for (NodeId a = 0; a < n; ++a)
            for (NodeId b = 0; b < n; ++b)
                if (a != b && channel::distance(s.topology.nodes[a], s.topology.nodes[b]) <=
                                  s.topology.one_hop_range)
                    neighbors[a].insert(b);

        const auto timers = s.timers();
        const auto sizes = s.frame_sizes();
        max_frame_ = std::max(sizes.duration(s.traffic.packet_length),
                              sizes.duration(s.mac.control_frame_bits));
        for (NodeId id = 0; id < n; ++id) {
            if (s.mac.protocol == Protocol::Trmac) {
                nodes_[id].engine = std::make_unique<mac::TrmacEngine>(
                    id, neighbors[id], timers, sizes, s.phy, s.mac.retry_jitter,
                    hash_combine({s.run.seed, 0x6d6163, id}));
            } else {
                mac::CsmaConfig cc;
                cc.variant = s.mac.protocol == Protocol::CsmaCa ? mac::CsmaVariant::Standard
                                                                : mac::CsmaVariant::Simplified;
                cc.backoff_unit = s.mac.csma_backoff_unit;
                cc.constant_backoff = s.mac.s_csma_max_backoff;
                cc.virtual_carrier_sense = s.mac.virtual_carrier_sense;
                nodes_[id].engine = std::make_unique<mac::CsmaEngine>(
                    id, neighbors[id], timers, sizes, cc, hash_combine({s.run.seed, 0x6d6163, id}),
                    [this, id] { return nodes_[id].carrier_busy; });
            }
        }
        for (std::uint32_t f = 0; f < routes_.size(); ++f) {
            traffic_rng_.emplace_back(hash_combine({s.run.seed, 0x747266, f}));
            schedule(traffic_rng_.back().exponential(s.traffic.mean_interarrival),
                     EventKind::PacketArrival, routes_[f].front(), f);
        }
    }

    RunOutput run() {
        RunOutput out;
        while (!queue_.empty()) {
            const Event ev = queue_.top();
            if (ev.time > scenario_.run.duration) break;
            queue_.pop();
            now_ = ev.time;
            ++out.events;
            dispatch(ev);
        }
        out.metrics = collector_.finish();
        out.trace_hash = hash_;
        for (const auto& node : nodes_) {
            if (auto* t = dynamic_cast<const mac::TrmacEngine*>(node.engine.get())) {
                out.conflict_deferrals += t->conflict_deferrals();
                out.probe_reuses += t->probe_reuses();
            }
        }
        return out;
    }

private:
    void schedule(double time, EventKind kind, NodeId node, std::uint64_t ref) {
        queue_.push(Event{time, seq_++, kind, node, ref});
    }

    void record(const TraceRecord& r) {
        collector_.observe(r);
        const std::string line = format_trace(r);
        for (unsigned char c : line) hash_ = (hash_ ^ c) * kFnvPrime;
        hash_ = (hash_ ^ static_cast<unsigned char>('\n')) * kFnvPrime;
        if (options_.trace) *options_.trace << line << '\n';
        if (options_.records) options_.records->push_back(r);
    }

    TraceRecord base(NodeId node, TraceKind kind) const {
        TraceRecord r;
        r.time = now_;
        r.node = node;
        r.kind = kind;
        return r;
    }

    TraceRecord packet_record(NodeId node, TraceKind kind, const mac::Packet& p) const {
        auto r = base(node, kind);
        r.packet = p.id;
        r.flow = p.flow;
        r.hop = p.hop;
        r.src = p.origin;
        r.dst = p.destination;
        r.bits = p.bits;
        return r;
    }

    void dispatch(const Event& ev) {
        switch (ev.kind) {
            case EventKind::PacketArrival: on_packet_arrival(static_cast<std::uint32_t>(ev.ref)); break;
            case EventKind::TxRequest: {
                auto frame = std::move(pending_.at(ev.ref));
                pending_.erase(ev.ref);
                request_tx(ev.node, std::move(frame));
                break;
            }
            case EventKind::TxEnd: on_tx_end(ev.node, ev.ref); break;
            case EventKind::RxStart: on_rx_start(ev.node, ev.ref); break;
            case EventKind::RxEnd: on_rx_end(ev.node, ev.ref); break;
            case EventKind::Timer: {
                auto& node = nodes_[ev.node];
                if (node.cancelled.erase(ev.ref) > 0) break;
                apply(ev.node, node.engine->on_timer(ev.ref, now_));
                break;
            }
        }
    }

    void on_packet_arrival(std::uint32_t flow) {
        const auto& route = routes_[flow];
        mac::Packet p;
        p.id = next_packet_++;
        p.flow = flow;
        p.origin = route.front();
        p.destination = route.back();
        p.created_at = now_;
        p.bits = scenario_.traffic.packet_length;
        p.hop = 0;
        record(packet_record(p.origin, TraceKind::PacketGenerated, p));
        apply(p.origin, nodes_[p.origin].engine->enqueue(p, route[1], now_));
        schedule(now_ + traffic_rng_[flow].exponential(scenario_.traffic.mean_interarrival),
                 EventKind::PacketArrival, p.origin, flow);
    }

    void apply(NodeId id, const mac::Actions& actions) {
        for (const auto& action : actions) {
            std::visit([&](const auto& a) { handle(id, a); }, action);
        }
    }

    void handle(NodeId id, const mac::Transmit& a) {
        if (a.delay > 0.0) {
            const auto ref = next_pending_++;
            pending_.emplace(ref, a.frame);
            schedule(now_ + a.delay, EventKind::TxRequest, id, ref);
            return;
        }
        request_tx(id, a.frame);
    }
    void handle(NodeId id, const mac::ArmTimer& a) {
        schedule(now_ + a.delay, EventKind::Timer, id, a.id);
    }
    void handle(NodeId id, const mac::CancelTimer& a) { nodes_[id].cancelled.insert(a.id); }
    void handle(NodeId id, const mac::DeliverUp& a) {
        const auto& p = a.packet;
        auto r = packet_record(id, TraceKind::DataReceived, p);
        record(r);
        const auto& route = routes_[p.flow];
        if (id == p.destination) {
            auto d = packet_record(id, TraceKind::Delivered, p);
            d.value = now_ - p.created_at;
            record(d);
            return;
        }
        mac::Packet next = p;
        next.hop = p.hop + 1;
        const NodeId next_hop = route.at(next.hop + 1);
        auto f = packet_record(id, TraceKind::Forwarded, next);
        record(f);
        apply(id, nodes_[id].engine->enqueue(next, next_hop, now_));
    }
    void handle(NodeId id, const mac::PacketDone& a) {
        record(packet_record(id, TraceKind::PacketDone, a.packet));
    }
    void handle(NodeId id, const mac::PacketDropped& a) {
        record(packet_record(id, TraceKind::Dropped, a.packet));
    }
    void handle(NodeId id, const mac::AttemptStarted& a) {
        auto r = packet_record(id, TraceKind::AttemptStarted, a.packet);
        r.value = a.retransmission;
        record(r);
    }

    void request_tx(NodeId id, mac::Frame frame) {
        auto& node = nodes_[id];
        if (node.transmitting) {
            node.tx_queue.push_back(std::move(frame));
            return;
        }
        start_tx(id, std::move(frame));
    }

    void start_tx(NodeId id, mac::Frame frame) {
        auto& node = nodes_[id];
        const double end = now_ + frame.tx_duration;
        const std::uint64_t tx = transmissions_.size();
        auto r = base(id, TraceKind::TxStart);
        r.frame = frame.kind;
        r.src = frame.src;
        r.dst = frame.dst;
        if (frame.packet) {
            r.packet = frame.packet->id;
            r.flow = frame.packet->flow;
            r.bits = frame.payload_bits;
        }
        r.value = end + channels_.delay(frame.src, frame.dst);
        record(r);
        transmissions_.push_back(Transmission{std::move(frame), now_, end});
        node.transmitting = true;
        node.own_tx.emplace_back(now_, end);
        for (NodeId other = 0; other < nodes_.size(); ++other) {
            if (other == id) continue;
            const double d = channels_.delay(id, other);
            schedule(now_ + d, EventKind::RxStart, other, tx);
            schedule(end + d, EventKind::RxEnd, other, tx);
        }
        schedule(end, EventKind::TxEnd, id, tx);
        update_carrier(id);
    }

    void on_tx_end(NodeId id, std::uint64_t tx) {
        auto& node = nodes_[id];
        node.transmitting = false;
        apply(id, node.engine->on_tx_end(transmissions_[tx].frame, now_));
        if (!node.transmitting && !node.tx_queue.empty()) {
            auto next = std::move(node.tx_queue.front());
            node.tx_queue.pop_front();
            start_tx(id, std::move(next));
        }
        update_carrier(id);
    }

    IncomingFrame incoming(NodeId at, std::uint64_t tx) const {
        const auto& t = transmissions_[tx];
        const double d = channels_.delay(t.frame.src, at);
        return IncomingFrame{t.frame.kind, t.frame.src, t.frame.tr_basis, t.start + d, t.end + d};
    }

    void on_rx_start(NodeId id, std::uint64_t tx) {
        auto& node = nodes_[id];
        const auto in = incoming(id, tx);
        node.arrivals.push_back(ArrivalRecord{tx, in, adjudicator_.received_power(id, in), true});
        update_carrier(id);
    }

    void on_rx_end(NodeId id, std::uint64_t tx) {
        auto& node = nodes_[id];
        for (auto& a : node.arrivals)
            if (a.tx == tx) a.active = false;
        update_carrier(id);

        const auto& frame = transmissions_[tx].frame;
        const bool addressed = frame.dst == id;
        if (addressed || (!mac::is_time_reversed(frame.kind) &&
                          node.engine->wants_overheard(frame.kind))) {
            const auto in = incoming(id, tx);
            std::vector<IncomingFrame> concurrent;
            for (const auto& a : node.arrivals)
                if (a.tx != tx && a.frame.start < in.end && a.frame.end > in.start)
                    concurrent.push_back(a.frame);
            auto outcome = adjudicator_.adjudicate(id, in, concurrent, node.own_tx);
            if (outcome.success && node.last_success_end > in.start) outcome.success = false;
            auto r = base(id, outcome.success ? TraceKind::RxSuccess : TraceKind::RxFailure);
            r.frame = frame.kind;
            r.src = frame.src;
            r.dst = frame.dst;
            if (frame.packet) {
                r.packet = frame.packet->id;
                r.flow = frame.packet->flow;
            }
            r.value = outcome.sinr;
            record(r);
            if (outcome.success) {
                node.last_success_end = in.end;
                apply(id, node.engine->on_receive(frame, channels_.cir(frame.src, id), now_));
            }
        }
        prune(id);
    }

    void prune(NodeId id) {
        auto& node = nodes_[id];
        // Anything that ended before the earliest possible start of a frame
        // still in flight can no longer overlap it.
        const double horizon = now_ - 2.0 * max_frame_;
        std::erase_if(node.arrivals, [&](const ArrivalRecord& a) { return !a.active && a.frame.end < horizon; });
        std::erase_if(node.own_tx, [&](const auto& iv) { return iv.second < horizon; });
    }

    void update_carrier(NodeId id) {
        auto& node = nodes_[id];
        double sum = 0.0;
        for (const auto& a : node.arrivals)
            if (a.active) sum += a.power;
        const bool busy = node.transmitting || sum >= threshold_;
        const bool was = node.carrier_busy;
        node.carrier_busy = busy;
        if (was && !busy) apply(id, node.engine->on_channel_idle(now_));
    }

    const Scenario& scenario_;
    RunOptions options_;
    std::vector<std::vector<NodeId>> routes_;
    channel::ChannelTable channels_;
    Adjudicator adjudicator_;
    MetricsCollector collector_;
    double threshold_;
    double max_frame_ = 0.0;

    std::vector<NodeState> nodes_;
    std::vector<Rng> traffic_rng_;
    std::vector<Transmission> transmissions_;
    std::map<std::uint64_t, mac::Frame> pending_;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::uint64_t seq_ = 0;
    std::uint64_t next_pending_ = 0;
    std::uint64_t next_packet_ = 0;
    double now_ = 0.0;
    std::uint64_t hash_ = kFnvOffset;
};

}  // namespace

RunOutput run(const Scenario& scenario, const RunOptions& options) {
    validate(scenario);
    if (scenario.topology.nodes.empty())
        throw ConfigError("topology.nodes: scenario must be materialized before running");
    Simulator sim(scenario, options);
    return sim.run();
}

}  // namespace trmac::sim
