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


#include <cmath>
#include <optional>
#include <variant>

#include "doctest.h"
#include "trmac/mac/csma.hpp"
#include "trmac/mac/trmac.hpp"

using namespace trmac;
using namespace trmac::mac;

namespace {

const channel::Cir kLink({{0.9, 0.1}, {0.3, -0.2}, {0.1, 0.05}, {0.0, 0.2}, {0.05, 0.0}}, 2.5e-4);
const channel::Cir kOther({{0.1, 0.0}, {0.0, 0.7}, {-0.4, 0.0}, {0.2, 0.2}, {0.0, -0.1}}, 2.5e-4);

phy::PhyConfig test_phy() {
    phy::PhyConfig p;
    p.D = 4;
    return p;
}

TrmacEngine make_trmac(NodeId self = 0, double jitter = 0.0) {
    return TrmacEngine(self, {1, 2, 3}, MacTimers{}, FrameSizes{}, test_phy(), jitter, 99);
}

Packet packet(std::uint64_t id = 7) {
    Packet p;
    p.id = id;
    p.origin = 0;
    p.destination = 1;
    p.bits = 256;
    return p;
}

template <class T>
std::vector<T> all(const Actions& actions) {
    std::vector<T> out;
    for (const auto& a : actions)
        if (const auto* x = std::get_if<T>(&a)) out.push_back(*x);
    return out;
}

template <class T>
std::optional<T> first(const Actions& actions) {
    auto v = all<T>(actions);
    if (v.empty()) return std::nullopt;
    return v.front();
}

Frame probe_from(NodeId src, NodeId dst, std::optional<Piggyback> pb = Piggyback{1.0, 0.0}) {
    Frame f = make_frame(FrameKind::Probe, src, dst, FrameSizes{});
    f.piggyback = pb;
    return f;
}

}  // namespace

TEST_CASE("timer identities") {
    MacTimers t;
    CHECK(t.t_cl() == t.t_p + t.t_tr + t.delta);
    CHECK(t.t_th() == 2 * t.t_p + t.t_tr + t.delta);
    CHECK(t.t_cl() == doctest::Approx(1.4167).epsilon(1e-4));
    CHECK(t.t_th() == doctest::Approx(2.0833).epsilon(1e-4));
    t.t_p = 0.2;
    t.delta = 0.1;
    CHECK(t.t_th() - t.t_cl() == doctest::Approx(0.2));
}

TEST_CASE("control frames take 32 bits at 512 bps") {
    const Frame f = make_frame(FrameKind::ProbeRequest, 0, 1, FrameSizes{});
    CHECK(f.tx_duration == doctest::Approx(0.0625));
}

TEST_CASE("enqueue with an empty cache requests a probe and arms T_th after it goes out") {
    auto e = make_trmac();
    const Actions a = e.enqueue(packet(), 1, 0.0);
    const auto tx = all<Transmit>(a);
    REQUIRE(tx.size() == 1);
    CHECK(tx[0].frame.kind == FrameKind::ProbeRequest);
    CHECK(tx[0].frame.dst == 1);
    CHECK(all<ArmTimer>(a).empty());
    CHECK(e.send_state() == TrmacEngine::SendState::AwaitProbe);

    const Actions b = e.on_tx_end(tx[0].frame, 0.0625);
    const auto timer = first<ArmTimer>(b);
    REQUIRE(timer);
    CHECK(timer->delay == doctest::Approx(MacTimers{}.t_th()));
}

TEST_CASE("cached probes are reused only while younger than T") {
    const double T = MacTimers{}.coherence;
    SUBCASE("aged T/2") {
        auto e = make_trmac();
        CHECK(all<Transmit>(e.on_receive(probe_from(1, 3), kLink, 0.0)).empty());
        const Actions a = e.enqueue(packet(), 1, T / 2);
        const auto tx = all<Transmit>(a);
        REQUIRE(tx.size() == 1);
        CHECK(tx[0].frame.kind == FrameKind::TrData);
        CHECK(e.probe_reuses() == 1);
    }
    SUBCASE("aged 2T") {
        auto e = make_trmac();
        e.on_receive(probe_from(1, 3), kLink, 0.0);
        const auto tx = all<Transmit>(e.enqueue(packet(), 1, 2 * T));
        REQUIRE(tx.size() == 1);
        CHECK(tx[0].frame.kind == FrameKind::ProbeRequest);
        CHECK(e.probe_reuses() == 0);
    }
}

TEST_CASE("probe request at an idle receiver is answered with a piggybacked probe") {
    auto e = make_trmac(1);
    const Frame pr = make_frame(FrameKind::ProbeRequest, 0, 1, FrameSizes{});
    const auto tx = all<Transmit>(e.on_receive(pr, kLink, 1.0));
    REQUIRE(tx.size() == 1);
    CHECK(tx[0].frame.kind == FrameKind::Probe);
    CHECK(tx[0].frame.dst == 0);
    REQUIRE(tx[0].frame.piggyback);
    CHECK(tx[0].frame.piggyback->victim_link_norm == doctest::Approx(channel::norm(kLink)));
    CHECK(tx[0].frame.piggyback->victim_autocorr_offpeak_sum ==
          doctest::Approx(phy::correlation_terms(kLink, kLink, 4).offpeak_sum));
    CHECK(e.reserved_for() == 0u);
}

TEST_CASE("a reserved receiver defers the probe until the reservation clears") {
    auto e = make_trmac(1);
    const FrameSizes sz;
    e.on_receive(make_frame(FrameKind::ProbeRequest, 0, 1, sz), kLink, 1.0);
    CHECK(all<Transmit>(e.on_receive(make_frame(FrameKind::ProbeRequest, 2, 1, sz), kOther, 1.5))
              .empty());
    CHECK(e.deferred_requests() == 1);

    Packet p = packet();
    const Frame data = make_frame(FrameKind::TrData, 0, 1, sz, p);
    const Actions a = e.on_receive(data, kLink, 3.0);
    CHECK(all<DeliverUp>(a).size() == 1);
    const auto tx = all<Transmit>(a);
    REQUIRE(tx.size() == 2);
    CHECK(tx[0].frame.kind == FrameKind::TrAck);
    CHECK(tx[1].frame.kind == FrameKind::Probe);
    CHECK(tx[1].frame.dst == 2);
    CHECK(e.reserved_for() == 2u);
    CHECK(e.deferred_requests() == 0);

    // A repeated data frame is acknowledged again but delivered only once.
    CHECK(all<DeliverUp>(e.on_receive(data, kLink, 4.0)).empty());
}

TEST_CASE("a reservation without data lapses after T_th") {
    auto e = make_trmac(1);
    const auto tx = all<Transmit>(
        e.on_receive(make_frame(FrameKind::ProbeRequest, 0, 1, FrameSizes{}), kLink, 0.0));
    const auto timer = first<ArmTimer>(e.on_tx_end(tx.at(0).frame, 0.0625));
    REQUIRE(timer);
    e.on_timer(timer->id, 0.0625 + timer->delay);
    CHECK_FALSE(e.reserved_for().has_value());
}

TEST_CASE("overheard frames") {
    auto e = make_trmac();
    const Actions a = e.on_receive(probe_from(2, 3), kOther, 5.0);
    CHECK(all<Transmit>(a).empty());
    REQUIRE(e.pro_cache().contains(2));
    CHECK(e.pro_cache().at(2).received_at == 5.0);
    CHECK(e.pro_cache().at(2).addressed_to == 3);

    CHECK(e.on_receive(make_frame(FrameKind::ProbeRequest, 2, 3, FrameSizes{}), kOther, 6.0)
              .empty());
    CHECK_FALSE(e.reserved_for().has_value());
}

TEST_CASE("backoff") {
    const double t_cl = MacTimers{}.t_cl();
    auto handshake = [](TrmacEngine& e, double now) {
        e.enqueue(packet(), 1, now);
        return e.on_receive(probe_from(1, 0), kLink, now + 1.4);
    };

    SUBCASE("no overheard probe") {
        auto e = make_trmac();
        const Actions a = handshake(e, 0.0);
        CHECK(all<ArmTimer>(a).empty());
        REQUIRE(all<Transmit>(a).size() == 1);
        CHECK(all<Transmit>(a)[0].frame.kind == FrameKind::TrData);
    }
    SUBCASE("conflicting probe heard 0.2 s ago") {
        auto e = make_trmac();
        e.enqueue(packet(), 1, 0.0);
        // A tiny victim norm leaves no admissible correlation, so j conflicts.
        e.on_receive(probe_from(2, 3, Piggyback{1e-9, 0.5}), kOther, 1.2);
        const Actions a = e.on_receive(probe_from(1, 0), kLink, 1.4);
        CHECK(all<Transmit>(a).empty());
        const auto timer = first<ArmTimer>(a);
        REQUIRE(timer);
        CHECK(timer->delay == doctest::Approx(t_cl - 0.2));
        CHECK(timer->delay == doctest::Approx(1.217).epsilon(1e-3));
        CHECK(e.conflict_deferrals() == 1);
        CHECK(e.send_state() == TrmacEngine::SendState::Backoff);
        const auto tx = all<Transmit>(e.on_timer(timer->id, 1.4 + timer->delay));
        REQUIRE(tx.size() == 1);
        CHECK(tx[0].frame.kind == FrameKind::TrData);
    }
    SUBCASE("probe below threshold is ignored") {
        auto e = make_trmac();
        e.enqueue(packet(), 1, 0.0);
        // A loud, clean victim tolerates any correlation.
        e.on_receive(probe_from(2, 3, Piggyback{1e6, 0.0}), kOther, 1.2);
        const Actions a = e.on_receive(probe_from(1, 0), kLink, 1.4);
        CHECK(all<ArmTimer>(a).empty());
        CHECK(e.conflict_deferrals() == 0);
    }
    SUBCASE("stale probe is ignored") {
        auto e = make_trmac();
        e.enqueue(packet(), 1, 0.0);
        e.on_receive(probe_from(2, 3, Piggyback{1e-9, 0.5}), kOther, 0.0);
        const Actions a = e.on_receive(probe_from(1, 0), kLink, t_cl + 0.1);
        CHECK(all<ArmTimer>(a).empty());
    }
    SUBCASE("several conflicts take the longest deferral") {
        auto e = make_trmac();
        e.enqueue(packet(), 1, 0.0);
        e.on_receive(probe_from(2, 0 + 3, Piggyback{1e-9, 0.5}), kOther, 1.0);
        e.on_receive(probe_from(3, 2, Piggyback{1e-9, 0.5}), kOther, 1.3);
        const auto timer = first<ArmTimer>(e.on_receive(probe_from(1, 0), kLink, 1.4));
        REQUIRE(timer);
        CHECK(timer->delay == doctest::Approx(t_cl - 0.1));
        CHECK(e.conflict_deferrals() == 2);
    }
}

TEST_CASE("retransmissions and drop") {
    auto e = make_trmac(0, 0.25);
    Actions a = e.enqueue(packet(), 1, 0.0);
    double now = 0.0;
    for (int round = 0; round <= 3; ++round) {
        const auto pr = all<Transmit>(a);
        REQUIRE(pr.size() == 1);
        CHECK(pr[0].frame.kind == FrameKind::ProbeRequest);
        CHECK(pr[0].delay >= 0.0);
        CHECK(pr[0].delay < 0.25);
        now += pr[0].delay + pr[0].frame.tx_duration;
        const auto timer = first<ArmTimer>(e.on_tx_end(pr[0].frame, now));
        REQUIRE(timer);
        now += timer->delay;
        a = e.on_timer(timer->id, now);
        if (round < 3) {
            CHECK(e.retransmissions() == round + 1);
            const auto attempt = first<AttemptStarted>(a);
            REQUIRE(attempt);
            CHECK(attempt->retransmission == round + 1);
            CHECK(all<PacketDropped>(a).empty());
        }
    }
    CHECK(all<PacketDropped>(a).size() == 1);
    CHECK(all<Transmit>(a).empty());
    CHECK(e.send_state() == TrmacEngine::SendState::Idle);
}

TEST_CASE("an acknowledgement before T_th cancels the timer") {
    auto e = make_trmac();
    const auto pr = all<Transmit>(e.enqueue(packet(), 1, 0.0)).at(0);
    const auto pr_timer = first<ArmTimer>(e.on_tx_end(pr.frame, 0.0625)).value();
    const Actions got_probe = e.on_receive(probe_from(1, 0), kLink, 1.4);
    REQUIRE(first<CancelTimer>(got_probe));
    CHECK(first<CancelTimer>(got_probe)->id == pr_timer.id);
    const auto data = all<Transmit>(got_probe).at(0);
    const auto data_timer = first<ArmTimer>(e.on_tx_end(data.frame, 1.9)).value();

    Frame ack = make_frame(FrameKind::TrAck, 1, 0, FrameSizes{});
    ack.packet = packet();
    const Actions done = e.on_receive(ack, kLink, 3.0);
    CHECK(all<PacketDone>(done).size() == 1);
    REQUIRE(first<CancelTimer>(done));
    CHECK(first<CancelTimer>(done)->id == data_timer.id);
    CHECK(e.on_timer(data_timer.id, 4.0).empty());
    CHECK(e.retransmissions() == 0);
}

TEST_CASE("engine errors") {
    auto e = make_trmac();
    CHECK_THROWS_AS(e.enqueue(packet(), 9, 0.0), InvalidArgument);
    CHECK_THROWS_AS(e.on_receive(make_frame(FrameKind::Rts, 1, 0, FrameSizes{}), kLink, 0.0),
                    InvalidArgument);
    CHECK_THROWS_AS(make_trmac(0, -1.0), InvalidArgument);
}

TEST_CASE("engines are deterministic in their seed") {
    auto trace = [] {
        auto e = make_trmac(0, 0.25);
        std::vector<double> delays;
        Actions a = e.enqueue(packet(), 1, 0.0);
        for (int i = 0; i < 3; ++i) {
            const auto pr = all<Transmit>(a).at(0);
            delays.push_back(pr.delay);
            const auto t = first<ArmTimer>(e.on_tx_end(pr.frame, 0.0)).value();
            a = e.on_timer(t.id, 0.0);
        }
        return delays;
    };
    CHECK(trace() == trace());
}

TEST_CASE("csma backoff windows") {
    CsmaConfig standard;
    CsmaEngine s(0, {1}, MacTimers{}, FrameSizes{}, standard, 5, [] { return false; });
    CHECK(s.max_backoff(1) == 2.0);
    CHECK(s.max_backoff(3) == 8.0);
    for (int i = 0; i < 200; ++i) {
        const double d = s.draw_backoff(3);
        CHECK(d >= 0.0);
        CHECK(d <= 8.0);
    }

    CsmaConfig simple;
    simple.variant = CsmaVariant::Simplified;
    CsmaEngine c(0, {1}, MacTimers{}, FrameSizes{}, simple, 5, [] { return false; });
    for (int i : {0, 1, 2, 3}) CHECK(c.max_backoff(i) == 2.0);
}

TEST_CASE("csma on an idle channel sends RTS at once") {
    CsmaEngine e(0, {1}, MacTimers{}, FrameSizes{}, CsmaConfig{}, 5, [] { return false; });
    const Actions a = e.enqueue(packet(), 1, 0.0);
    const auto tx = all<Transmit>(a);
    REQUIRE(tx.size() == 1);
    CHECK(tx[0].frame.kind == FrameKind::Rts);
    CHECK(tx[0].delay == 0.0);
    CHECK(all<ArmTimer>(a).empty());
}

TEST_CASE("csma defers on a busy carrier and backs off when it clears") {
    bool busy = true;
    CsmaEngine e(0, {1}, MacTimers{}, FrameSizes{}, CsmaConfig{}, 5, [&] { return busy; });
    CHECK(all<Transmit>(e.enqueue(packet(), 1, 0.0)).empty());
    CHECK(e.send_state() == CsmaEngine::SendState::WaitIdle);
    busy = false;
    const auto timer = first<ArmTimer>(e.on_channel_idle(2.0));
    REQUIRE(timer);
    CHECK(timer->delay <= e.max_backoff(0));
    const auto tx = all<Transmit>(e.on_timer(timer->id, 2.0 + timer->delay));
    REQUIRE(tx.size() == 1);
    CHECK(tx[0].frame.kind == FrameKind::Rts);
}

TEST_CASE("csma full handshake and NAV") {
    const FrameSizes sz;
    CsmaEngine tx(0, {1, 2}, MacTimers{}, sz, CsmaConfig{}, 5, [] { return false; });
    CsmaEngine rx(1, {0, 2}, MacTimers{}, sz, CsmaConfig{}, 6, [] { return false; });
    CsmaEngine other(2, {0, 1}, MacTimers{}, sz, CsmaConfig{}, 7, [] { return false; });

    const auto rts = all<Transmit>(tx.enqueue(packet(), 1, 0.0)).at(0).frame;
    const auto cts = all<Transmit>(rx.on_receive(rts, kLink, 0.7)).at(0).frame;
    CHECK(cts.kind == FrameKind::Cts);
    other.on_receive(rts, kLink, 0.7);
    CHECK(other.nav_until() > 0.7);
    const auto data = all<Transmit>(tx.on_receive(cts, kLink, 1.4)).at(0).frame;
    CHECK(data.kind == FrameKind::Data);
    const Actions at_rx = rx.on_receive(data, kLink, 2.6);
    CHECK(all<DeliverUp>(at_rx).size() == 1);
    const auto ack = all<Transmit>(at_rx).at(0).frame;
    CHECK(ack.kind == FrameKind::Ack);
    CHECK(all<PacketDone>(tx.on_receive(ack, kLink, 3.3)).size() == 1);
    CHECK(tx.send_state() == CsmaEngine::SendState::Idle);
}
