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
#include <string_view>
#include <vector>

#include "trmac/channel.hpp"
#include "trmac/mac/frame.hpp"
#include "trmac/tr_phy.hpp"

namespace trmac::sim {

enum class Protocol { Trmac, CsmaCa, SCsmaCa };

std::string_view to_string(Protocol p) noexcept;
/// Accepts "trmac", "csma_ca", "s_csma_ca". Throws ConfigError otherwise.
Protocol protocol_from_string(std::string_view name);

struct MacConfig {
    Protocol protocol = Protocol::Trmac;
    double data_rate = 512.0;
    int control_frame_bits = 32;
    double guard_time = 0.25;
    double coherence_time = 30.0;
    int max_retransmissions = 3;
    double csma_backoff_unit = 1.0;
    double s_csma_max_backoff = 2.0;
    bool virtual_carrier_sense = true;
    /// Upper bound of the uniform extra delay before a TRMAC retransmission.
    double retry_jitter = 0.25;

    friend bool operator==(const MacConfig&, const MacConfig&) = default;
};

struct Flow {
    NodeId source = 0;
    NodeId destination = 0;

    friend bool operator==(const Flow&, const Flow&) = default;
};

struct TopologyConfig {
    double region_x = 4000.0;
    double region_y = 4000.0;
    double node_depth_min = 0.0;
    double node_depth_max = 50.0;
    double one_hop_range = 1000.0;
    std::size_t node_count = 20;
    std::size_t max_active_links = 10;
    std::size_t max_hops = 6;
    std::size_t active_links = 10;
    /// Empty means "place node_count nodes at random from the run seed".
    std::vector<channel::NodePosition> nodes;
    /// Empty means "pick active_links disjoint one-hop pairs at random".
    std::vector<Flow> flows;

    friend bool operator==(const TopologyConfig&, const TopologyConfig&) = default;
};

struct TrafficConfig {
    double mean_interarrival = 8.0;
    int packet_length = 256;

    friend bool operator==(const TrafficConfig&, const TrafficConfig&) = default;
};

struct RunConfig {
    double duration = 2000.0;
    std::uint64_t seed = 1;
    /// Records before this time are left out of the metrics.
    double warmup = 0.0;
    double metrics_bin = 100.0;
    /// Multiplies the carrier-sense threshold (expected power at one-hop range).
    double sense_threshold_scale = 1.0;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Full description of one simulation run.
struct Scenario {
    channel::Environment environment;
    channel::ChannelModelConfig channel;
    phy::PhyConfig phy;
    MacConfig mac;
    TopologyConfig topology;
    TrafficConfig traffic;
    RunConfig run;

    mac::MacTimers timers() const noexcept;
    mac::FrameSizes frame_sizes() const noexcept;
    /// Expected received power at one-hop range, scaled.
    double sense_threshold() const noexcept;
    /// Channel config with its seed mixed with the run seed.
    channel::ChannelModelConfig effective_channel() const;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Fills in random node positions and flows where they are absent. Deterministic
/// in run.seed; an already explicit scenario is returned unchanged.
Scenario materialize(Scenario scenario);

/// Throws ConfigError naming the violated field or invariant.
void validate(const Scenario& scenario);

/// Hop-count shortest paths over edges no longer than one_hop_range; ties go to
/// the lower node id. Each route lists source .. destination.
std::vector<std::vector<NodeId>> compute_routes(const Scenario& scenario);

}  // namespace trmac::sim
