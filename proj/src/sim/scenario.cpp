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

#include "trmac/sim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <string>

#include "trmac/rng.hpp"

namespace trmac::sim {

std::string_view to_string(Protocol p) noexcept {
    switch (p) {
        case Protocol::Trmac: return "trmac";
        case Protocol::CsmaCa: return "csma_ca";
        case Protocol::SCsmaCa: return "s_csma_ca";
    }
    return "?";
}

Protocol protocol_from_string(std::string_view name) {
    if (name == "trmac") return Protocol::Trmac;
    if (name == "csma_ca") return Protocol::CsmaCa;
    if (name == "s_csma_ca") return Protocol::SCsmaCa;
    throw ConfigError("mac.protocol: unknown protocol '" + std::string(name) + "'");
}

mac::MacTimers Scenario::timers() const noexcept {
    mac::MacTimers t;
    t.t_p = topology.one_hop_range / environment.nominal_sound_speed;
    t.t_tr = traffic.packet_length / mac.data_rate;
    t.delta = mac.guard_time;
    t.coherence = mac.coherence_time;
    t.n_max = mac.max_retransmissions;
    return t;
}

mac::FrameSizes Scenario::frame_sizes() const noexcept {
    return mac::FrameSizes{mac.data_rate, mac.control_frame_bits};
}

double Scenario::sense_threshold() const noexcept {
    const double g = channel.reference_distance / topology.one_hop_range;
    return run.sense_threshold_scale * phy.acoustic_power() * g * g;
}

channel::ChannelModelConfig Scenario::effective_channel() const {
    auto cfg = channel;
    cfg.rng_seed = hash_combine({run.seed, channel.rng_seed});
    return cfg;
}

namespace {

constexpr std::uint64_t kTopologyStream = 0x746f706f;

std::vector<channel::NodePosition> place_nodes(const TopologyConfig& topo, Rng& rng) {
    std::vector<channel::NodePosition> nodes(topo.node_count);
    for (auto& n : nodes) {
        n.x = rng.uniform(0.0, topo.region_x);
        n.y = rng.uniform(0.0, topo.region_y);
        n.depth = rng.uniform(topo.node_depth_min, topo.node_depth_max);
    }
    return nodes;
}

/// An active link must at least carry an isolated frame: without any
/// interference both the direct control frames and the TR data frames clear
/// the SINR requirement. Arrival-file channels are taken as given.
bool link_viable(const Scenario& s, const channel::NodePosition& a, const channel::NodePosition& b) {
    if (s.channel.model_kind != channel::ModelKind::StatisticalPdp) return true;
    const auto cir = channel::generate_cir(a, b, s.environment, s.effective_channel());
    const double gamma = s.phy.min_required_sinr;
    return phy::sinr_sdt(cir, s.phy) >= gamma && phy::sinr_atrsts(cir, {}, s.phy) >= gamma;
}

/// Randomized greedy matching over viable one-hop edges.
std::vector<Flow> pick_pairs(const Scenario& s, const std::vector<channel::NodePosition>& nodes,
                             std::size_t wanted, Rng& rng) {
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId a = 0; a < nodes.size(); ++a)
        for (NodeId b = a + 1; b < nodes.size(); ++b)
            if (channel::distance(nodes[a], nodes[b]) <= s.topology.one_hop_range &&
                link_viable(s, nodes[a], nodes[b]))
                edges.emplace_back(a, b);
    for (std::size_t i = edges.size(); i > 1; --i) std::swap(edges[i - 1], edges[rng.below(i)]);
    std::vector<bool> used(nodes.size(), false);
    std::vector<Flow> flows;
    for (auto [a, b] : edges) {
        if (flows.size() == wanted) break;
        if (used[a] || used[b]) continue;
        used[a] = used[b] = true;
        if (rng.uniform() < 0.5) std::swap(a, b);
        flows.push_back(Flow{a, b});
    }
    return flows;
}

}  // namespace

Scenario materialize(Scenario s) {
    auto& topo = s.topology;
    Rng rng(hash_combine({s.run.seed, kTopologyStream}));
    if (topo.nodes.empty()) validate(s);  // link viability needs a sane phy
    if (topo.nodes.empty()) {
        if (topo.flows.empty()) {
            const std::size_t wanted = std::max(topo.active_links, topo.max_active_links);
            const std::size_t need = std::min(wanted, topo.node_count / 2);
            for (int attempt = 0; attempt < 10000; ++attempt) {
                auto nodes = place_nodes(topo, rng);
                auto pairs = pick_pairs(s, nodes, need, rng);
                if (pairs.size() < need) continue;
                pairs.resize(std::min(topo.active_links, pairs.size()));
                topo.nodes = std::move(nodes);
                topo.flows = std::move(pairs);
                break;
            }
            if (topo.nodes.empty())
                throw ConfigError("topology: could not place nodes with " +
                                  std::to_string(need) + " disjoint one-hop pairs");
        } else {
            topo.nodes = place_nodes(topo, rng);
        }
    } else if (topo.flows.empty()) {
        topo.flows = pick_pairs(s, topo.nodes, topo.active_links, rng);
    }
    topo.node_count = topo.nodes.size();
    topo.active_links = topo.flows.size();
    return s;
}

void validate(const Scenario& s) {
    auto wrap = [](auto&& fn) {
        try {
            fn();
        } catch (const InvalidArgument& e) {
            throw ConfigError(e.what());
        }
    };
    wrap([&] { s.environment.validate(); });
    wrap([&] { s.channel.validate(); });
    if (!phy::divisible(s.channel.tap_count, s.phy.D))
        throw ConfigError("phy.backoff_factor: channel.tap_count - 1 must be divisible by D (tap_count " +
                          std::to_string(s.channel.tap_count) + ", D " + std::to_string(s.phy.D) +
                          ")");
    wrap([&] { s.phy.validate_for(s.channel.tap_count); });
    wrap([&] { s.timers().validate(); });

    const auto& topo = s.topology;
    if (!(topo.region_x > 0.0) || !(topo.region_y > 0.0))
        throw ConfigError("topology.region: must be positive");
    if (topo.node_depth_min < 0.0 || topo.node_depth_max < topo.node_depth_min ||
        topo.node_depth_max > s.environment.water_depth)
        throw ConfigError("topology.node_depth: need 0 <= min <= max <= water_depth");
    if (!(topo.one_hop_range > 0.0)) throw ConfigError("topology.one_hop_range: must be positive");
    if (topo.max_hops < 1) throw ConfigError("topology.max_hops: must be at least 1");
    if (topo.active_links > topo.max_active_links)
        throw ConfigError("topology.active_links: exceeds max_active_links");
    if (!(s.mac.data_rate > 0.0)) throw ConfigError("mac.data_rate: must be positive");
    if (s.mac.control_frame_bits <= 0) throw ConfigError("mac.control_frame_bits: must be positive");
    if (!(s.mac.csma_backoff_unit > 0.0) || !(s.mac.s_csma_max_backoff > 0.0))
        throw ConfigError("mac backoff windows: must be positive");
    if (!(s.mac.retry_jitter >= 0.0)) throw ConfigError("mac.retry_jitter: must be >= 0");
    if (!(s.traffic.mean_interarrival > 0.0))
        throw ConfigError("traffic.mean_interarrival: must be positive");
    if (s.traffic.packet_length <= 0) throw ConfigError("traffic.packet_length: must be positive");
    if (!(s.run.duration >= 0.0)) throw ConfigError("run.duration: must be >= 0");
    if (!(s.run.metrics_bin > 0.0)) throw ConfigError("run.metrics_bin: must be positive");
    if (!(s.run.sense_threshold_scale > 0.0))
        throw ConfigError("run.sense_threshold_scale: must be positive");

    if (topo.nodes.empty()) return;  // random placement happens at materialization
    if (topo.nodes.size() != topo.node_count)
        throw ConfigError("topology.node_count: does not match the number of listed nodes");
    for (std::size_t i = 0; i < topo.nodes.size(); ++i) {
        const auto& n = topo.nodes[i];
        const std::string where = "topology.nodes[" + std::to_string(i) + "]";
        if (!std::isfinite(n.x) || !std::isfinite(n.y) || !std::isfinite(n.depth))
            throw ConfigError(where + ": coordinates must be finite");
        if (n.x < 0.0 || n.x > topo.region_x || n.y < 0.0 || n.y > topo.region_y)
            throw ConfigError(where + ": outside the deployment region");
        if (n.depth < topo.node_depth_min || n.depth > topo.node_depth_max)
            throw ConfigError(where + ": depth outside [node_depth_min, node_depth_max]");
        for (std::size_t j = 0; j < i; ++j)
            if (channel::distance(n, topo.nodes[j]) == 0.0)
                throw ConfigError(where + ": coincides with node " + std::to_string(j));
    }
    if (topo.flows.size() > topo.max_active_links)
        throw ConfigError("topology.flows: more flows than max_active_links");
    for (std::size_t i = 0; i < topo.flows.size(); ++i) {
        const auto& f = topo.flows[i];
        const std::string where = "topology.flows[" + std::to_string(i) + "]";
        if (f.source >= topo.nodes.size() || f.destination >= topo.nodes.size())
            throw ConfigError(where + ": unknown node id");
        if (f.source == f.destination) throw ConfigError(where + ": source equals destination");
    }
    compute_routes(s);
}

std::vector<std::vector<NodeId>> compute_routes(const Scenario& s) {
    const auto& nodes = s.topology.nodes;
    const std::size_t n = nodes.size();
    std::vector<std::vector<NodeId>> adjacency(n);
    for (NodeId a = 0; a < n; ++a)
        for (NodeId b = 0; b < n; ++b)
            if (a != b && channel::distance(nodes[a], nodes[b]) <= s.topology.one_hop_range)
                adjacency[a].push_back(b);

    std::vector<std::vector<NodeId>> routes;
    for (std::size_t i = 0; i < s.topology.flows.size(); ++i) {
        const auto& f = s.topology.flows[i];
        constexpr NodeId none = std::numeric_limits<NodeId>::max();
        std::vector<NodeId> parent(n, none);
        std::deque<NodeId> frontier{f.source};
        parent[f.source] = f.source;
        while (!frontier.empty() && parent[f.destination] == none) {
            const NodeId u = frontier.front();
            frontier.pop_front();
            for (NodeId v : adjacency[u]) {
                if (parent[v] != none) continue;
                parent[v] = u;
                frontier.push_back(v);
            }
        }
        const std::string where = "topology.flows[" + std::to_string(i) + "]";
        if (parent[f.destination] == none) throw ConfigError(where + ": no route within one-hop range");
        std::vector<NodeId> route{f.destination};
        while (route.back() != f.source) route.push_back(parent[route.back()]);
        std::reverse(route.begin(), route.end());
        if (route.size() - 1 > s.topology.max_hops)
            throw ConfigError(where + ": route needs " + std::to_string(route.size() - 1) +
                              " hops, more than max_hops");
        routes.push_back(std::move(route));
    }
    return routes;
}

}  // namespace trmac::sim
