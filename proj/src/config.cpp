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

#include "trmac/config.hpp"

#include <concepts>
#include <cstdio>
#include <limits>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "trmac/common.hpp"

namespace trmac::config {
namespace {

using nlohmann::json;

void read_value(const json& v, const std::string& name, double& out) {
    if (!v.is_number()) throw ConfigError(name + ": expected a number");
    out = v.get<double>();
}

void read_value(const json& v, const std::string& name, bool& out) {
    if (!v.is_boolean()) throw ConfigError(name + ": expected true or false");
    out = v.get<bool>();
}

void read_value(const json& v, const std::string& name, int& out) {
    if (!v.is_number_integer()) throw ConfigError(name + ": expected an integer");
    const auto x = v.get<std::int64_t>();
    if (x < INT32_MIN || x > INT32_MAX) throw ConfigError(name + ": out of range");
    out = static_cast<int>(x);
}

template <std::unsigned_integral T>
void read_value(const json& v, const std::string& name, T& out) {
    if (!v.is_number_unsigned()) throw ConfigError(name + ": expected a non-negative integer");
    const auto x = v.get<std::uint64_t>();
    if (x > std::numeric_limits<T>::max()) throw ConfigError(name + ": out of range");
    out = static_cast<T>(x);
}

void read_value(const json& v, const std::string& name, std::string& out) {
    if (!v.is_string()) throw ConfigError(name + ": expected a string");
    out = v.get<std::string>();
}

/// Walks one JSON object, remembering which keys were consumed so that the
/// leftovers can be reported as unknown.
class Section {
public:
    Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) throw ConfigError(where() + ": expected an object");
    }

    template <typename T>
    void read(const char* key, T& out) {
        const json* v = take(key);
        if (!v) return;
        read_value(*v, field(key), out);
    }

    template <typename Fn>
    void read_with(const char* key, Fn&& fn) {
        if (const json* v = take(key)) fn(*v, field(key));
    }

    void finish() const {
        for (const auto& [key, value] : node_.items())
            if (!seen_.count(key)) throw ConfigError(field(key.c_str()) + ": unknown field");
    }

    std::string field(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

private:
    std::string where() const { return path_.empty() ? "scenario" : path_; }

    const json* take(const char* key) {
        seen_.insert(key);
        auto it = node_.find(key);
        if (it == node_.end() || it->is_null()) return nullptr;
        return &*it;
    }

    const json& node_;
    std::string path_;
    std::set<std::string> seen_;
};

const json& array_at(const json& v, const std::string& name) {
    if (!v.is_array()) throw ConfigError(name + ": expected an array");
    return v;
}

std::string_view model_name(channel::ModelKind k) {
    return k == channel::ModelKind::StatisticalPdp ? "statistical_pdp" : "arrival_file";
}

channel::ModelKind model_from(const std::string& s, const std::string& name) {
    if (s == "statistical_pdp") return channel::ModelKind::StatisticalPdp;
    if (s == "arrival_file") return channel::ModelKind::ArrivalFile;
    throw ConfigError(name + ": unknown model '" + s + "' (statistical_pdp, arrival_file)");
}

void parse_environment(const json& node, channel::Environment& e) {
    Section s(node, "environment");
    s.read("water_depth", e.water_depth);
    s.read_with("sound_speed_profile", [&](const json& v, const std::string& name) {
        e.svp.clear();
        for (std::size_t i = 0; i < array_at(v, name).size(); ++i) {
            Section p(v[i], name + "[" + std::to_string(i) + "]");
            channel::SvpPoint pt;
            p.read("depth", pt.depth);
            p.read("speed", pt.speed);
            p.finish();
            e.svp.push_back(pt);
        }
    });
    s.read("carrier_frequency", e.carrier_frequency);
    s.read("bandwidth", e.bandwidth);
    s.read("nominal_sound_speed", e.nominal_sound_speed);
    s.finish();
}

void parse_channel(const json& node, channel::ChannelModelConfig& c) {
    Section s(node, "channel");
    s.read_with("model", [&](const json& v, const std::string& name) {
        std::string m;
        read_value(v, name, m);
        c.model_kind = model_from(m, name);
    });
    s.read("tap_count", c.tap_count);
    s.read("pdp_decay_constant", c.pdp_decay_constant);
    s.read("rng_seed", c.rng_seed);
    s.read_with("arrival_file", [&](const json& v, const std::string& name) {
        std::string p;
        read_value(v, name, p);
        c.arrival_file_path = p;
    });
    s.read("depth_quantum", c.depth_quantum);
    s.read("range_quantum", c.range_quantum);
    s.read("reference_distance", c.reference_distance);
    s.finish();
}

void parse_phy(const json& node, phy::PhyConfig& p) {
    Section s(node, "phy");
    s.read("transmit_power", p.transmit_power);
    s.read("acoustic_conversion", p.acoustic_conversion);
    s.read("noise_variance", p.noise_variance);
    s.read("backoff_factor", p.D);
    s.read("min_required_sinr", p.min_required_sinr);
    s.finish();
}

void parse_mac(const json& node, sim::MacConfig& m) {
    Section s(node, "mac");
    s.read_with("protocol", [&](const json& v, const std::string& name) {
        std::string p;
        read_value(v, name, p);
        try {
            m.protocol = sim::protocol_from_string(p);
        } catch (const ConfigError& e) {
            throw ConfigError(name + ": " + e.what());
        }
    });
    s.read("data_rate", m.data_rate);
    s.read("control_frame_bits", m.control_frame_bits);
    s.read("guard_time", m.guard_time);
    s.read("coherence_time", m.coherence_time);
    s.read("max_retransmissions", m.max_retransmissions);
    s.read("csma_backoff_unit", m.csma_backoff_unit);
    s.read("s_csma_max_backoff", m.s_csma_max_backoff);
    s.read("virtual_carrier_sense", m.virtual_carrier_sense);
    s.read("retry_jitter", m.retry_jitter);
    s.finish();
}

void parse_topology(const json& node, sim::TopologyConfig& t) {
    Section s(node, "topology");
    s.read("region_x", t.region_x);
    s.read("region_y", t.region_y);
    s.read("node_depth_min", t.node_depth_min);
    s.read("node_depth_max", t.node_depth_max);
    s.read("one_hop_range", t.one_hop_range);
    s.read("node_count", t.node_count);
    s.read("max_active_links", t.max_active_links);
    s.read("max_hops", t.max_hops);
    s.read("active_links", t.active_links);
    s.read_with("nodes", [&](const json& v, const std::string& name) {
        t.nodes.clear();
        for (std::size_t i = 0; i < array_at(v, name).size(); ++i) {
            Section p(v[i], name + "[" + std::to_string(i) + "]");
            channel::NodePosition pos;
            p.read("depth", pos.depth);
            p.read("x", pos.x);
            p.read("y", pos.y);
            p.finish();
            t.nodes.push_back(pos);
        }
    });
    s.read_with("flows", [&](const json& v, const std::string& name) {
        t.flows.clear();
        for (std::size_t i = 0; i < array_at(v, name).size(); ++i) {
            Section p(v[i], name + "[" + std::to_string(i) + "]");
            sim::Flow f;
            p.read("source", f.source);
            p.read("destination", f.destination);
            p.finish();
            t.flows.push_back(f);
        }
    });
    s.finish();
}

void parse_traffic(const json& node, sim::TrafficConfig& t) {
    Section s(node, "traffic");
    s.read("mean_interarrival", t.mean_interarrival);
    s.read("packet_length", t.packet_length);
    s.finish();
}

void parse_run(const json& node, sim::RunConfig& r) {
    Section s(node, "run");
    s.read("duration", r.duration);
    s.read("seed", r.seed);
    s.read("warmup", r.warmup);
    s.read("metrics_bin", r.metrics_bin);
    s.read("sense_threshold_scale", r.sense_threshold_scale);
    s.finish();
}

sim::Scenario from_json(const json& root) {
    sim::Scenario sc;
    Section s(root, "");
    s.read_with("environment", [&](const json& v, const std::string&) { parse_environment(v, sc.environment); });
    s.read_with("channel", [&](const json& v, const std::string&) { parse_channel(v, sc.channel); });
    s.read_with("phy", [&](const json& v, const std::string&) { parse_phy(v, sc.phy); });
    s.read_with("mac", [&](const json& v, const std::string&) { parse_mac(v, sc.mac); });
    s.read_with("topology", [&](const json& v, const std::string&) { parse_topology(v, sc.topology); });
    s.read_with("traffic", [&](const json& v, const std::string&) { parse_traffic(v, sc.traffic); });
    s.read_with("run", [&](const json& v, const std::string&) { parse_run(v, sc.run); });
    s.finish();
    return sc;
}

json to_json(const sim::Scenario& sc) {
    json j = json::object();
    auto& env = j["environment"];
    env["water_depth"] = sc.environment.water_depth;
    env["sound_speed_profile"] = json::array();
    for (const auto& p : sc.environment.svp)
        env["sound_speed_profile"].push_back({{"depth", p.depth}, {"speed", p.speed}});
    env["carrier_frequency"] = sc.environment.carrier_frequency;
    env["bandwidth"] = sc.environment.bandwidth;
    env["nominal_sound_speed"] = sc.environment.nominal_sound_speed;

    auto& ch = j["channel"];
    ch["model"] = model_name(sc.channel.model_kind);
    ch["tap_count"] = sc.channel.tap_count;
    ch["pdp_decay_constant"] = sc.channel.pdp_decay_constant;
    ch["rng_seed"] = sc.channel.rng_seed;
    ch["arrival_file"] = sc.channel.arrival_file_path ? json(sc.channel.arrival_file_path->string())
                                                      : json(nullptr);
    ch["depth_quantum"] = sc.channel.depth_quantum;
    ch["range_quantum"] = sc.channel.range_quantum;
    ch["reference_distance"] = sc.channel.reference_distance;

    auto& p = j["phy"];
    p["transmit_power"] = sc.phy.transmit_power;
    p["acoustic_conversion"] = sc.phy.acoustic_conversion;
    p["noise_variance"] = sc.phy.noise_variance;
    p["backoff_factor"] = sc.phy.D;
    p["min_required_sinr"] = sc.phy.min_required_sinr;

    auto& m = j["mac"];
    m["protocol"] = sim::to_string(sc.mac.protocol);
    m["data_rate"] = sc.mac.data_rate;
    m["control_frame_bits"] = sc.mac.control_frame_bits;
    m["guard_time"] = sc.mac.guard_time;
    m["coherence_time"] = sc.mac.coherence_time;
    m["max_retransmissions"] = sc.mac.max_retransmissions;
    m["csma_backoff_unit"] = sc.mac.csma_backoff_unit;
    m["s_csma_max_backoff"] = sc.mac.s_csma_max_backoff;
    m["virtual_carrier_sense"] = sc.mac.virtual_carrier_sense;
    m["retry_jitter"] = sc.mac.retry_jitter;

    auto& t = j["topology"];
    t["region_x"] = sc.topology.region_x;
    t["region_y"] = sc.topology.region_y;
    t["node_depth_min"] = sc.topology.node_depth_min;
    t["node_depth_max"] = sc.topology.node_depth_max;
    t["one_hop_range"] = sc.topology.one_hop_range;
    t["node_count"] = sc.topology.node_count;
    t["max_active_links"] = sc.topology.max_active_links;
    t["max_hops"] = sc.topology.max_hops;
    t["active_links"] = sc.topology.active_links;
    t["nodes"] = json::array();
    for (const auto& n : sc.topology.nodes)
        t["nodes"].push_back({{"depth", n.depth}, {"x", n.x}, {"y", n.y}});
    t["flows"] = json::array();
    for (const auto& f : sc.topology.flows)
        t["flows"].push_back({{"source", f.source}, {"destination", f.destination}});

    j["traffic"] = {{"mean_interarrival", sc.traffic.mean_interarrival},
                    {"packet_length", sc.traffic.packet_length}};
    j["run"] = {{"duration", sc.run.duration},
                {"seed", sc.run.seed},
                {"warmup", sc.run.warmup},
                {"metrics_bin", sc.run.metrics_bin},
                {"sense_threshold_scale", sc.run.sense_threshold_scale}};
    return j;
}

json parse_json(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
    }
}

}  // namespace

sim::Scenario parse_scenario(std::string_view json_text) {
    const json root = parse_json(json_text);
    return from_json(root);
}

sim::Scenario load_scenario(const std::filesystem::path& path) { return load_scenario(path, {}); }

sim::Scenario load_scenario(const std::filesystem::path& path,
                            const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    sim::Scenario sc = parse_scenario(buf.str());
    if (sc.channel.arrival_file_path && sc.channel.arrival_file_path->is_relative())
        sc.channel.arrival_file_path = path.parent_path() / *sc.channel.arrival_file_path;
    for (const auto& o : overrides) apply_override(sc, o);
    sc = sim::materialize(std::move(sc));
    sim::validate(sc);
    return sc;
}

std::string emit_scenario(const sim::Scenario& scenario) { return to_json(scenario).dump(2) + "\n"; }

std::string config_hash(const sim::Scenario& scenario) {
    const std::string text = to_json(scenario).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) h = (h ^ c) * 0x100000001b3ULL;
    char out[17];
    std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
    return out;
}

void apply_override(sim::Scenario& scenario, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0)
        throw ConfigError("override '" + std::string(assignment) + "' is not of the form key=value");
    const std::string key(assignment.substr(0, eq));
    const std::string raw(assignment.substr(eq + 1));

    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;

    json root = to_json(scenario);
    std::string pointer = "/" + key;
    for (auto& c : pointer)
        if (c == '.') c = '/';
    const json::json_pointer ptr(pointer);
    if (!root.contains(ptr) || key.find('.') == std::string::npos)
        throw ConfigError(key + ": unknown field");
    root[ptr] = value;
    scenario = from_json(root);
}

}  // namespace trmac::config
