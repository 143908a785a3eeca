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

#include "trmac/presets.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "trmac/common.hpp"
#include "trmac/sim/simulator.hpp"
#include "trmac/tr_phy.hpp"

namespace trmac::presets {
namespace {

using csv::number;

double to_db(double x) { return 10.0 * std::log10(x); }

std::string num(std::size_t v) { return number(static_cast<long long>(v)); }

struct LinkChannels {
    channel::Cir ab, ib, ij;
};

LinkChannels link_channels(const Params& p) {
    const auto cfg = p.base.effective_channel();
    const auto& env = p.base.environment;
    const auto& g = p.geometry;
    return {channel::generate_cir(g.a, g.b, env, cfg), channel::generate_cir(g.i, g.b, env, cfg),
            channel::generate_cir(g.i, g.j, env, cfg)};
}

phy::PhyConfig phy_at(const Params& p, int D, double snr_db) {
    auto phy = p.base.phy;
    phy.D = D;
    phy.noise_variance = phy.acoustic_power() / std::pow(10.0, snr_db / 10.0);
    phy.validate_for(p.base.channel.tap_count);
    return phy;
}

/// Runs fn(0..n-1) on a small pool. Results land by index, so output order
/// never depends on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
    unsigned w = workers ? workers : std::max(1u, std::thread::hardware_concurrency());
    w = static_cast<unsigned>(std::min<std::size_t>(w, n));
    if (w <= 1) {
        for (std::size_t k = 0; k < n; ++k) fn(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < w; ++t) {
        pool.emplace_back([&] {
            for (std::size_t k = next++; k < n; k = next++) {
                try {
                    fn(k);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace

std::vector<double> Params::range(double lo, double hi, double step) {
    std::vector<double> out;
    const auto n = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
    for (long long k = 0; k <= n; ++k) out.push_back(lo + static_cast<double>(k) * step);
    return out;
}

std::vector<std::string_view> names() {
    return {"sinr_vs_snr", "sinr_vs_eta", "correlation_heatmap", "load_sweep", "timeseries"};
}

csv::Table sinr_vs_snr(const Params& p) {
    if (p.snr_db.empty() || p.factors.empty()) throw ConfigError("sinr_vs_snr: empty grid");
    const auto ch = link_channels(p);
    csv::Table t{"sinr_vs_snr",
                 {"snr_db", "D", "sinr_atrsts", "sinr_sdt", "sinr_atrsts_db", "sinr_sdt_db"},
                 {}};
    for (int D : p.factors) {
        for (double snr : p.snr_db) {
            const auto phy = phy_at(p, D, snr);
            const phy::TrInterferer other{ch.ib, ch.ij};
            const double tr = phy::sinr_atrsts(ch.ab, std::span(&other, 1), phy);
            const auto own = phy::sdt_terms(ch.ab, phy);
            const auto cross = phy::sdt_terms(ch.ib, phy);
            const double sdt =
                own.signal / (own.residual + phy.noise_variance + cross.signal + cross.residual);
            t.add({number(snr), number(static_cast<long long>(D)), number(tr), number(sdt),
                   number(to_db(tr)), number(to_db(sdt))});
        }
    }
    return t;
}

csv::Table sinr_vs_eta(const Params& p) {
    if (p.etas.empty() || p.factors.empty()) throw ConfigError("sinr_vs_eta: empty grid");
    const auto ch = link_channels(p);
    csv::Table t{"sinr_vs_eta", {"eta", "D", "sinr", "sinr_db"}, {}};
    for (int D : p.factors) {
        const auto phy = phy_at(p, D, p.eta_snr_db);
        const auto own = phy::correlation_terms(ch.ab, ch.ab, D);
        auto cross = phy::correlation_terms(ch.ib, ch.ij, D);
        for (double eta : p.etas) {
            if (eta < 0.0 || eta >= 1.0) throw ConfigError("sinr_vs_eta: eta must lie in [0, 1)");
            cross.peak = eta;
            const double s = phy::sinr_atrsts(own, std::span(&cross, 1), phy);
            t.add({number(eta), number(static_cast<long long>(D)), number(s), number(to_db(s))});
        }
    }
    return t;
}

csv::Table correlation_heatmap(const Params& p) {
    if (p.base.channel.model_kind != channel::ModelKind::StatisticalPdp)
        throw ConfigError("correlation_heatmap: needs the statistical channel model");
    const auto cfg = p.base.effective_channel();
    const auto& env = p.base.environment;
    const auto& g = p.geometry;
    const auto reference = channel::generate_cir(g.i, g.j, env, cfg);
    const auto depths = Params::range(0.0, env.water_depth, p.heatmap_depth_step);
    const auto ranges = Params::range(0.0, p.heatmap_range_max, p.heatmap_range_step);
    if (depths.empty() || ranges.empty()) throw ConfigError("correlation_heatmap: empty grid");

    csv::Table t{"correlation_heatmap", {"depth", "range", "eta", "valid"}, {}};
    for (double depth : depths) {
        for (double r : ranges) {
            const channel::NodePosition node{depth, g.i.x + r, g.i.y};
            if (channel::distance(node, g.i) == 0.0) {
                t.add({number(depth), number(r), "", "0"});
                continue;
            }
            const auto to_p = channel::generate_cir(g.i, node, env, cfg);
            const auto terms = phy::correlation_terms(to_p, reference, p.base.phy.D);
            t.add({number(depth), number(r), number(terms.peak), "1"});
        }
    }
    return t;
}

std::vector<SweepPoint> run_sweep(const sim::Scenario& base, const std::vector<std::size_t>& loads,
                                  const std::vector<sim::Protocol>& protocols,
                                  const std::vector<std::uint64_t>& seeds, unsigned workers) {
    if (loads.empty() || protocols.empty() || seeds.empty())
        throw ConfigError("sweep: loads, protocols and seeds must be nonempty");
    std::vector<SweepPoint> points;
    for (auto load : loads)
        for (auto proto : protocols)
            for (auto seed : seeds) points.push_back(SweepPoint{load, proto, seed, {}});

    // Validate every point before any simulation runs.
    std::vector<sim::Scenario> scenarios;
    for (const auto& pt : points) {
        sim::Scenario s = base;
        s.run.seed = pt.seed;
        s.mac.protocol = pt.protocol;
        auto& topo = s.topology;
        if (topo.flows.empty()) {
            topo.active_links = pt.active_links;
            if (topo.nodes.empty()) topo.max_active_links = std::max(topo.max_active_links, pt.active_links);
        } else {
            if (topo.flows.size() < pt.active_links)
                throw ConfigError("sweep: scenario lists fewer flows than the requested load");
            topo.flows.resize(pt.active_links);
            topo.active_links = pt.active_links;
        }
        s = sim::materialize(std::move(s));
        sim::validate(s);
        scenarios.push_back(std::move(s));
    }
    parallel_for(points.size(), workers,
                 [&](std::size_t k) { points[k].metrics = sim::run(scenarios[k]).metrics; });
    return points;
}

csv::Table load_sweep(const Params& p) {
    const auto points = run_sweep(p.base, p.loads, p.protocols, p.seeds, p.workers);
    csv::Table t{"load_sweep",
                 {"active_links", "protocol", "seed", "generated", "delivered", "dropped",
                  "attempts", "drop_ratio", "mean_delay", "throughput"},
                 {}};
    for (const auto& pt : points) {
        const auto& m = pt.metrics;
        t.add({num(pt.active_links), std::string(sim::to_string(pt.protocol)),
               number(static_cast<long long>(pt.seed)), num(m.generated), num(m.delivered),
               num(m.dropped), num(m.attempts), number(m.drop_ratio()), number(m.mean_delay()),
               number(m.throughput())});
    }
    return t;
}

csv::Table timeseries(const Params& p) {
    const std::size_t load = p.base.topology.flows.empty() ? p.base.topology.active_links
                                                           : p.base.topology.flows.size();
    const auto points = run_sweep(p.base, {load}, p.protocols, {p.base.run.seed}, p.workers);
    csv::Table t{"timeseries",
                 {"protocol", "time", "delivered", "mean_delay", "drop_ratio", "throughput"},
                 {}};
    for (const auto& pt : points) {
        for (const auto& bin : pt.metrics.bins) {
            t.add({std::string(sim::to_string(pt.protocol)), number(bin.end), num(bin.delivered),
                   number(bin.mean_delay), number(bin.drop_ratio), number(bin.throughput)});
        }
    }
    return t;
}

csv::Table run(std::string_view name, const Params& p) {
    if (name == "sinr_vs_snr") return sinr_vs_snr(p);
    if (name == "sinr_vs_eta") return sinr_vs_eta(p);
    if (name == "correlation_heatmap") return correlation_heatmap(p);
    if (name == "load_sweep") return load_sweep(p);
    if (name == "timeseries") return timeseries(p);
    std::string known;
    for (auto n : names()) known += (known.empty() ? "" : ", ") + std::string(n);
    throw ConfigError("unknown preset '" + std::string(name) + "' (" + known + ")");
}

}  // namespace trmac::presets
