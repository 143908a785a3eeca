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
#include "trmac/csv.hpp"
#include "trmac/sim/metrics.hpp"
#include "trmac/sim/scenario.hpp"

namespace trmac::presets {

/// Two links from the reference figure: a->b carries the signal, i->j is the
/// concurrent link. All four nodes lie in the y = 0 plane, x is the range.
struct LinkPairGeometry {
    channel::NodePosition a{20.0, 0.0, 0.0};
    channel::NodePosition b{20.0, 1000.0, 0.0};
    channel::NodePosition i{50.0, 0.0, 0.0};
    channel::NodePosition j{70.0, 1000.0, 0.0};
};

struct Params {
    sim::Scenario base;  ///< Table 1 defaults unless overridden
    LinkPairGeometry geometry;

    std::vector<double> snr_db = range(40.0, 80.0, 2.0);  ///< acoustic P / sigma^2
    std::vector<int> factors{1, 2, 4, 8};
    double eta_snr_db = 65.0;
    std::vector<double> etas = range(0.0, 0.95, 0.05);

    double heatmap_depth_step = 5.0;
    double heatmap_range_step = 50.0;
    double heatmap_range_max = 2000.0;

    std::vector<std::size_t> loads{4, 6, 8, 10};
    std::vector<sim::Protocol> protocols{sim::Protocol::Trmac, sim::Protocol::CsmaCa,
                                         sim::Protocol::SCsmaCa};
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    /// Worker threads for simulation sweeps; 0 picks the hardware concurrency.
    unsigned workers = 0;

    /// Inclusive arithmetic grid, robust to accumulated rounding.
    static std::vector<double> range(double lo, double hi, double step);
};

std::vector<std::string_view> names();

/// Columns: snr_db, D, sinr_atrsts, sinr_sdt, sinr_atrsts_db, sinr_sdt_db.
/// Both links transmit concurrently; the SDT variant decodes a->b from its
/// strongest tap with i's direct-transmission power as interference.
csv::Table sinr_vs_snr(const Params& p);

/// Columns: eta, D, sinr, sinr_db. The peak cross-correlation of i->j onto b is
/// replaced by `eta`, everything else comes from the geometry's channels.
csv::Table sinr_vs_eta(const Params& p);

/// Columns: depth, range, eta, valid. Node p sweeps the vertical plane through
/// the reference link i->j; eta is the focusing-instant |eta| between i->p and
/// i->j. The cell coincident with i is emitted with valid = 0 and an empty eta.
csv::Table correlation_heatmap(const Params& p);

struct SweepPoint {
    std::size_t active_links = 0;
    sim::Protocol protocol = sim::Protocol::Trmac;
    std::uint64_t seed = 0;
    sim::MetricsRecord metrics;
};

/// One network simulation per (load, protocol, seed), in that nesting order.
std::vector<SweepPoint> run_sweep(const sim::Scenario& base, const std::vector<std::size_t>& loads,
                                  const std::vector<sim::Protocol>& protocols,
                                  const std::vector<std::uint64_t>& seeds, unsigned workers = 0);

/// Columns: active_links, protocol, seed, generated, delivered, dropped, attempts,
/// drop_ratio, mean_delay, throughput.
csv::Table load_sweep(const Params& p);

/// Columns: protocol, time, delivered, mean_delay, drop_ratio, throughput. One
/// row per metrics bin per protocol, at base load and base seed.
csv::Table timeseries(const Params& p);

/// Dispatches by name; throws ConfigError for an unknown preset.
csv::Table run(std::string_view name, const Params& p);

}  // namespace trmac::presets
