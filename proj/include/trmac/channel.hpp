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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "trmac/common.hpp"

namespace trmac::channel {

/// Complex tap vector of a directed link's channel impulse response.
class Cir {
public:
    /// Throws InvalidArgument when empty, when a tap is not finite, or when
    /// sample_interval is not positive.
    Cir(std::vector<Complex> taps, double sample_interval);

    std::span<const Complex> taps() const noexcept { return taps_; }
    std::size_t size() const noexcept { return taps_.size(); }
    double sample_interval() const noexcept { return sample_interval_; }

    /// Tap at `index`; zero outside [0, size()).
    Complex at(std::ptrdiff_t index) const noexcept {
        if (index < 0 || static_cast<std::size_t>(index) >= taps_.size()) return {};
        return taps_[static_cast<std::size_t>(index)];
    }

    Cir scaled(Complex factor) const;

    friend bool operator==(const Cir&, const Cir&) = default;

private:
    std::vector<Complex> taps_;
    double sample_interval_;
};

struct NodePosition {
    double depth = 0.0;  ///< meters, positive down
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const NodePosition&, const NodePosition&) = default;
};

double distance(const NodePosition& a, const NodePosition& b) noexcept;
double horizontal_range(const NodePosition& a, const NodePosition& b) noexcept;

struct SvpPoint {
    double depth = 0.0;
    double speed = 1500.0;

    friend bool operator==(const SvpPoint&, const SvpPoint&) = default;
};

struct Environment {
    double water_depth = 80.0;
    /// Synthetic iso-speed default; measured profiles only matter to ray tracers.
    std::vector<SvpPoint> svp{{0.0, 1500.0}, {80.0, 1500.0}};
    double carrier_frequency = 25e3;
    double bandwidth = 4e3;
    double nominal_sound_speed = 1500.0;

    void validate() const;
    double sample_interval() const noexcept { return 1.0 / bandwidth; }

    friend bool operator==(const Environment&, const Environment&) = default;
};

enum class ModelKind { StatisticalPdp, ArrivalFile };

struct ChannelModelConfig {
    ModelKind model_kind = ModelKind::StatisticalPdp;
    std::size_t tap_count = 129;
    double pdp_decay_constant = 6.25e-4;  ///< seconds
    std::uint64_t rng_seed = 1;
    std::optional<std::filesystem::path> arrival_file_path;
    /// Geometry quanta within which links share a tap realization.
    double depth_quantum = 5.0;
    double range_quantum = 50.0;
    /// Distance at which the expected CIR energy is one.
    double reference_distance = 1.0;

    void validate() const;

    friend bool operator==(const ChannelModelConfig&, const ChannelModelConfig&) = default;
};

/// Statistical CIR for the link between two positions.
///
/// Taps are circular complex Gaussian with an exponential power-delay profile
/// normalized so that E[norm^2] = (reference_distance / d)^2. The tap stream is
/// seeded from the canonical quantized link geometry (sorted endpoint depths and
/// horizontal range), so the result is symmetric in (tx, rx) and links of
/// similar geometry share a realization.
Cir generate_cir(const NodePosition& tx, const NodePosition& rx, const Environment& env,
                 const ChannelModelConfig& cfg);

/// Direct-path propagation delay in seconds.
double direct_path_delay(const NodePosition& tx, const NodePosition& rx, const Environment& env);

struct Arrival {
    double delay = 0.0;      ///< seconds
    double amplitude = 0.0;  ///< >= 0
    double phase = 0.0;      ///< radians
};

/// Parsed arrival file: records grouped by (tx_id, rx_id) in file order.
using ArrivalSet = std::map<LinkId, std::vector<Arrival>>;

/// Parses the `ARRIVALS v1` text format. Throws ParseError with a line number.
ArrivalSet parse_arrivals(std::istream& in);
ArrivalSet read_arrivals(const std::filesystem::path& path);

/// Places arrivals on a tap grid relative to the earliest arrival. Colliding
/// indices add as complex amplitudes.
Cir arrivals_to_cir(std::span<const Arrival> arrivals, double sample_interval);

/// Reads `path` and builds the CIR for `pair`. Throws InvalidArgument naming the
/// pair when the file holds no record for it.
Cir load_arrivals(const std::filesystem::path& path, LinkId pair, double sample_interval);

/// Euclidean norm of the tap vector.
double norm(const Cir& c) noexcept;

/// r[lag] = sum_l a[l] * conj(b[l + lag]); taps outside either vector are zero.
Complex cross_correlation(const Cir& a, const Cir& b, std::ptrdiff_t lag) noexcept;

/// r[lag] / (|a| |b|). Throws InvalidArgument on a zero-norm input.
Complex normalized_cross_correlation(const Cir& a, const Cir& b, std::ptrdiff_t lag);

/// Full correlation sequence for lags -(b.size()-1) .. (a.size()-1); entry i
/// holds lag i - (b.size()-1).
std::vector<Complex> correlation_sequence(const Cir& a, const Cir& b);

/// Keyed store of per-link CIRs for a node set. Only one direction of each pair
/// is generated; the reverse direction is the same realization.
class ChannelTable {
public:
    ChannelTable(std::vector<NodePosition> nodes, Environment env, ChannelModelConfig cfg);

    const Cir& cir(NodeId tx, NodeId rx) const;
    double delay(NodeId tx, NodeId rx) const;
    std::size_t node_count() const noexcept { return nodes_.size(); }
    const NodePosition& position(NodeId id) const { return nodes_.at(id); }
    const Environment& environment() const noexcept { return env_; }

private:
    std::size_t index(NodeId tx, NodeId rx) const;

    std::vector<NodePosition> nodes_;
    Environment env_;
    ChannelModelConfig cfg_;
    std::vector<std::optional<Cir>> cirs_;
    std::vector<double> delays_;
};

}  // namespace trmac::channel
