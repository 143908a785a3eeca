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

#include "trmac/channel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>

#include "trmac/rng.hpp"

namespace trmac::channel {

Cir::Cir(std::vector<Complex> taps, double sample_interval)
    : taps_(std::move(taps)), sample_interval_(sample_interval) {
    if (taps_.empty()) throw InvalidArgument("CIR must have at least one tap");
    if (!(sample_interval_ > 0.0) || !std::isfinite(sample_interval_))
        throw InvalidArgument("CIR sample interval must be positive");
    for (const auto& t : taps_)
        if (!std::isfinite(t.real()) || !std::isfinite(t.imag()))
            throw InvalidArgument("CIR taps must be finite");
}

Cir Cir::scaled(Complex factor) const {
    std::vector<Complex> out(taps_);
    for (auto& t : out) t *= factor;
    return Cir(std::move(out), sample_interval_);
}

double distance(const NodePosition& a, const NodePosition& b) noexcept {
    return std::hypot(a.depth - b.depth, a.x - b.x, a.y - b.y);
}

double horizontal_range(const NodePosition& a, const NodePosition& b) noexcept {
    return std::hypot(a.x - b.x, a.y - b.y);
}

void Environment::validate() const {
    if (!(water_depth > 0.0)) throw InvalidArgument("environment.water_depth must be positive");
    if (!(bandwidth > 0.0)) throw InvalidArgument("environment.bandwidth must be positive");
    if (!(carrier_frequency > 0.0))
        throw InvalidArgument("environment.carrier_frequency must be positive");
    if (!(nominal_sound_speed > 0.0))
        throw InvalidArgument("environment.nominal_sound_speed must be positive");
    for (std::size_t i = 0; i < svp.size(); ++i) {
        if (svp[i].speed < 1400.0 || svp[i].speed > 1600.0)
            throw InvalidArgument("environment.svp speeds must lie in [1400, 1600] m/s");
        if (i > 0 && !(svp[i].depth > svp[i - 1].depth))
            throw InvalidArgument("environment.svp depths must be strictly increasing");
    }
}

void ChannelModelConfig::validate() const {
    if (tap_count < 1) throw InvalidArgument("channel.tap_count must be at least 1");
    if (!(pdp_decay_constant > 0.0))
        throw InvalidArgument("channel.pdp_decay_constant must be positive");
    if (!(depth_quantum > 0.0) || !(range_quantum > 0.0))
        throw InvalidArgument("channel quanta must be positive");
    if (!(reference_distance > 0.0))
        throw InvalidArgument("channel.reference_distance must be positive");
    if (model_kind == ModelKind::ArrivalFile && !arrival_file_path)
        throw InvalidArgument("channel.arrival_file is required for the arrival_file model");
}

namespace {

std::uint64_t quantize(double value, double quantum) {
    return static_cast<std::uint64_t>(std::llround(value / quantum));
}

}  // namespace

Cir generate_cir(const NodePosition& tx, const NodePosition& rx, const Environment& env,
                 const ChannelModelConfig& cfg) {
    cfg.validate();
    if (cfg.model_kind != ModelKind::StatisticalPdp)
        throw InvalidArgument("generate_cir needs the statistical model; use ChannelTable");
    const double d = distance(tx, rx);
    if (!(d > 0.0)) throw InvalidArgument("coincident transmitter and receiver positions");

    const auto qa = quantize(tx.depth, cfg.depth_quantum);
    const auto qb = quantize(rx.depth, cfg.depth_quantum);
    const auto qr = quantize(horizontal_range(tx, rx), cfg.range_quantum);
    Rng rng(hash_combine({cfg.rng_seed, std::min(qa, qb), std::max(qa, qb), qr}));

    const double ts = env.sample_interval();
    std::vector<double> profile(cfg.tap_count);
    double total = 0.0;
    for (std::size_t l = 0; l < cfg.tap_count; ++l) {
        profile[l] = std::exp(-static_cast<double>(l) * ts / cfg.pdp_decay_constant);
        total += profile[l];
    }
    const double spread = cfg.reference_distance / d;
    std::vector<Complex> taps(cfg.tap_count);
    for (std::size_t l = 0; l < cfg.tap_count; ++l) {
        const double sigma = spread * std::sqrt(profile[l] / total / 2.0);
        const double re = rng.normal();
        const double im = rng.normal();
        taps[l] = Complex(sigma * re, sigma * im);
    }
    return Cir(std::move(taps), ts);
}

double direct_path_delay(const NodePosition& tx, const NodePosition& rx, const Environment& env) {
    return distance(tx, rx) / env.nominal_sound_speed;
}

ArrivalSet parse_arrivals(std::istream& in) {
    ArrivalSet out;
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::string first;
        if (!(fields >> first)) continue;
        if (!header) {
            std::string version;
            if (first != "ARRIVALS" || !(fields >> version) || version != "v1")
                throw ParseError("expected header 'ARRIVALS v1'", lineno);
            header = true;
            continue;
        }
        fields.clear();
        fields.str(line);
        long long tx = -1;
        long long rx = -1;
        Arrival a;
        std::string extra;
        if (!(fields >> tx >> rx >> a.delay >> a.amplitude >> a.phase) || (fields >> extra))
            throw ParseError("expected 'tx_id rx_id delay_s amplitude phase_rad'", lineno);
        if (tx < 0 || rx < 0) throw ParseError("node ids must be non-negative", lineno);
        if (!(a.delay >= 0.0) || !std::isfinite(a.delay))
            throw ParseError("delay must be finite and >= 0", lineno);
        if (!(a.amplitude >= 0.0) || !std::isfinite(a.amplitude))
            throw ParseError("amplitude must be finite and >= 0", lineno);
        if (!std::isfinite(a.phase)) throw ParseError("phase must be finite", lineno);
        out[LinkId{static_cast<NodeId>(tx), static_cast<NodeId>(rx)}].push_back(a);
    }
    if (!header) throw ParseError("missing 'ARRIVALS v1' header", lineno == 0 ? 1 : lineno);
    return out;
}

ArrivalSet read_arrivals(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open arrival file " + path.string());
    return parse_arrivals(in);
}

Cir arrivals_to_cir(std::span<const Arrival> arrivals, double sample_interval) {
    if (arrivals.empty()) throw InvalidArgument("no arrivals to place");
    if (!(sample_interval > 0.0)) throw InvalidArgument("sample interval must be positive");
    double earliest = arrivals.front().delay;
    for (const auto& a : arrivals) earliest = std::min(earliest, a.delay);
    std::vector<Complex> taps;
    for (const auto& a : arrivals) {
        const auto idx = static_cast<std::size_t>(std::llround((a.delay - earliest) / sample_interval));
        if (idx >= taps.size()) taps.resize(idx + 1);
        taps[idx] += std::polar(a.amplitude, a.phase);
    }
    return Cir(std::move(taps), sample_interval);
}

Cir load_arrivals(const std::filesystem::path& path, LinkId pair, double sample_interval) {
    const auto set = read_arrivals(path);
    auto it = set.find(pair);
    if (it == set.end() || it->second.empty())
        throw InvalidArgument("arrival file has no records for pair (" + std::to_string(pair.tx) +
                              ", " + std::to_string(pair.rx) + ")");
    return arrivals_to_cir(it->second, sample_interval);
}

double norm(const Cir& c) noexcept {
    double acc = 0.0;
    for (const auto& t : c.taps()) acc += std::norm(t);
    return std::sqrt(acc);
}

Complex cross_correlation(const Cir& a, const Cir& b, std::ptrdiff_t lag) noexcept {
    const auto la = static_cast<std::ptrdiff_t>(a.size());
    const auto lb = static_cast<std::ptrdiff_t>(b.size());
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -lag);
    const std::ptrdiff_t hi = std::min(la, lb - lag);
    Complex acc{};
    const auto ta = a.taps();
    const auto tb = b.taps();
    for (std::ptrdiff_t l = lo; l < hi; ++l)
        acc += ta[static_cast<std::size_t>(l)] * std::conj(tb[static_cast<std::size_t>(l + lag)]);
    return acc;
}

Complex normalized_cross_correlation(const Cir& a, const Cir& b, std::ptrdiff_t lag) {
    const double na = norm(a);
    const double nb = norm(b);
    if (!(na > 0.0) || !(nb > 0.0))
        throw InvalidArgument("normalized cross-correlation of a zero-norm CIR");
    return cross_correlation(a, b, lag) / (na * nb);
}

std::vector<Complex> correlation_sequence(const Cir& a, const Cir& b) {
    const auto la = static_cast<std::ptrdiff_t>(a.size());
    const auto lb = static_cast<std::ptrdiff_t>(b.size());
    std::vector<Complex> out(static_cast<std::size_t>(la + lb - 1));
    for (std::ptrdiff_t lag = -(lb - 1); lag < la; ++lag)
        out[static_cast<std::size_t>(lag + lb - 1)] = cross_correlation(a, b, lag);
    return out;
}

ChannelTable::ChannelTable(std::vector<NodePosition> nodes, Environment env, ChannelModelConfig cfg)
    : nodes_(std::move(nodes)), env_(std::move(env)), cfg_(std::move(cfg)) {
    env_.validate();
    cfg_.validate();
    const std::size_t n = nodes_.size();
    cirs_.resize(n * n);
    delays_.assign(n * n, 0.0);

    ArrivalSet arrivals;
    if (cfg_.model_kind == ModelKind::ArrivalFile) arrivals = read_arrivals(*cfg_.arrival_file_path);

    for (NodeId a = 0; a < n; ++a) {
        for (NodeId b = a + 1; b < n; ++b) {
            Cir c = [&] {
                if (cfg_.model_kind == ModelKind::StatisticalPdp)
                    return generate_cir(nodes_[a], nodes_[b], env_, cfg_);
                auto it = arrivals.find(LinkId{a, b});
                if (it == arrivals.end()) it = arrivals.find(LinkId{b, a});
                if (it == arrivals.end() || it->second.empty())
                    throw InvalidArgument("arrival file has no records for pair (" +
                                          std::to_string(a) + ", " + std::to_string(b) + ")");
                Cir raw = arrivals_to_cir(it->second, env_.sample_interval());
                // Late arrivals beyond the configured tap count are cut.
                std::vector<Complex> taps(raw.taps().begin(), raw.taps().end());
                taps.resize(cfg_.tap_count);
                return Cir(std::move(taps), raw.sample_interval());
            }();
            if (!(norm(c) > 0.0))
                throw InvalidArgument("zero CIR for pair (" + std::to_string(a) + ", " +
                                      std::to_string(b) + ")");
            const double delay = direct_path_delay(nodes_[a], nodes_[b], env_);
            cirs_[index(a, b)] = c;
            cirs_[index(b, a)] = std::move(c);
            delays_[index(a, b)] = delay;
            delays_[index(b, a)] = delay;
        }
    }
}

std::size_t ChannelTable::index(NodeId tx, NodeId rx) const {
    if (tx >= nodes_.size() || rx >= nodes_.size() || tx == rx)
        throw InvalidArgument("no channel for link (" + std::to_string(tx) + ", " +
                              std::to_string(rx) + ")");
    return static_cast<std::size_t>(tx) * nodes_.size() + rx;
}

const Cir& ChannelTable::cir(NodeId tx, NodeId rx) const { return *cirs_[index(tx, rx)]; }

double ChannelTable::delay(NodeId tx, NodeId rx) const { return delays_[index(tx, rx)]; }

}  // namespace trmac::channel
