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

#include "trmac/tr_phy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace trmac::phy {

using channel::norm;

void PhyConfig::validate() const {
    if (!(transmit_power > 0.0)) throw InvalidArgument("phy.transmit_power must be positive");
    if (!(acoustic_conversion > 0.0))
        throw InvalidArgument("phy.acoustic_conversion must be positive");
    if (!(noise_variance > 0.0)) throw InvalidArgument("phy.noise_variance must be positive");
    if (D < 1) throw InvalidArgument("phy.D must be at least 1");
    if (!(min_required_sinr > 0.0))
        throw InvalidArgument("phy.min_required_sinr must be positive");
}

void PhyConfig::validate_for(std::size_t tap_count) const {
    validate();
    if (!divisible(tap_count, D))
        throw InvalidArgument("(tap_count - 1) must be divisible by D (tap_count " +
                              std::to_string(tap_count) + ", D " + std::to_string(D) + ")");
}

bool divisible(std::size_t tap_count, int D) noexcept {
    return tap_count >= 1 && D >= 1 && (tap_count - 1) % static_cast<std::size_t>(D) == 0;
}

namespace {

void require_divisible(std::size_t tap_count, int D) {
    if (!divisible(tap_count, D))
        throw InvalidArgument("(L - 1) is not divisible by D (L " + std::to_string(tap_count) +
                              ", D " + std::to_string(D) + ")");
}

double require_norm(const Cir& c) {
    const double n = norm(c);
    if (!(n > 0.0)) throw InvalidArgument("zero-norm CIR");
    return n;
}

}  // namespace

TrWaveform tr_waveform(const Cir& c) {
    const double n = require_norm(c);
    const auto taps = c.taps();
    const std::size_t len = taps.size();
    std::vector<Complex> g(len);
    for (std::size_t k = 0; k < len; ++k) g[k] = std::conj(taps[len - 1 - k]) / n;
    return TrWaveform(std::move(g));
}

std::vector<Complex> composite_response(const Cir& c, int D) {
    require_divisible(c.size(), D);
    const auto g = tr_waveform(c);
    const auto h = c.taps();
    const auto w = g.taps();
    const auto len = static_cast<std::ptrdiff_t>(c.size());
    const std::size_t count = 2 * (c.size() - 1) / static_cast<std::size_t>(D) + 1;
    std::vector<Complex> out(count);
    for (std::size_t l = 0; l < count; ++l) {
        const auto k = static_cast<std::ptrdiff_t>(l) * D;
        Complex acc{};
        for (std::ptrdiff_t m = std::max<std::ptrdiff_t>(0, k - (len - 1));
             m <= std::min(k, len - 1); ++m)
            acc += h[static_cast<std::size_t>(m)] * w[static_cast<std::size_t>(k - m)];
        out[l] = acc;
    }
    return out;
}

std::vector<Complex> sampled_correlation(const Cir& a, const Cir& b, int D) {
    if (a.size() != b.size()) throw InvalidArgument("CIR lengths differ");
    require_divisible(a.size(), D);
    const double scale = require_norm(a) * require_norm(b);
    const auto span = static_cast<std::ptrdiff_t>(a.size()) - 1;
    const std::size_t count = 2 * static_cast<std::size_t>(span) / static_cast<std::size_t>(D) + 1;
    std::vector<Complex> out(count);
    for (std::size_t l = 0; l < count; ++l)
        out[l] = channel::cross_correlation(a, b, static_cast<std::ptrdiff_t>(l) * D - span) / scale;
    return out;
}

CorrelationTerms correlation_terms(const Cir& to_receiver, const Cir& matched_link, int D) {
    const auto eta = sampled_correlation(to_receiver, matched_link, D);
    const std::size_t centre = (to_receiver.size() - 1) / static_cast<std::size_t>(D);
    CorrelationTerms t;
    const double n = norm(to_receiver);
    t.norm_sq = n * n;
    for (std::size_t l = 0; l < eta.size(); ++l) {
        if (l == centre)
            t.peak = std::abs(eta[l]);
        else
            t.offpeak_sum += std::norm(eta[l]);
    }
    return t;
}

double p_sig(const Cir& c, const PhyConfig& phy) {
    const double n = norm(c);
    return phy.D * phy.acoustic_power() * n * n;
}

double p_isi(const Cir& c, const PhyConfig& phy) {
    const auto t = correlation_terms(c, c, phy.D);
    return phy.D * phy.acoustic_power() * t.norm_sq * t.offpeak_sum;
}

double p_ili(const CorrelationTerms& terms, const PhyConfig& phy) noexcept {
    return phy.D * phy.acoustic_power() * terms.norm_sq *
           (terms.peak * terms.peak + terms.offpeak_sum);
}

double p_ili(const Cir& interferer_to_victim, const Cir& interferer_link, const PhyConfig& phy) {
    return p_ili(correlation_terms(interferer_to_victim, interferer_link, phy.D), phy);
}

double sinr_atrsts(const CorrelationTerms& signal, std::span<const CorrelationTerms> interferers,
                   const PhyConfig& phy, double extra_interference) noexcept {
    const double dp = phy.D * phy.acoustic_power();
    double denom = dp * signal.norm_sq * signal.offpeak_sum + phy.noise_variance + extra_interference;
    for (const auto& i : interferers) denom += p_ili(i, phy);
    return dp * signal.norm_sq / denom;
}

double sinr_atrsts(const Cir& signal_link, std::span<const TrInterferer> interferers,
                   const PhyConfig& phy) {
    const auto own = correlation_terms(signal_link, signal_link, phy.D);
    std::vector<CorrelationTerms> terms;
    terms.reserve(interferers.size());
    for (const auto& i : interferers) {
        if (i.to_victim.size() != signal_link.size())
            throw InvalidArgument("interferer CIR length differs from the signal link");
        terms.push_back(correlation_terms(i.to_victim, i.link, phy.D));
    }
    return sinr_atrsts(own, terms, phy);
}

SdtTerms sdt_terms(const Cir& c, const PhyConfig& phy) {
    require_norm(c);
    const auto taps = c.taps();
    SdtTerms t;
    double best = -1.0;
    for (std::size_t l = 0; l < taps.size(); ++l) {
        if (std::norm(taps[l]) > best) {
            best = std::norm(taps[l]);
            t.strongest = l;
        }
    }
    // The sampling phase follows the strongest tap so that it is always retained.
    const auto step = static_cast<std::size_t>(phy.D);
    const double dp = phy.D * phy.acoustic_power();
    for (std::size_t l = t.strongest % step; l < taps.size(); l += step) {
        if (l == t.strongest)
            t.signal = dp * std::norm(taps[l]);
        else
            t.residual += dp * std::norm(taps[l]);
    }
    return t;
}

double sinr_sdt(const Cir& c, const PhyConfig& phy) {
    const auto t = sdt_terms(c, phy);
    return t.signal / (t.residual + phy.noise_variance);
}

std::optional<double> eta_threshold(double victim_link_norm, double victim_autocorr_offpeak_sum,
                                    const CorrelationTerms& interferer, const PhyConfig& phy) {
    if (!(victim_link_norm > 0.0)) throw InvalidArgument("victim link norm must be positive");
    const double v2 = victim_link_norm * victim_link_norm;
    const double i2 = interferer.norm_sq;
    const double budget = v2 / phy.min_required_sinr - v2 * victim_autocorr_offpeak_sum -
                          i2 * interferer.offpeak_sum -
                          phy.noise_variance / (phy.D * phy.acoustic_power());
    if (budget < 0.0) return std::nullopt;
    if (!(i2 > 0.0)) return 1.0;
    return std::clamp(std::sqrt(budget / i2), 0.0, 1.0);
}

std::optional<double> eta_threshold(double victim_link_norm, double victim_autocorr_offpeak_sum,
                                    const Cir& interferer_to_victim, const Cir& interferer_link,
                                    const PhyConfig& phy) {
    if (!(victim_link_norm > 0.0)) throw InvalidArgument("victim link norm must be positive");
    return eta_threshold(victim_link_norm, victim_autocorr_offpeak_sum,
                         correlation_terms(interferer_to_victim, interferer_link, phy.D), phy);
}

}  // namespace trmac::phy
