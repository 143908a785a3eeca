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

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "trmac/channel.hpp"

namespace trmac::phy {

using channel::Cir;

struct PhyConfig {
    double transmit_power = 1.0;  ///< average electric transmit power P, watts
    double acoustic_conversion = 1.0;
    double noise_variance = 1e-8;  ///< sigma^2, watts
    int D = 4;                     ///< up/down-sampling factor
    double min_required_sinr = 1.0;

    /// Acoustic power used in all power accounting.
    double acoustic_power() const noexcept { return acoustic_conversion * transmit_power; }

    void validate() const;
    /// Also checks (tap_count - 1) % D == 0.
    void validate_for(std::size_t tap_count) const;

    friend bool operator==(const PhyConfig&, const PhyConfig&) = default;
};

/// Normalized time-reversed CIR, the basic TR transmit waveform.
class TrWaveform {
public:
    std::span<const Complex> taps() const noexcept { return taps_; }
    std::size_t size() const noexcept { return taps_.size(); }

private:
    friend TrWaveform tr_waveform(const Cir& c);
    explicit TrWaveform(std::vector<Complex> taps) : taps_(std::move(taps)) {}
    std::vector<Complex> taps_;
};

/// g[k] = conj(c[L-1-k]) / |c|.
TrWaveform tr_waveform(const Cir& c);

bool divisible(std::size_t tap_count, int D) noexcept;

/// Down-sampled TR composite response, (c * g)[D l] for l = 0 .. 2(L-1)/D.
std::vector<Complex> composite_response(const Cir& c, int D);

/// Normalized cross-correlation eta_{a,b}[D l - (L-1)] for l = 0 .. 2(L-1)/D.
std::vector<Complex> sampled_correlation(const Cir& a, const Cir& b, int D);

/// Interference coefficients of one TR transmission as seen at a receiver:
/// the transmitter's channel to that receiver and the link its waveform was
/// matched to.
struct CorrelationTerms {
    double norm_sq = 0.0;      ///< |h|^2 of the channel to the receiver
    double peak = 0.0;         ///< |eta[0]|
    double offpeak_sum = 0.0;  ///< sum of |eta[D l - (L-1)]|^2 over l != (L-1)/D
};

/// Terms for the pair (to_receiver, matched_link). Requires equal lengths and
/// divisibility.
CorrelationTerms correlation_terms(const Cir& to_receiver, const Cir& matched_link, int D);

double p_sig(const Cir& c, const PhyConfig& phy);
double p_isi(const Cir& c, const PhyConfig& phy);
double p_ili(const Cir& interferer_to_victim, const Cir& interferer_link, const PhyConfig& phy);
double p_ili(const CorrelationTerms& terms, const PhyConfig& phy) noexcept;

struct TrInterferer {
    Cir to_victim;
    Cir link;
};

/// Effective SINR of simultaneous TR transmissions at the receiver of
/// `signal_link`.
double sinr_atrsts(const Cir& signal_link, std::span<const TrInterferer> interferers,
                   const PhyConfig& phy);

/// Same quantity from precomputed terms. `signal` holds the victim's own
/// autocorrelation terms (peak is ignored). `extra_interference` is added
/// to the denominator in watts.
double sinr_atrsts(const CorrelationTerms& signal, std::span<const CorrelationTerms> interferers,
                   const PhyConfig& phy, double extra_interference = 0.0) noexcept;

/// Down-sampled direct transmission decoded from the strongest tap.
struct SdtTerms {
    double signal = 0.0;    ///< D P |h_strongest|^2
    double residual = 0.0;  ///< D P sum of the other retained taps
    std::size_t strongest = 0;
};

SdtTerms sdt_terms(const Cir& c, const PhyConfig& phy);
double sinr_sdt(const Cir& c, const PhyConfig& phy);

/// Largest admissible |eta| between a prospective interferer's link and its
/// channel to a victim receiver; nullopt when no value is admissible.
std::optional<double> eta_threshold(double victim_link_norm, double victim_autocorr_offpeak_sum,
                                    const Cir& interferer_to_victim, const Cir& interferer_link,
                                    const PhyConfig& phy);

/// Variant taking the interferer's precomputed terms.
std::optional<double> eta_threshold(double victim_link_norm, double victim_autocorr_offpeak_sum,
                                    const CorrelationTerms& interferer, const PhyConfig& phy);

}  // namespace trmac::phy
