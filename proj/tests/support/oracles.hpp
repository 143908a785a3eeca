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


// Brute-force reference implementations shared by the unit and acceptance
// tests. They are written from the definitions, not from the library code.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <random>
#include <vector>

#include "trmac/channel.hpp"

namespace oracle {

using C = std::complex<double>;

inline std::vector<C> random_taps(std::mt19937_64& gen, std::size_t n) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<C> v(n);
    for (auto& t : v) t = {g(gen), g(gen)};
    return v;
}

inline trmac::channel::Cir random_cir(std::mt19937_64& gen, std::size_t n) {
    return trmac::channel::Cir(random_taps(gen, n), 2.5e-4);
}

inline std::vector<C> taps(const trmac::channel::Cir& c) {
    return {c.taps().begin(), c.taps().end()};
}

inline double norm(const std::vector<C>& a) {
    double s = 0.0;
    for (const auto& x : a) s += x.real() * x.real() + x.imag() * x.imag();
    return std::sqrt(s);
}

/// sum_l a[l] conj(b[l + k]), zero outside either vector.
inline C xcorr(const std::vector<C>& a, const std::vector<C>& b, long k) {
    C s{};
    for (long l = 0; l < static_cast<long>(a.size()); ++l) {
        const long m = l + k;
        if (m < 0 || m >= static_cast<long>(b.size())) continue;
        s += a[static_cast<std::size_t>(l)] * std::conj(b[static_cast<std::size_t>(m)]);
    }
    return s;
}

/// Full linear convolution.
inline std::vector<C> conv(const std::vector<C>& a, const std::vector<C>& b) {
    std::vector<C> out(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

inline std::vector<C> reversed_conj(const std::vector<C>& a) {
    std::vector<C> r(a.rbegin(), a.rend());
    for (auto& x : r) x = std::conj(x);
    return r;
}

/// sum of |eta_{a,b}[D l - (L-1)]|^2 over all l (peak included when
/// `with_peak`), straight from the definition.
inline double sampled_eta_energy(const std::vector<C>& a, const std::vector<C>& b, int D,
                                 bool with_peak) {
    const long L = static_cast<long>(a.size());
    const double nn = norm(a) * norm(b);
    double s = 0.0;
    for (long l = 0; l <= 2 * (L - 1) / D; ++l) {
        const long lag = D * l - (L - 1);
        if (!with_peak && lag == 0) continue;
        s += std::norm(xcorr(a, b, lag) / nn);
    }
    return s;
}

}  // namespace oracle
