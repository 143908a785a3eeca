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


// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails. Every tolerance is fixed below.
//
// Usage: acceptance [path-to-trmac-cli]
// With the CLI path, the determinism check also compares two CLI runs byte
// for byte.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../support/oracles.hpp"
#include "trmac/channel.hpp"
#include "trmac/csv.hpp"
#include "trmac/mac/frame.hpp"
#include "trmac/presets.hpp"
#include "trmac/sim/simulator.hpp"
#include "trmac/tr_phy.hpp"

using namespace trmac;
namespace fs = std::filesystem;

namespace {

// Tolerances and budgets.
constexpr double kEtaBound = 1e-12;
constexpr double kAutoPeak = 1e-12;
constexpr double kScale = 1e-12;
constexpr double kConvolution = 1e-10;
constexpr double kCorrelationBudget = 5.0;  // seconds
constexpr double kThresholdRel = 1e-6;
constexpr double kThresholdStep = 0.01;
constexpr double kThresholdBudget = 10.0;  // seconds
constexpr double kNoiseLimitRel = 0.01;
constexpr double kTimerTol = 5e-5;  // the expected values are given to four decimals
constexpr double kEventTick = 1e-6;  // seconds
constexpr int kOrderingSeedsNeeded = 8;
constexpr double kOrderingBudget = 300.0;  // seconds
constexpr double kSoftDropTarget = 0.10;
constexpr double kPlateau = 0.05;  // throughput may sag this fraction below its running peak
constexpr int kTrendViolationsAllowed = 1;
constexpr double kHeatmapFar = 200.0;  // meters in the depth-range plane
constexpr double kHeatmapMean = 0.5;
constexpr double kHeatmapPeak = 1e-12;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Result {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string cli_path;

// 1 -------------------------------------------------------------------------
Result correlation_properties() {
    const auto t0 = Clock::now();
    std::mt19937_64 gen(20260101);
    std::uniform_int_distribution<std::size_t> len(1, 16);
    double worst_bound = 0.0, worst_peak = 0.0, worst_scale = 0.0, worst_conv = 0.0;
    for (int pair = 0; pair < 1000; ++pair) {
        const std::size_t L = len(gen);
        const auto a = oracle::random_cir(gen, L), b = oracle::random_cir(gen, L);
        const auto ta = oracle::taps(a), tb = oracle::taps(b);
        const Complex s(std::exp(std::normal_distribution<double>(0, 1)(gen)),
                        std::normal_distribution<double>(0, 1)(gen));
        const auto as = a.scaled(s);
        const auto L_ = static_cast<long>(L);

        worst_peak = std::max(worst_peak, std::abs(channel::normalized_cross_correlation(a, a, 0) - 1.0));
        for (long k = -(L_ - 1); k <= L_ - 1; ++k) {
            const Complex eta = channel::normalized_cross_correlation(a, b, k);
            worst_bound = std::max(worst_bound, std::abs(eta) - 1.0);
            // Scaling by s rotates eta by the phase of s and nothing else.
            const Complex scaled = channel::normalized_cross_correlation(as, b, k);
            worst_scale = std::max(worst_scale, std::abs(scaled * std::conj(s) / std::abs(s) - eta));
            worst_scale = std::max(worst_scale, std::abs(std::abs(scaled) - std::abs(eta)));
        }
        const auto full = oracle::conv(ta, oracle::reversed_conj(tb));
        for (long k = 0; k < static_cast<long>(full.size()); ++k) {
            const Complex lib = channel::cross_correlation(a, b, (L_ - 1) - k);
            worst_conv = std::max(worst_conv, std::abs(full[static_cast<std::size_t>(k)] - lib));
            worst_conv = std::max(worst_conv, std::abs(oracle::xcorr(ta, tb, (L_ - 1) - k) - lib));
        }
    }
    const double elapsed = seconds_since(t0);
    const bool pass = worst_bound <= kEtaBound && worst_peak <= kAutoPeak && worst_scale <= kScale &&
                      worst_conv <= kConvolution && elapsed < kCorrelationBudget;
    return {pass, fmt("1000 pairs; max(|eta|-1)=%.2e, |eta_aa[0]-1|<=%.2e, scale err %.2e, "
                      "convolution err %.2e, %.2f s",
                      worst_bound, worst_peak, worst_scale, worst_conv, elapsed)};
}

// 2 -------------------------------------------------------------------------
Result closed_forms() {
    phy::PhyConfig p;
    p.D = 4;
    p.transmit_power = 1.0;
    p.noise_variance = 1.0;
    const channel::Cir one({1.0}, 2.5e-4);
    const double tr = phy::sinr_atrsts(one, {}, p);
    const double sdt = phy::sinr_sdt(one, p);
    const double isi = phy::p_isi(one, p);

    phy::PhyConfig q;
    q.D = 1;
    q.transmit_power = 1.0;
    const double isi2 = phy::p_isi(channel::Cir({1.0, 1.0}, 2.5e-4), q);
    const bool pass = tr == 4.0 && sdt == 4.0 && isi == 0.0 && std::abs(isi2 - 1.0) <= 1e-12;
    return {pass, fmt("sinr_atrsts=%.17g sinr_sdt=%.17g p_isi=%.17g; p_isi([1,1],D=1)=%.17g",
                      tr, sdt, isi, isi2)};
}

// 3 -------------------------------------------------------------------------
Result threshold_consistency() {
    const auto t0 = Clock::now();
    std::mt19937_64 gen(777);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int found = 0, tries = 0, bad_equal = 0, bad_below = 0, bad_above = 0;
    double worst = 0.0;
    while (found < 100 && tries < 100000) {
        ++tries;
        phy::PhyConfig p;
        p.D = std::array{1, 2, 4, 8}[gen() % 4];
        p.transmit_power = std::pow(10.0, u(gen) * 2 - 1);
        p.min_required_sinr = std::pow(10.0, u(gen) * 1.2 - 0.6);
        const std::size_t L = 8 * (1 + gen() % 4) + 1;
        const auto victim = oracle::random_cir(gen, L);
        const auto to_victim = oracle::random_cir(gen, L).scaled(std::pow(10.0, u(gen) * 1.5 - 1.5));
        const auto link = oracle::random_cir(gen, L);
        p.noise_variance = p.D * p.acoustic_power() * std::pow(channel::norm(victim), 2) *
                           std::pow(10.0, -1 - 3 * u(gen));

        const auto own = phy::correlation_terms(victim, victim, p.D);
        auto cross = phy::correlation_terms(to_victim, link, p.D);
        const auto eta = phy::eta_threshold(channel::norm(victim), own.offpeak_sum, to_victim, link, p);
        if (!eta || !(*eta > 0.0) || !(*eta < 1.0)) continue;
        ++found;

        auto sinr = [&](double peak) {
            cross.peak = std::max(peak, 0.0);
            return phy::sinr_atrsts(own, std::span(&cross, 1), p);
        };
        const double g = p.min_required_sinr;
        const double rel = std::abs(sinr(*eta) - g) / g;
        worst = std::max(worst, rel);
        if (rel > kThresholdRel) ++bad_equal;
        if (!(sinr(*eta - kThresholdStep) > g)) ++bad_below;
        if (!(sinr(*eta + kThresholdStep) < g)) ++bad_above;
    }
    const double elapsed = seconds_since(t0);
    const bool pass = found == 100 && bad_equal == 0 && bad_below == 0 && bad_above == 0 &&
                      elapsed < kThresholdBudget;
    return {pass, fmt("%d scenarios (%d drawn); max rel err %.2e; below/above violations %d/%d; %.2f s",
                      found, tries, worst, bad_below, bad_above, elapsed)};
}

// 4 -------------------------------------------------------------------------
Result noise_limited_gain() {
    std::mt19937_64 gen(4242);
    int bad = 0;
    double worst = 0.0, min_ratio = INFINITY;
    for (int n = 0; n < 100; ++n) {
        phy::PhyConfig p;
        p.D = std::array{1, 2, 4, 8}[n % 4];
        const std::size_t L = 8 * (1 + gen() % 8) + 1;
        const auto c = oracle::random_cir(gen, L);
        const auto t = oracle::taps(c);
        const double n2 = std::pow(oracle::norm(t), 2);
        double strongest = 0.0;
        for (const auto& x : t) strongest = std::max(strongest, std::norm(x));
        p.noise_variance = 1e6 * p.D * p.acoustic_power() * n2;
        const double ratio = phy::sinr_atrsts(c, {}, p) / phy::sinr_sdt(c, p);
        const double expect = n2 / strongest;
        const double rel = std::abs(ratio - expect) / expect;
        worst = std::max(worst, rel);
        min_ratio = std::min(min_ratio, ratio);
        if (rel > kNoiseLimitRel || ratio < 1.0) ++bad;
    }
    return {bad == 0, fmt("100 CIRs; max rel err %.2e; min ratio %.3f", worst, min_ratio)};
}

// 5 -------------------------------------------------------------------------
Result eta_monotonicity() {
    presets::Params p;
    const auto t = presets::sinr_vs_eta(p);
    const auto ce = t.column("eta"), cd = t.column("D"), cs = t.column("sinr"), cdb = t.column("sinr_db");
    bool monotone = true;
    std::vector<std::pair<int, double>> drops;
    for (int D : p.factors) {
        std::vector<std::pair<double, double>> curve;  // (eta, sinr)
        double db0 = NAN, db9 = NAN;
        for (const auto& row : t.rows) {
            if (std::stoi(row[cd]) != D) continue;
            const double eta = std::stod(row[ce]);
            curve.emplace_back(eta, std::stod(row[cs]));
            if (std::abs(eta - 0.0) < 1e-9) db0 = std::stod(row[cdb]);
            if (std::abs(eta - 0.9) < 1e-9) db9 = std::stod(row[cdb]);
        }
        std::sort(curve.begin(), curve.end());
        for (std::size_t k = 1; k < curve.size(); ++k)
            if (curve[k].second > curve[k - 1].second) monotone = false;
        drops.emplace_back(D, db0 - db9);
    }
    bool steeper = true;
    for (std::size_t k = 1; k < drops.size(); ++k)
        if (!(drops[k].second > drops[k - 1].second)) steeper = false;
    std::string d;
    for (const auto& [D, drop] : drops) d += fmt(" D=%d:%.2fdB", D, drop);
    return {monotone && steeper && drops.size() == 4,
            fmt("non-increasing=%s; drop 0->0.9:%s", monotone ? "yes" : "no", d.c_str())};
}

// 6 -------------------------------------------------------------------------
Result timers_and_hand_trace() {
    sim::Scenario s;
    const auto t = s.timers();
    const bool timers_ok = std::abs(t.t_p - 0.6667) <= kTimerTol && t.t_tr == 0.5 && t.delta == 0.25 &&
                           std::abs(t.t_cl() - 1.4167) <= kTimerTol &&
                           std::abs(t.t_th() - 2.0833) <= kTimerTol;

    s.topology.nodes = {{20, 100, 100}, {30, 900, 100}};
    s.topology.node_count = 2;
    s.topology.flows = {{0, 1}};
    s.topology.active_links = 1;
    s.traffic.mean_interarrival = 200.0;
    s.run.duration = 1000.0;
    std::vector<sim::TraceRecord> records;
    sim::run(s, {nullptr, &records});
    double simulated = NAN;
    for (const auto& r : records)
        if (r.kind == sim::TraceKind::Delivered) {
            simulated = r.value;
            break;
        }
    // P_R (control airtime, propagation), PRO back (same), zero backoff because
    // T_Pro = T_cl, TR_DATA airtime and one more propagation.
    const double prop = channel::distance(s.topology.nodes[0], s.topology.nodes[1]) / 1500.0;
    const double ctrl = s.frame_sizes().duration(s.mac.control_frame_bits);
    const double hand = (ctrl + prop) + (ctrl + prop) + 0.0 + t.t_tr + prop;
    const bool trace_ok = std::abs(simulated - hand) <= kEventTick;
    return {timers_ok && trace_ok,
            fmt("T_cl=%.5f T_th=%.5f; single-hop delay sim %.9f vs hand %.9f", t.t_cl(), t.t_th(),
                simulated, hand)};
}

// 7 & 8 shared --------------------------------------------------------------
struct Means {
    double drop = 0, delay = 0, throughput = 0;
};

// 7 -------------------------------------------------------------------------
Result protocol_ordering() {
    const auto t0 = Clock::now();
    sim::Scenario base;
    base.run.duration = 2000.0;
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t k = 1; k <= 10; ++k) seeds.push_back(k);
    const std::vector<sim::Protocol> protos{sim::Protocol::Trmac, sim::Protocol::CsmaCa,
                                            sim::Protocol::SCsmaCa};
    const auto pts = presets::run_sweep(base, {10}, protos, seeds);
    const double elapsed = seconds_since(t0);

    auto at = [&](sim::Protocol p, std::uint64_t seed) -> const sim::MetricsRecord& {
        for (const auto& pt : pts)
            if (pt.protocol == p && pt.seed == seed) return pt.metrics;
        throw std::logic_error("missing sweep point");
    };
    int wins = 0;
    Means tr, cs, sc;
    for (auto seed : seeds) {
        const auto& a = at(sim::Protocol::Trmac, seed);
        const auto& b = at(sim::Protocol::CsmaCa, seed);
        const auto& c = at(sim::Protocol::SCsmaCa, seed);
        const bool win = a.drop_ratio() < b.drop_ratio() && a.drop_ratio() < c.drop_ratio() &&
                         a.mean_delay() < b.mean_delay() && a.mean_delay() < c.mean_delay() &&
                         a.throughput() > b.throughput() && a.throughput() > c.throughput();
        wins += win;
        for (auto [m, r] : {std::pair{&tr, &a}, {&cs, &b}, {&sc, &c}}) {
            m->drop += r->drop_ratio() / 10;
            m->delay += r->mean_delay() / 10;
            m->throughput += r->throughput() / 10;
        }
    }
    const bool pass = wins >= kOrderingSeedsNeeded && elapsed < kOrderingBudget;
    return {pass, fmt("TRMAC wins all three metrics in %d/10 seeds; mean drop/delay/throughput "
                      "TRMAC %.3f/%.1fs/%.1fbps, CSMA/CA %.3f/%.1fs/%.1fbps, S-CSMA/CA "
                      "%.3f/%.1fs/%.1fbps; soft target drop<%.2f %s; %.1f s",
                      wins, tr.drop, tr.delay, tr.throughput, cs.drop, cs.delay, cs.throughput,
                      sc.drop, sc.delay, sc.throughput, kSoftDropTarget,
                      tr.drop < kSoftDropTarget ? "met" : "missed", elapsed)};
}

// 8 -------------------------------------------------------------------------
Result load_trend() {
    const std::vector<std::size_t> loads{4, 6, 8, 10};
    sim::Scenario base;
    base.run.duration = 2000.0;
    int violations = 0;
    std::string where;
    for (int set = 0; set < 10; ++set) {
        std::vector<std::uint64_t> seeds;
        for (std::uint64_t k = 1; k <= 10; ++k) seeds.push_back(static_cast<std::uint64_t>(set) * 10 + k);
        const auto pts = presets::run_sweep(base, loads, {sim::Protocol::Trmac}, seeds);
        std::vector<Means> m(loads.size());
        for (const auto& pt : pts) {
            const auto i = static_cast<std::size_t>(std::find(loads.begin(), loads.end(), pt.active_links) -
                                                    loads.begin());
            m[i].drop += pt.metrics.drop_ratio() / 10;
            m[i].delay += pt.metrics.mean_delay() / 10;
            m[i].throughput += pt.metrics.throughput() / 10;
        }
        bool ok = true;
        double peak = m[0].throughput;
        for (std::size_t i = 1; i < m.size(); ++i) {
            if (m[i].drop < m[i - 1].drop || m[i].delay < m[i - 1].delay ||
                m[i].throughput < (1.0 - kPlateau) * peak)
                ok = false;
            peak = std::max(peak, m[i].throughput);
        }
        if (!ok) {
            ++violations;
            where += fmt(" set%d(seeds %d-%d: drop", set + 1, set * 10 + 1, set * 10 + 10);
            for (const auto& x : m) where += fmt(" %.4f", x.drop);
            where += "; delay";
            for (const auto& x : m) where += fmt(" %.2f", x.delay);
            where += "; tput";
            for (const auto& x : m) where += fmt(" %.1f", x.throughput);
            where += ")";
        }
    }
    return {violations <= kTrendViolationsAllowed,
            fmt("%d of 10 seed sets violate the trend (allowed %d)%s", violations,
                kTrendViolationsAllowed, where.c_str())};
}

// 9 -------------------------------------------------------------------------
std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Result determinism() {
    auto render = [] {
        presets::Params p;
        p.base.run.duration = 500.0;
        p.loads = {4, 10};
        p.seeds = {3, 4};
        p.workers = 2;  // completion order must not leak into the output
        std::ostringstream out;
        csv::write(out, presets::load_sweep(p), "x", 3);
        csv::write(out, presets::timeseries(p), "x", 3);
        return out.str();
    };
    const std::string a = render(), b = render();
    bool same = a == b && !a.empty();
    std::string detail = fmt("in-process sweep CSV %zu bytes %s", a.size(), same ? "identical" : "DIFFER");

    if (!cli_path.empty()) {
        const fs::path root = fs::temp_directory_path() / "trmac_acceptance_det";
        fs::remove_all(root);
        fs::create_directories(root);
        std::ofstream(root / "scenario_in.json") << "{}";
        bool files_same = true;
        for (const char* run : {"a", "b"}) {
            const std::string cmd = "\"" + cli_path + "\" run \"" + (root / "scenario_in.json").string() +
                                    "\" --seed 5 --duration 600 --trace -o \"" +
                                    (root / run).string() + "\" > /dev/null";
            if (std::system(cmd.c_str()) != 0) files_same = false;
        }
        for (const char* f : {"metrics.csv", "timeseries.csv", "trace.ndjson", "scenario.json"}) {
            const auto x = slurp(root / "a" / f), y = slurp(root / "b" / f);
            if (x.empty() || x != y) files_same = false;
        }
        fs::remove_all(root);
        same = same && files_same;
        detail += fmt("; CLI run outputs %s", files_same ? "identical" : "DIFFER");
    }
    return {same, detail};
}

// 10 ------------------------------------------------------------------------
Result heatmap() {
    presets::Params p;
    const auto t = presets::correlation_heatmap(p);
    const auto cd = t.column("depth"), cr = t.column("range"), ce = t.column("eta"), cv = t.column("valid");
    const auto& g = p.geometry;
    const double ri = channel::horizontal_range(g.i, g.i), rj = channel::horizontal_range(g.i, g.j);
    double ref_eta = NAN, sum = 0.0;
    int far = 0;
    for (const auto& row : t.rows) {
        if (row[cv] != "1") continue;
        const double depth = std::stod(row[cd]), range = std::stod(row[cr]), eta = std::stod(row[ce]);
        if (std::abs(depth - g.j.depth) < 1e-9 && std::abs(range - rj) < 1e-9) ref_eta = eta;
        const double di = std::hypot(depth - g.i.depth, range - ri);
        const double dj = std::hypot(depth - g.j.depth, range - rj);
        if (di > kHeatmapFar && dj > kHeatmapFar) {
            sum += eta;
            ++far;
        }
    }
    const double mean = far ? sum / far : NAN;
    const bool pass = std::abs(ref_eta - 1.0) <= kHeatmapPeak && far > 0 && mean < kHeatmapMean;
    return {pass, fmt("|eta| at reference receiver %.15f; mean |eta| over %d far cells %.3f", ref_eta,
                      far, mean)};
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) cli_path = argv[1];
    const std::vector<std::pair<const char*, std::function<Result()>>> criteria{
        {"correlation properties", correlation_properties},
        {"sinr closed forms", closed_forms},
        {"threshold self-consistency", threshold_consistency},
        {"noise-limited tr gain", noise_limited_gain},
        {"sinr vs eta monotonicity", eta_monotonicity},
        {"timers and hand-traced latency", timers_and_hand_trace},
        {"protocol ordering", protocol_ordering},
        {"load trend", load_trend},
        {"determinism", determinism},
        {"heatmap sanity", heatmap},
    };
    int failed = 0, n = 0;
    for (const auto& [name, check] : criteria) {
        ++n;
        Result r;
        try {
            r = check();
        } catch (const std::exception& e) {
            r = {false, std::string("exception: ") + e.what()};
        }
        failed += !r.pass;
        std::printf("criterion %2d %-32s %s  %s\n", n, name, r.pass ? "PASS" : "FAIL", r.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%d criteria passed\n", n - failed, n);
    return failed == 0 ? 0 : 1;
}
