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

// Command-line front end: run a scenario, run a preset, or validate a scenario.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "trmac/common.hpp"
#include "trmac/config.hpp"
#include "trmac/csv.hpp"
#include "trmac/presets.hpp"
#include "trmac/sim/simulator.hpp"

namespace fs = std::filesystem;
using namespace trmac;

namespace {

struct CommonFlags {
    std::optional<std::uint64_t> seed;
    std::optional<double> duration;
    std::string output_dir = ".";
};

std::vector<std::string> flag_overrides(const CommonFlags& f) {
    std::vector<std::string> out;
    if (f.seed) out.push_back("run.seed=" + std::to_string(*f.seed));
    if (f.duration) out.push_back("run.duration=" + csv::number(*f.duration));
    return out;
}

std::ofstream open_output(const fs::path& dir, const std::string& file) {
    fs::create_directories(dir);
    std::ofstream out(dir / file, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + (dir / file).string() + "'");
    return out;
}

csv::Table metrics_table(const sim::Scenario& s, const sim::RunOutput& r) {
    const auto& m = r.metrics;
    auto n = [](std::uint64_t v) { return csv::number(static_cast<long long>(v)); };
    csv::Table t{"metrics",
                 {"protocol", "seed", "duration", "active_links", "generated", "delivered", "dropped",
                  "in_flight", "attempts", "drop_ratio", "mean_delay", "throughput", "busy_time"},
                 {}};
    t.add({std::string(sim::to_string(s.mac.protocol)), n(s.run.seed), csv::number(s.run.duration),
           n(s.topology.flows.size()), n(m.generated), n(m.delivered), n(m.dropped), n(m.in_flight()),
           n(m.attempts), csv::number(m.drop_ratio()), csv::number(m.mean_delay()),
           csv::number(m.throughput()), csv::number(m.busy_time)});
    return t;
}

csv::Table bins_table(const sim::RunOutput& r) {
    csv::Table t{"timeseries", {"time", "delivered", "mean_delay", "drop_ratio", "throughput"}, {}};
    for (const auto& b : r.metrics.bins)
        t.add({csv::number(b.end), csv::number(static_cast<long long>(b.delivered)),
               csv::number(b.mean_delay), csv::number(b.drop_ratio), csv::number(b.throughput)});
    return t;
}

void write_table(const fs::path& dir, const csv::Table& t, const std::string& hash, std::uint64_t seed) {
    auto out = open_output(dir, t.name + ".csv");
    csv::write(out, t, hash, seed);
}

int cmd_run(const std::string& path, const CommonFlags& flags, bool trace) {
    const auto scenario = config::load_scenario(path, flag_overrides(flags));
    const fs::path dir = flags.output_dir;
    const auto hash = config::config_hash(scenario);

    std::optional<std::ofstream> trace_out;
    sim::RunOptions options;
    if (trace) {
        trace_out.emplace(open_output(dir, "trace.ndjson"));
        options.trace = &*trace_out;
    }
    const auto result = sim::run(scenario, options);

    open_output(dir, "scenario.json") << config::emit_scenario(scenario);
    write_table(dir, metrics_table(scenario, result), hash, scenario.run.seed);
    write_table(dir, bins_table(result), hash, scenario.run.seed);

    const auto& m = result.metrics;
    std::printf("%s seed=%llu: generated=%llu delivered=%llu dropped=%llu drop_ratio=%.4f "
                "mean_delay=%.3f s throughput=%.2f bit/s\n",
                std::string(sim::to_string(scenario.mac.protocol)).c_str(),
                static_cast<unsigned long long>(scenario.run.seed),
                static_cast<unsigned long long>(m.generated),
                static_cast<unsigned long long>(m.delivered),
                static_cast<unsigned long long>(m.dropped), m.drop_ratio(), m.mean_delay(),
                m.throughput());
    return 0;
}

int cmd_preset(const std::string& name, const std::vector<std::string>& overrides,
               const std::string& scenario_path, const CommonFlags& flags, unsigned seeds,
               unsigned workers) {
    presets::Params p;
    auto all = overrides;
    for (auto& o : flag_overrides(flags)) all.push_back(o);
    if (!scenario_path.empty()) {
        p.base = config::load_scenario(scenario_path, all);
    } else {
        for (const auto& o : all) config::apply_override(p.base, o);
        sim::validate(p.base);
    }
    if (seeds == 0) throw ConfigError("--seeds: must be at least 1");
    p.seeds.clear();
    for (unsigned k = 0; k < seeds; ++k) p.seeds.push_back(p.base.run.seed + k);
    p.workers = workers;

    const auto table = presets::run(name, p);
    write_table(flags.output_dir, table, config::config_hash(p.base), p.base.run.seed);
    std::printf("%s: %zu rows -> %s\n", name.c_str(), table.rows.size(),
                (fs::path(flags.output_dir) / (table.name + ".csv")).string().c_str());
    return 0;
}

int cmd_validate(const std::string& path, const CommonFlags& flags) {
    const auto scenario = config::load_scenario(path, flag_overrides(flags));
    const auto routes = sim::compute_routes(scenario);
    std::size_t longest = 0;
    for (const auto& r : routes) longest = std::max(longest, r.size() - 1);
    std::printf("ok: %zu nodes, %zu flows, longest route %zu hops, config_hash=%s\n",
                scenario.topology.nodes.size(), scenario.topology.flows.size(), longest,
                config::config_hash(scenario).c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-reversal MAC underwater network simulator"};
    app.require_subcommand(1);

    CommonFlags flags;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", flags.seed, "Run seed (overrides run.seed)");
        cmd->add_option("--duration", flags.duration, "Simulated seconds (overrides run.duration)")
            ->check(CLI::NonNegativeNumber);
        cmd->add_option("-o,--output-dir", flags.output_dir, "Directory for CSV and trace output");
    };

    std::string scenario_path;
    bool trace = false;
    auto* run = app.add_subcommand("run", "Simulate one scenario");
    run->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    run->add_flag("--trace", trace, "Also write trace.ndjson");
    add_common(run);

    std::string preset_name;
    std::vector<std::string> overrides;
    std::string preset_scenario;
    unsigned seeds = 10;
    unsigned workers = 0;
    auto* preset = app.add_subcommand("preset", "Run a named experiment preset");
    preset->add_option("name", preset_name, "sinr_vs_snr | sinr_vs_eta | correlation_heatmap | "
                                            "load_sweep | timeseries")
        ->required();
    preset->add_option("overrides", overrides, "section.field=value scenario overrides");
    preset->add_option("--scenario", preset_scenario, "Base scenario instead of the defaults");
    preset->add_option("--seeds", seeds, "Number of consecutive seeds for load_sweep");
    preset->add_option("--workers", workers, "Parallel simulations (0 = all cores)");
    add_common(preset);

    auto* validate = app.add_subcommand("validate", "Check a scenario without running it");
    validate->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    add_common(validate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*run) return cmd_run(scenario_path, flags, trace);
        if (*preset) return cmd_preset(preset_name, overrides, preset_scenario, flags, seeds, workers);
        if (*validate) return cmd_validate(scenario_path, flags);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
