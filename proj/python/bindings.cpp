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


// Python bindings: correlation and SINR math, scenario loading, simulation
// runs and the CSV presets.

#include <pybind11/complex.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "trmac/channel.hpp"
#include "trmac/config.hpp"
#include "trmac/csv.hpp"
#include "trmac/presets.hpp"
#include "trmac/sim/simulator.hpp"
#include "trmac/tr_phy.hpp"

namespace py = pybind11;
using namespace trmac;

namespace {

py::dict metrics_dict(const sim::MetricsRecord& m) {
    py::dict d;
    d["generated"] = m.generated;
    d["delivered"] = m.delivered;
    d["dropped"] = m.dropped;
    d["ack_losses"] = m.ack_losses;
    d["attempts"] = m.attempts;
    d["in_flight"] = m.in_flight();
    d["drop_ratio"] = m.drop_ratio();
    d["mean_delay"] = m.mean_delay();
    d["throughput"] = m.throughput();
    d["busy_time"] = m.busy_time;
    d["received_bits"] = m.received_bits;
    d["delays"] = m.delays;
    return d;
}

py::dict table_dict(const csv::Table& t) {
    py::dict d;
    d["name"] = t.name;
    d["header"] = t.header;
    d["rows"] = t.rows;
    return d;
}

}  // namespace

PYBIND11_MODULE(_trmac, m) {
    m.doc() = "Time-reversal MAC simulator";

    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

    py::class_<channel::Cir>(m, "Cir")
        .def(py::init<std::vector<Complex>, double>(), py::arg("taps"),
             py::arg("sample_interval") = 2.5e-4)
        .def_property_readonly("taps",
                               [](const channel::Cir& c) {
                                   return std::vector<Complex>(c.taps().begin(), c.taps().end());
                               })
        .def_property_readonly("sample_interval", &channel::Cir::sample_interval)
        .def("__len__", &channel::Cir::size)
        .def("scaled", &channel::Cir::scaled)
        .def(py::self == py::self)
        .def("__repr__", [](const channel::Cir& c) {
            return "<Cir " + std::to_string(c.size()) + " taps>";
        });

    py::class_<channel::NodePosition>(m, "NodePosition")
        .def(py::init([](double depth, double x, double y) { return channel::NodePosition{depth, x, y}; }),
             py::arg("depth"), py::arg("x"), py::arg("y"))
        .def_readwrite("depth", &channel::NodePosition::depth)
        .def_readwrite("x", &channel::NodePosition::x)
        .def_readwrite("y", &channel::NodePosition::y);

    m.def("norm", &channel::norm);
    m.def("cross_correlation", &channel::cross_correlation, py::arg("a"), py::arg("b"), py::arg("lag"));
    m.def("normalized_cross_correlation", &channel::normalized_cross_correlation, py::arg("a"),
          py::arg("b"), py::arg("lag"));
    m.def("correlation_sequence", &channel::correlation_sequence);
    m.def(
        "generate_cir",
        [](const channel::NodePosition& tx, const channel::NodePosition& rx,
           const std::optional<sim::Scenario>& scenario) {
            const sim::Scenario s = scenario.value_or(sim::Scenario{});
            return channel::generate_cir(tx, rx, s.environment, s.channel);
        },
        py::arg("tx"), py::arg("rx"), py::arg("scenario") = std::nullopt,
        "CIR of the link under the scenario's environment and channel settings.");
    m.def("load_arrivals", &channel::load_arrivals, py::arg("path"), py::arg("pair"),
          py::arg("sample_interval") = 2.5e-4);
    py::class_<LinkId>(m, "LinkId")
        .def(py::init([](NodeId tx, NodeId rx) { return LinkId{tx, rx}; }))
        .def_readwrite("tx", &LinkId::tx)
        .def_readwrite("rx", &LinkId::rx);
    py::implicitly_convertible<py::tuple, LinkId>();

    py::class_<phy::PhyConfig>(m, "PhyConfig")
        .def(py::init([](int D, double transmit_power, double noise_variance, double min_required_sinr,
                         double acoustic_conversion) {
                 phy::PhyConfig p;
                 p.D = D;
                 p.transmit_power = transmit_power;
                 p.noise_variance = noise_variance;
                 p.min_required_sinr = min_required_sinr;
                 p.acoustic_conversion = acoustic_conversion;
                 return p;
             }),
             py::arg("D") = 4, py::arg("transmit_power") = 1.0, py::arg("noise_variance") = 1e-8,
             py::arg("min_required_sinr") = 1.0, py::arg("acoustic_conversion") = 1.0)
        .def_readwrite("D", &phy::PhyConfig::D)
        .def_readwrite("transmit_power", &phy::PhyConfig::transmit_power)
        .def_readwrite("noise_variance", &phy::PhyConfig::noise_variance)
        .def_readwrite("min_required_sinr", &phy::PhyConfig::min_required_sinr)
        .def_readwrite("acoustic_conversion", &phy::PhyConfig::acoustic_conversion);

    m.def("tr_waveform", [](const channel::Cir& c) {
        const auto g = phy::tr_waveform(c);
        return std::vector<Complex>(g.taps().begin(), g.taps().end());
    });
    m.def("composite_response", &phy::composite_response, py::arg("c"), py::arg("D"));
    m.def("p_sig", &phy::p_sig);
    m.def("p_isi", &phy::p_isi);
    m.def("p_ili", py::overload_cast<const channel::Cir&, const channel::Cir&, const phy::PhyConfig&>(
                       &phy::p_ili),
          py::arg("interferer_to_victim"), py::arg("interferer_link"), py::arg("phy"));
    m.def(
        "sinr_atrsts",
        [](const channel::Cir& signal, const std::vector<std::pair<channel::Cir, channel::Cir>>& interferers,
           const phy::PhyConfig& p) {
            std::vector<phy::TrInterferer> list;
            for (const auto& [to_victim, link] : interferers) list.push_back({to_victim, link});
            return phy::sinr_atrsts(signal, list, p);
        },
        py::arg("signal_link"), py::arg("interferers"), py::arg("phy"),
        "Interferers are (channel to victim, interferer's own link) pairs.");
    m.def("sinr_sdt", &phy::sinr_sdt);
    m.def("eta_threshold",
          py::overload_cast<double, double, const channel::Cir&, const channel::Cir&, const phy::PhyConfig&>(
              &phy::eta_threshold),
          py::arg("victim_link_norm"), py::arg("victim_autocorr_offpeak_sum"),
          py::arg("interferer_to_victim"), py::arg("interferer_link"), py::arg("phy"),
          "Largest admissible |eta|, or None when no value is admissible.");

    py::class_<sim::Scenario>(m, "Scenario")
        .def(py::init<>())
        .def("to_json", &config::emit_scenario)
        .def("config_hash", &config::config_hash)
        .def("materialize", [](const sim::Scenario& s) { return sim::materialize(s); })
        .def("validate", [](const sim::Scenario& s) { sim::validate(s); })
        .def("override",
             [](sim::Scenario& s, const std::string& assignment) {
                 config::apply_override(s, assignment);
                 return s;
             })
        .def_property_readonly("seed", [](const sim::Scenario& s) { return s.run.seed; })
        .def_property_readonly("node_count",
                               [](const sim::Scenario& s) { return s.topology.nodes.size(); })
        .def_property_readonly("flow_count",
                               [](const sim::Scenario& s) { return s.topology.flows.size(); })
        .def(py::self == py::self);

    m.def("parse_scenario", [](const std::string& text) { return config::parse_scenario(text); });
    m.def(
        "load_scenario",
        [](const std::filesystem::path& path, const std::vector<std::string>& overrides) {
            return config::load_scenario(path, overrides);
        },
        py::arg("path"), py::arg("overrides") = std::vector<std::string>{});

    m.def(
        "run",
        [](sim::Scenario s, bool trace) {
            std::vector<sim::TraceRecord> records;
            std::ostringstream lines;
            sim::RunOutput out;
            {
                py::gil_scoped_release release;
                s = sim::materialize(std::move(s));
                out = sim::run(s, {trace ? &lines : nullptr, nullptr});
            }
            py::dict d = metrics_dict(out.metrics);
            d["trace_hash"] = out.trace_hash;
            d["events"] = out.events;
            d["config_hash"] = config::config_hash(s);
            if (trace) d["trace"] = lines.str();
            return d;
        },
        py::arg("scenario"), py::arg("trace") = false,
        "Materializes and runs the scenario. Returns metrics and, with trace=True, the NDJSON trace.");

    m.def("preset_names", [] {
        std::vector<std::string> out;
        for (auto n : presets::names()) out.emplace_back(n);
        return out;
    });
    m.def(
        "preset",
        [](const std::string& name, std::optional<sim::Scenario> base,
           std::optional<std::vector<std::uint64_t>> seeds, unsigned workers) {
            presets::Params p;
            if (base) p.base = *base;
            if (seeds) p.seeds = *seeds;
            p.workers = workers;
            csv::Table t;
            {
                py::gil_scoped_release release;
                t = presets::run(name, p);
            }
            py::dict d = table_dict(t);
            std::ostringstream text;
            csv::write(text, t, config::config_hash(p.base), p.base.run.seed);
            d["csv"] = text.str();
            return d;
        },
        py::arg("name"), py::arg("scenario") = std::nullopt, py::arg("seeds") = std::nullopt,
        py::arg("workers") = 0u,
        "Runs a preset. Returns header, rows and the CSV text with its provenance line.");
}
