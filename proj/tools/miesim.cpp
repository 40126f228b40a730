// Copyright 2026 The miesim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// miesim run <config> | plot <csv> --kind <k> -o <svg> | validate <circuit-file>
//
// Exit status: 0 when every check passes, 1 when a check fails, 2 on usage or input errors.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "miesim/circuit_io.hpp"
#include "miesim/experiments.hpp"
#include "miesim/svg.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

int cmd_run(const std::string &config_path, const std::string &out_dir, std::size_t workers) {
    miesim::Config cfg;
    try {
        cfg = miesim::Config::load(config_path);
        miesim::validate_config(cfg);
    } catch (const miesim::ConfigError &e) {
        std::cerr << config_path << ":" << e.what() << '\n';
        return kExitUsage;
    }
    miesim::RunOptions opts;
    opts.out_dir = out_dir;
    opts.workers = workers;
    miesim::RunResult r;
    try {
        r = miesim::run_experiment(cfg, opts);
    } catch (const miesim::ConfigError &e) {
        std::cerr << config_path << ":" << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    for (const auto &c : r.checks) std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    for (const auto &o : r.outputs) std::cout << "wrote " << o << '\n';
    std::cout << r.name << ": " << r.checks.size() << " checks in " << r.wall_seconds << " s\n";
    return r.all_pass() ? kExitPass : kExitFail;
}

int cmd_plot(const std::string &csv_path, const std::string &kind, const std::string &out) {
    try {
        auto table = miesim::load_csv(csv_path);
        auto svg = miesim::plot_svg(table, kind);
        std::ofstream f(out);
        if (!f) throw std::runtime_error("cannot write " + out);
        f << svg;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    std::cout << "wrote " << out << '\n';
    return kExitPass;
}

/// Accepts Clifford circuit files, and gate-by-gate circuit files when they contain U1 records.
int cmd_validate(const std::string &path) {
    std::ifstream f(path);
    if (!f) {
        std::cerr << "error: cannot open " << path << '\n';
        return kExitUsage;
    }
    std::stringstream ss;
    ss << f.rdbuf();
    std::string text = ss.str();
    bool gbg = text.find("\nU1 ") != std::string::npos || text.rfind("U1 ", 0) == 0;
    try {
        if (gbg) {
            auto c = miesim::parse_gbg_circuit(text);
            std::cout << "valid gate-by-gate circuit: " << c.num_qubits() << " qubits, " << c.gates.size() << " gates\n";
        } else {
            auto c = miesim::parse_circuit(text);
            std::cout << "valid circuit: " << c.num_qubits() << " qubits, " << c.gates.size() << " gates, depth "
                      << c.tmpl.depth << '\n';
        }
    } catch (const std::exception &e) {
        std::cerr << path << ": " << e.what() << '\n';
        return kExitFail;
    }
    return kExitPass;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"miesim: measurement-induced entanglement in random Clifford circuits"};
    app.require_subcommand(1);
    app.set_version_flag("--version", miesim::kVersion);

    std::string config, out_dir = ".";
    std::size_t workers = 0;
    auto *run = app.add_subcommand("run", "Run an experiment config");
    run->add_option("config", config, "Config file")->required();
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--workers", workers, "Worker threads (default: MIESIM_THREADS or all cores)");

    std::string csv, kind, svg_out;
    auto *plot = app.add_subcommand("plot", "Plot a scan CSV as SVG");
    plot->add_option("csv", csv, "Scan CSV")->required();
    plot->add_option("--kind", kind, "Plot kind")->required()->check(CLI::IsMember(miesim::plot_kinds()));
    plot->add_option("-o,--output", svg_out, "Output SVG")->required();

    std::string circuit;
    auto *validate = app.add_subcommand("validate", "Parse and validate a circuit file");
    validate->add_option("circuit", circuit, "Circuit file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitPass : kExitUsage;
    }
    if (*run) return cmd_run(config, out_dir, workers);
    if (*plot) return cmd_plot(csv, kind, svg_out);
    return cmd_validate(circuit);
}
