// Copyright 2026 The Unravel Authors
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

#include <iostream>
#include <string>

#include <CLI/CLI.hpp>
#include <spdlog/spdlog.h>

#include "unravel/error.h"
#include "unravel/experiment.h"
#include "unravel/version.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitIo = 3;

int exit_code(const unravel::Error &e) {
    switch (e.category()) {
        case unravel::ErrorCategory::Validation:
            return kExitValidation;
        case unravel::ErrorCategory::Numerical:
            return kExitNumerical;
        case unravel::ErrorCategory::Io:
            return kExitIo;
    }
    return kExitNumerical;
}

std::map<std::string, std::string> parse_filter(const std::string &text) {
    std::map<std::string, std::string> out;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find(',', start);
        if (end == std::string::npos) {
            end = text.size();
        }
        auto item = text.substr(start, end - start);
        auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw unravel::ParameterError("filter: expected column=value, got '" + item + "'");
        }
        out[item.substr(0, eq)] = item.substr(eq + 1);
        start = end + 1;
    }
    return out;
}

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> mode;
    std::optional<std::string> mitigation;
    std::optional<std::string> out;
    std::optional<std::size_t> resamples;
};

void apply(const Overrides &o, unravel::ExperimentConfig &c) {
    using unravel::ExperimentKind;
    const bool discrete = c.kind == ExperimentKind::Discrete1q || c.kind == ExperimentKind::Discrete2q;
    if (o.seed) {
        c.seed = *o.seed;
    }
    if (o.out) {
        c.output_dir = *o.out;
    }
    if ((o.mode || o.mitigation || o.resamples) && !discrete) {
        throw unravel::ConfigError("--mode, --mitigation and --resamples apply to discrete experiments only");
    }
    if (o.mode) {
        c.mode = unravel::parse_mode(*o.mode);
    }
    if (o.mitigation) {
        c.mitigation = *o.mitigation == "on";
    }
    if (o.resamples) {
        c.bootstrap_resamples = *o.resamples;
    }
    c.validate();
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Synthetic and continuous quantum-trajectory unraveling experiments"};
    app.set_version_flag("--version", std::string(unravel::kVersion));
    app.require_subcommand(1);
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "Log progress to stderr");

    Overrides overrides;
    std::size_t threads = 0;
    std::string config_path;

    auto add_common = [&](CLI::App *sub) {
        sub->add_option("config", config_path, "Experiment config (JSON) or a run manifest")->required();
        sub->add_option("--seed", overrides.seed, "Override the master seed");
        sub->add_option("--out", overrides.out, "Output directory");
        sub->add_option("--threads", threads, "Worker threads (0 = all cores)");
    };

    auto *run_cmd = app.add_subcommand("run", "Run an experiment and write results.csv and manifest.json");
    add_common(run_cmd);
    run_cmd->add_option("--mode", overrides.mode, "exact, sampled or both")
        ->check(CLI::IsMember({"exact", "sampled", "both"}));
    run_cmd->add_option("--mitigation", overrides.mitigation, "Readout mitigation")->check(CLI::IsMember({"on", "off"}));
    run_cmd->add_option("--resamples", overrides.resamples, "Bootstrap resamples (0 disables intervals)");

    auto *cal_cmd = app.add_subcommand("calibrate", "Simulate the readout calibration and write calibration.json");
    add_common(cal_cmd);

    std::string table_a;
    std::string table_b;
    std::string tol = "*=0";
    std::string filter_a;
    std::string filter_b;
    std::vector<std::string> ignore;
    auto *cmp_cmd = app.add_subcommand("compare", "Compare two result tables");
    cmp_cmd->add_option("a", table_a, "Result table A")->required();
    cmp_cmd->add_option("b", table_b, "Result table B")->required();
    cmp_cmd->add_option("--tol", tol, "Tolerances, e.g. mu=1e-12,*=1e-9,coverage=0.6,coverage3=0.95");
    cmp_cmd->add_option("--filter-a", filter_a, "Keep rows of A matching column=value[,column=value]");
    cmp_cmd->add_option("--filter-b", filter_b, "Keep rows of B matching column=value[,column=value]");
    cmp_cmd->add_option("--ignore", ignore, "Key columns excluded from row matching")->delimiter(',');

    auto *grids_cmd = app.add_subcommand("grids", "Print the default evaluation grids");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }
    spdlog::set_level(verbose ? spdlog::level::info : spdlog::level::warn);

    try {
        if (run_cmd->parsed()) {
            auto config = unravel::load_config(config_path);
            apply(overrides, config);
            auto out = unravel::run(config, threads);
            unravel::write_outputs(out, config.output_dir);
        } else if (cal_cmd->parsed()) {
            auto config = unravel::load_config(config_path);
            if (config.kind == unravel::ExperimentKind::ContinuousRf) {
                throw unravel::ConfigError("calibrate: config has no readout model");
            }
            config.n_qubits = config.qubits();
            config.kind = unravel::ExperimentKind::Calibrate;
            apply(overrides, config);
            auto out = unravel::run(config, threads);
            unravel::write_outputs(out, config.output_dir);
        } else if (cmp_cmd->parsed()) {
            unravel::CompareOptions opt;
            opt.tolerance = unravel::ToleranceSpec::parse(tol);
            opt.filter_a = parse_filter(filter_a);
            opt.filter_b = parse_filter(filter_b);
            opt.ignore = ignore;
            auto report = unravel::compare(unravel::read_csv(table_a), unravel::read_csv(table_b), opt);
            std::cout << report.to_text();
            return report.pass ? kExitOk : kExitValidation;
        } else if (grids_cmd->parsed()) {
            auto grids = unravel::default_grids();
            auto print = [](const char *name, const std::vector<double> &g) {
                std::cout << name << ":";
                for (double t : g) {
                    std::cout << ' ' << unravel::format_double(t);
                }
                std::cout << '\n';
            };
            print("discrete-1q", grids.one_qubit);
            print("discrete-2q", grids.two_qubit);
        }
    } catch (const unravel::Error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitOk;
}
