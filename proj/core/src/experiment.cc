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

#include "unravel/experiment.h"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "unravel/error.h"
#include "unravel/parallel.h"
#include "unravel/rng.h"
#include "unravel/statistics.h"
#include "unravel/trajectory.h"
#include "unravel/version.h"

namespace unravel {

namespace {

using Json = nlohmann::ordered_json;

AssignmentMatrix true_assignment(const ExperimentConfig &c) {
    std::vector<ReadoutNoiseParams> per_qubit(static_cast<std::size_t>(c.qubits()), c.readout);
    return assignment_from_params(per_qubit, c.qubits());
}

ResultRow make_row(const ExperimentConfig &c, double t, std::string_view unraveling, std::string_view mode,
                   std::string_view quantity, double value, std::uint64_t shots) {
    ResultRow r;
    r.time = t;
    r.protocol = std::string(to_string(c.kind));
    r.unraveling = std::string(unraveling);
    r.mode = std::string(mode);
    r.quantity = std::string(quantity);
    r.value = value;
    r.shots = shots;
    r.seed = c.seed;
    return r;
}

void set_interval(ResultRow &row, const Interval &ci) {
    // A percentile interval can exclude a point estimate sitting on a boundary.
    row.ci_lo = std::min(ci.lo, row.value);
    row.ci_hi = std::max(ci.hi, row.value);
}

std::vector<ResultRow> exact_rows(const ExperimentConfig &c, const TrajectoryEnsemble &ens, Unraveling u) {
    const auto un = to_string(u);
    const auto mode = to_string(EnsembleMode::Exact);
    auto estimates = estimate_branches(ens);
    std::vector<ResultRow> rows;
    rows.push_back(make_row(c, ens.time, un, mode, "mu", ensemble_mean(estimates), 0));
    rows.push_back(make_row(c, ens.time, un, mode, "var_traj", trajectory_variance(estimates), 0));
    auto avg = entropy_of_average(ens);
    rows.push_back(make_row(c, ens.time, un, mode, "S_avg_state", avg.full, 0));
    if (ens.n_qubits == 2) {
        rows.push_back(make_row(c, ens.time, un, mode, "S_avg_reduced", avg.reduced, 0));
    }
    rows.push_back(make_row(c, ens.time, un, mode, "S_traj_avg", traj_avg_entropy(ens), 0));
    return rows;
}

double semi_value(const SemiExperimentalEntropy &s, int n_qubits) {
    return n_qubits == 1 ? s.of_average_full : s.traj_avg;
}

std::vector<ResultRow> sampled_rows(const ExperimentConfig &c, const ProtocolSpec &spec, std::size_t time_index,
                                    std::size_t unraveling_index, const TrajectoryEnsemble &ideal,
                                    const AssignmentMatrix &truth, const AssignmentMatrix *mitigation) {
    const Unraveling u = spec.unraveling;
    auto sampled = sample_shots(spec, time_index);
    if (!truth.is_identity()) {
        for (std::size_t r = 0; r < sampled.branches.size(); r++) {
            auto &b = sampled.branches[r];
            b.counts = corrupt_counts(b.counts, truth, derive_key(c.seed, Stream::Readout, {time_index, unraveling_index, r}));
        }
    }
    const CountTable counts = count_table(sampled);
    const bool semi = u == Unraveling::Projective;
    const int n = spec.n_qubits;
    auto stats = sampled_statistics(ideal, counts, mitigation, semi, true);

    const auto un = to_string(u);
    const auto mode = to_string(EnsembleMode::Sampled);
    const double t = ideal.time;
    std::vector<ResultRow> rows;
    rows.push_back(make_row(c, t, un, mode, "mu", stats.mu, spec.shots_per_time));
    rows.push_back(make_row(c, t, un, mode, "var_traj", stats.var_traj, spec.shots_per_time));
    if (semi) {
        rows.push_back(make_row(c, t, un, mode, "S_semi_exp", semi_value(*stats.semi, n), spec.shots_per_time));
    }

    if (c.bootstrap_resamples > 0) {
        BootstrapOptions opt;
        opt.n_resamples = c.bootstrap_resamples;
        opt.seed = derive_key(c.seed, Stream::Bootstrap, {time_index, unraveling_index});
        // Projective group sizes are Born-rule outcomes and must fluctuate;
        // kick group sizes are fixed by design.
        opt.scheme = u == Unraveling::Projective ? ResampleScheme::Pooled : ResampleScheme::WithinGroup;
        VectorEstimator estimator = [&](const CountTable &resampled) {
            auto s = sampled_statistics(ideal, resampled, mitigation, semi, false);
            std::vector<double> v{s.mu, s.var_traj};
            if (semi) {
                v.push_back(semi_value(*s.semi, n));
            }
            return v;
        };
        auto intervals = bootstrap_ci(counts, estimator, opt);
        for (std::size_t q = 0; q < rows.size(); q++) {
            set_interval(rows[q], intervals[q]);
        }
    }
    return rows;
}

std::vector<ResultRow> run_discrete(const ExperimentConfig &c, std::size_t threads,
                                    std::optional<CalibrationResult> &calibration) {
    const bool exact = c.mode != ModeSelection::Sampled;
    const bool sampled = c.mode != ModeSelection::Exact;
    const AssignmentMatrix truth = true_assignment(c);
    std::optional<AssignmentMatrix> mitigation;
    if (sampled && c.mitigation_enabled()) {
        calibration = run_calibration(c);
        mitigation = calibration->estimate;
    }

    std::vector<ProtocolSpec> specs;
    for (auto u : c.unravelings) {
        specs.push_back(c.protocol_spec(u));
    }
    const std::size_t n_times = c.t_grid.size();
    std::vector<std::vector<ResultRow>> slots(specs.size() * n_times);
    parallel_for(slots.size(), threads, [&](std::size_t task) {
        const std::size_t ui = task / n_times;
        const std::size_t i = task % n_times;
        const auto &spec = specs[ui];
        try {
            auto ideal = enumerate_branches(spec, c.t_grid[i]);
            auto &out = slots[task];
            if (exact) {
                out = exact_rows(c, ideal, spec.unraveling);
            }
            if (sampled) {
                auto rows = sampled_rows(c, spec, i, ui, ideal, truth, mitigation ? &*mitigation : nullptr);
                out.insert(out.end(), rows.begin(), rows.end());
            }
        } catch (const Error &e) {
            throw Error(e.category(), "t = " + format_double(c.t_grid[i]) + ", unraveling " +
                                          std::string(to_string(spec.unraveling)) + ": " + e.what());
        }
    });
    std::vector<ResultRow> rows;
    for (auto &s : slots) {
        rows.insert(rows.end(), s.begin(), s.end());
    }
    return rows;
}

std::vector<ResultRow> run_rf(const ExperimentConfig &c, std::size_t threads) {
    const RFParams params = c.rf_params();
    const auto times = params.record_times();
    const auto master = me_solve(params);
    std::vector<ResultRow> rows;
    const Matrix z = pauli::z();
    for (std::size_t k = 0; k < times.size(); k++) {
        rows.push_back(make_row(c, times[k], "master", "exact", "mu", expval(z, master[k]), 0));
    }
    for (auto u : c.rf_unravelings) {
        auto ensemble = u == RfUnraveling::Jump ? jump_ensemble(params, threads) : homodyne_ensemble(params, threads);
        for (std::size_t k = 0; k < times.size(); k++) {
            auto m = rf_moments(ensemble, k);
            auto mu = make_row(c, times[k], to_string(u), "sampled", "mu", m.mean, params.n_traj);
            mu.ci_lo = m.mean - m.mean_se;
            mu.ci_hi = m.mean + m.mean_se;
            auto var = make_row(c, times[k], to_string(u), "sampled", "var_traj", m.variance, params.n_traj);
            var.ci_lo = m.variance - m.variance_se;
            var.ci_hi = m.variance + m.variance_se;
            rows.push_back(std::move(mu));
            rows.push_back(std::move(var));
        }
    }
    return rows;
}

std::string fnv1a64_hex(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace

CalibrationResult run_calibration(const ExperimentConfig &config) {
    CalibrationResult out;
    out.n_qubits = config.qubits();
    out.shots_per_state = config.calibration_shots;
    out.truth = true_assignment(config);
    const Eigen::Index n_outcomes = Eigen::Index{1} << out.n_qubits;
    out.estimate = calibrate(simulated_basis_measurement(out.truth, derive_key(config.seed, Stream::Calibration, {})),
                             n_outcomes, config.calibration_shots);
    return out;
}

RunOutput run(const ExperimentConfig &config, std::size_t threads) {
    config.validate();
    RunOutput out;
    out.config = config;
    switch (config.kind) {
        case ExperimentKind::Discrete1q:
        case ExperimentKind::Discrete2q:
            out.rows = run_discrete(config, threads, out.calibration);
            break;
        case ExperimentKind::ContinuousRf:
            out.rows = run_rf(config, threads);
            break;
        case ExperimentKind::Calibrate:
            out.calibration = run_calibration(config);
            break;
    }
    sort_rows(out.rows);

    Json manifest;
    manifest["software"] = {{"name", "unravel"}, {"version", kVersion}};
    manifest["config"] = Json::parse(config_to_json(config));
    Json outputs = Json::object();
    if (!out.rows.empty()) {
        auto csv = rows_to_csv(out.rows);
        outputs["results.csv"] = {{"rows", out.rows.size()}, {"fnv1a64", fnv1a64_hex(csv)}};
    }
    if (out.calibration) {
        outputs["calibration.json"] = {{"fnv1a64", fnv1a64_hex(calibration_to_json(*out.calibration))}};
    }
    manifest["outputs"] = outputs;
    out.manifest_json = manifest.dump(2);
    return out;
}

namespace {

void write_file(const std::filesystem::path &path, std::string_view content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.close();
    if (!f) {
        throw IoError("failed writing " + path.string());
    }
}

}  // namespace

void write_outputs(const RunOutput &out, const std::filesystem::path &dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    }
    if (!out.rows.empty()) {
        write_file(dir / "results.csv", rows_to_csv(out.rows));
    }
    if (out.calibration) {
        write_file(dir / "calibration.json", calibration_to_json(*out.calibration) + "\n");
    }
    write_file(dir / "manifest.json", out.manifest_json + "\n");
    spdlog::info("wrote outputs to {}", dir.string());
}

}  // namespace unravel
