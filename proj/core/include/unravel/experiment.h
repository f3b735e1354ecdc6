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

#ifndef UNRAVEL_EXPERIMENT_H
#define UNRAVEL_EXPERIMENT_H

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "unravel/continuous_rf.h"
#include "unravel/protocol.h"
#include "unravel/readout.h"

namespace unravel {

enum class ExperimentKind { Discrete1q, Discrete2q, ContinuousRf, Calibrate };
enum class ModeSelection { Exact, Sampled, Both };
enum class RfUnraveling { Jump, Homodyne };

std::string_view to_string(ExperimentKind k);
std::string_view to_string(ModeSelection m);
std::string_view to_string(RfUnraveling u);
ExperimentKind parse_kind(std::string_view s);
ModeSelection parse_mode(std::string_view s);
RfUnraveling parse_rf_unraveling(std::string_view s);

/// Flat experiment description. Which fields are read depends on `kind`;
/// see load_config for the key names.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Discrete1q;
    std::uint64_t seed = 0;
    std::string output_dir = "out";

    // discrete protocols
    double omega = 0;
    double delta = 0;
    double coupling_j = 0;
    double t1 = 0;
    double t2 = 0;
    std::vector<double> t_grid;
    std::vector<Unraveling> unravelings{Unraveling::Projective, Unraveling::Kick};
    std::uint64_t shots_per_time = 1000;
    ModeSelection mode = ModeSelection::Both;
    std::optional<bool> mitigation;  // unset: on for two qubits, off for one
    std::size_t bootstrap_resamples = 1000;  // 0 disables confidence intervals

    // readout (also used by calibrate)
    int n_qubits = 1;  // calibrate only; discrete kinds imply it
    ReadoutNoiseParams readout;
    std::uint64_t calibration_shots = 100000;

    // continuous-rf
    double gamma = 1.0;
    double dt = 0;
    double t_max = 0;
    std::size_t n_traj = 0;
    std::size_t record_every = 1;
    bool start_excited = false;
    std::vector<RfUnraveling> rf_unravelings{RfUnraveling::Jump, RfUnraveling::Homodyne};

    int qubits() const noexcept;
    bool mitigation_enabled() const noexcept;
    /// Throws ConfigError or the relevant module error.
    void validate() const;
    ProtocolSpec protocol_spec(Unraveling u) const;
    RFParams rf_params() const;
};

/// Parses a JSON object of flat keys. Unknown keys, keys that do not apply to
/// the chosen kind, and missing required keys raise ConfigError. A run
/// manifest is accepted too: its embedded config is used.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path &path);
/// Canonical JSON with every field that applies to the kind, grid included.
std::string config_to_json(const ExperimentConfig &config);

struct ResultRow {
    double time = 0;
    std::string protocol;
    std::string unraveling;
    std::string mode;
    std::string quantity;
    double value = 0;
    std::optional<double> ci_lo;
    std::optional<double> ci_hi;
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
};

inline constexpr std::string_view kCsvHeader = "time,protocol,unraveling,mode,quantity,value,ci_lo,ci_hi,shots,seed";

/// Orders by (quantity, unraveling, time, mode).
void sort_rows(std::vector<ResultRow> &rows);
std::string format_double(double v);
std::string rows_to_csv(const std::vector<ResultRow> &rows);
std::vector<ResultRow> parse_csv(std::string_view text);
std::vector<ResultRow> read_csv(const std::filesystem::path &path);

struct CalibrationResult {
    int n_qubits = 1;
    std::uint64_t shots_per_state = 0;
    AssignmentMatrix truth = AssignmentMatrix::identity(2);
    AssignmentMatrix estimate = AssignmentMatrix::identity(2);
};

std::string calibration_to_json(const CalibrationResult &c);

struct RunOutput {
    ExperimentConfig config;
    std::vector<ResultRow> rows;
    std::optional<CalibrationResult> calibration;
    std::string manifest_json;
};

/// Simulated calibration run: basis-state preparation through the configured
/// readout noise.
CalibrationResult run_calibration(const ExperimentConfig &config);

/// Executes the experiment. Output does not depend on `threads` (0 = all cores).
RunOutput run(const ExperimentConfig &config, std::size_t threads = 0);

/// Writes results.csv (when rows exist), calibration.json (when present) and
/// manifest.json into `dir`, creating it as needed. Throws IoError.
void write_outputs(const RunOutput &out, const std::filesystem::path &dir);

struct GridSet {
    std::vector<double> one_qubit;
    std::vector<double> two_qubit;
};

/// n_points uniform points on [0, t_final]; each intervention time replaces
/// a point within 1e-9 of it or is inserted otherwise.
std::vector<double> make_grid(double t_final, std::size_t n_points, const std::vector<double> &interventions);
GridSet default_grids();

/// Per-quantity tolerances of the form "mu=1e-12,*=1e-9,coverage=0.6,coverage3=0.95".
/// `coverage` is the minimum fraction of matched rows where B's value lies in
/// A's interval, `coverage3` the same with the half-width tripled.
struct ToleranceSpec {
    std::map<std::string, double> per_quantity;
    std::optional<double> fallback;
    std::optional<double> coverage;
    std::optional<double> coverage3;

    static ToleranceSpec parse(std::string_view spec);
};

struct CompareOptions {
    ToleranceSpec tolerance;
    std::map<std::string, std::string> filter_a;  // column -> required value
    std::map<std::string, std::string> filter_b;
    std::vector<std::string> ignore;  // key columns excluded from matching
};

struct QuantityReport {
    std::string quantity;
    std::size_t n_rows = 0;
    double max_abs_deviation = 0;
    std::optional<double> tolerance;
    std::size_t n_with_ci = 0;
    std::size_t n_in_ci = 0;
    std::size_t n_in_3ci = 0;
    bool pass = true;
};

struct CompareReport {
    std::vector<QuantityReport> quantities;
    bool pass = true;

    std::string to_text() const;
};

/// Matches rows on (time, protocol, unraveling, mode, quantity) minus the
/// ignored columns after filtering. Unmatched or duplicate keys raise SchemaError.
CompareReport compare(const std::vector<ResultRow> &a, const std::vector<ResultRow> &b, const CompareOptions &opt);

}  // namespace unravel

#endif
