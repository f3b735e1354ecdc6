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

#ifndef UNRAVEL_TRAJECTORY_H
#define UNRAVEL_TRAJECTORY_H

#include <cstdint>
#include <optional>
#include <vector>

#include "unravel/protocol.h"
#include "unravel/qmat.h"

namespace unravel {

enum class EnsembleMode {
    Exact,    // closed-form branch enumeration
    Sampled,  // finite-shot Monte Carlo records
};

std::string_view to_string(EnsembleMode m);

/// Branch probabilities at or below this are treated as exact zeros: the
/// branch is kept with weight 0 and no conditional state.
inline constexpr double kZeroBranchProbability = 1e-24;

/// One trajectory r: record label, weight w_r(t), conditional state, and (in
/// Sampled mode) final-measurement counts indexed by computational-basis
/// outcome of all qubits.
struct Branch {
    RecordLabel label;
    double weight = 0;
    std::optional<PureState> state;  // nullopt for a zero-probability branch
    std::vector<std::uint64_t> counts;

    bool defined() const noexcept {
        return state.has_value();
    }
    std::uint64_t total_counts() const noexcept;
};

struct TrajectoryEnsemble {
    double time = 0;
    int n_qubits = 1;
    Unraveling unraveling = Unraveling::Projective;
    EnsembleMode mode = EnsembleMode::Exact;
    std::vector<Branch> branches;
    std::uint64_t total_shots = 0;  // Sampled only

    double weight_sum() const noexcept;
};

/// Interventions completed by time t; an evaluation exactly at t_k includes it.
int intervention_count(const ProtocolSpec &spec, double t);

/// All 2^m (one qubit) or 4^m (two qubits) branches at time t, in
/// lexicographic record order.
TrajectoryEnsemble enumerate_branches(const ProtocolSpec &spec, double t);

/// Finite-shot records at spec.t_grid[time_index]. Each shot draws from its
/// own generator keyed by (seed, time_index, shot_index).
TrajectoryEnsemble sample_shots(const ProtocolSpec &spec, std::size_t time_index);

/// As above for a time that must be an element of spec.t_grid.
TrajectoryEnsemble sample_shots(const ProtocolSpec &spec, double t);

/// Reduced state of one qubit along a two-qubit branch.
DensityMatrix conditional_reduced_state(const Branch &branch, int keep = 1);

/// Sum_r w_r |psi_r><psi_r| over defined branches.
DensityMatrix ensemble_average_state(const TrajectoryEnsemble &ensemble);

/// Unconditional state: unitary segments interleaved with the dephasing channel.
DensityMatrix unconditional_state(const ProtocolSpec &spec, double t);

/// The final readout observable: sigma_z, or sigma_z (x) 1 on qubit 1.
Matrix measured_observable(int n_qubits);

}  // namespace unravel

#endif
