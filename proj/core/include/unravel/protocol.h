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

#ifndef UNRAVEL_PROTOCOL_H
#define UNRAVEL_PROTOCOL_H

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "unravel/qmat.h"

namespace unravel {

/// How the dephasing intervention is realized on each trajectory.
enum class Unraveling {
    Projective,  // computational-basis measurement, outcome recorded
    Kick,        // uniformly random sigma_z phase flips, pattern recorded
};

std::string_view to_string(Unraveling u);
Unraveling parse_unraveling(std::string_view text);

/// Piecewise-unitary evolution from |0...0> interrupted by two instantaneous
/// interventions at t1 < t2, evaluated on t_grid.
struct ProtocolSpec {
    int n_qubits = 1;
    double omega = 0;
    double delta = 0;
    double coupling_j = 0;  // two-qubit protocol only
    double t1 = 0;
    double t2 = 0;
    std::vector<double> t_grid;
    Unraveling unraveling = Unraveling::Projective;
    std::uint64_t shots_per_time = 1;
    std::uint64_t seed = 0;

    /// Throws ParameterError/RangeError when an invariant is violated.
    void validate() const;

    Eigen::Index dim() const noexcept {
        return Eigen::Index{1} << n_qubits;
    }
    std::vector<double> intervention_times() const {
        return {t1, t2};
    }
    Matrix hamiltonian() const;
};

/// Record of one trajectory: one token per completed intervention. Tokens are
/// outcomes ("0"/"1", or "00".."11") for Projective and kick codes ("I"/"Z",
/// or "00".."11" indexing K_ab) for Kick.
struct RecordLabel {
    std::vector<std::string> tokens;

    std::size_t length() const noexcept {
        return tokens.size();
    }
    /// Concatenated tokens, e.g. "01" or "IZ"; empty for the trivial record.
    std::string str() const;

    auto operator<=>(const RecordLabel &) const = default;
};

/// (Omega/2) sigma_x - (Delta/2) sigma_z.
Matrix h_rf(double omega, double delta);

/// H_RF (x) 1 + 1 (x) H_RF + J sigma_z (x) sigma_z.
Matrix h_two_qubit(double omega, double delta, double j);

/// Sum_b P_b rho P_b over computational-basis projectors.
DensityMatrix dephase_projective(const DensityMatrix &rho);

/// Uniform mixture of kick conjugations: 1/2 sum_a Z^a rho Z^a on one qubit,
/// 1/4 sum_ab K_ab rho K_ab on two.
DensityMatrix dephase_kick(const DensityMatrix &rho);

/// 1 or sigma_z for labels "I"/"Z"; K_ab = Z^a (x) Z^b for labels "ab".
UnitaryMatrix kick_unitary(std::string_view label, int n_qubits);

/// |b><b| for "0"/"1", |b1 b2><b1 b2| for "b1b2".
Matrix projector(std::string_view label, int n_qubits);

/// Intervention tokens in lexicographic order: outcomes for Projective,
/// kick codes for Kick.
std::vector<std::string> intervention_tokens(Unraveling u, int n_qubits);

/// Two-qubit SWAP permutation in the (00, 01, 10, 11) ordering.
Matrix swap_matrix();

}  // namespace unravel

#endif
