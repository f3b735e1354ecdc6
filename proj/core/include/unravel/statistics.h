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

#ifndef UNRAVEL_STATISTICS_H
#define UNRAVEL_STATISTICS_H

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "unravel/readout.h"
#include "unravel/trajectory.h"

namespace unravel {

/// e_r(t) for one branch, with outcome b = 0 -> -1 and b = 1 -> +1.
struct ConditionalEstimate {
    RecordLabel label;
    double weight = 0;
    double value = 0;
    std::optional<std::uint64_t> n_shots;  // nullopt for exact estimates
};

/// Exact: <O_meas> on the branch state. Sampled: qubit-1 marginal of the
/// (optionally unfolded) final-measurement frequencies, p(1) - p(0).
/// Throws EmptyBranchError for a sampled branch without shots and
/// UndefinedBranchError for an exact branch without state.
ConditionalEstimate conditional_estimate(const Branch &branch, int n_qubits, EnsembleMode mode,
                                         const AssignmentMatrix *mitigation = nullptr);

/// Estimates for every branch that contributes: zero-weight exact branches
/// are skipped, empty sampled branches are dropped and the remaining weights
/// renormalized to sum to 1.
std::vector<ConditionalEstimate> estimate_branches(const TrajectoryEnsemble &ensemble,
                                                   const AssignmentMatrix *mitigation = nullptr,
                                                   bool warn_on_drop = true);

/// mu = sum_r w_r e_r. Throws NormalizationError if |sum w - 1| > 1e-9.
double ensemble_mean(std::span<const ConditionalEstimate> estimates);

/// Var_traj = sum_r w_r (e_r - mu)^2.
double trajectory_variance(std::span<const ConditionalEstimate> estimates);

/// E_r[S] of the conditional state: full (pure) state for one qubit, qubit-1
/// reduced state for two qubits. Bits.
double traj_avg_entropy(const TrajectoryEnsemble &ensemble);

struct AverageStateEntropy {
    double full = 0;     // S(rho_t)
    double reduced = 0;  // S(Tr_2 rho_t); equals `full` for one qubit
};

AverageStateEntropy entropy_of_average(const DensityMatrix &state);
AverageStateEntropy entropy_of_average(const TrajectoryEnsemble &ensemble);

struct BranchWeight {
    RecordLabel label;
    double weight = 0;
};

struct SemiExperimentalEntropy {
    double of_average_full = 0;     // S(sum_r w_r rho_r)
    double of_average_reduced = 0;  // S(Tr_2 sum_r w_r rho_r)
    double traj_avg = 0;            // sum_r w_r S(rho_r^(1))
};

/// Combines empirical branch weights (renormalized to sum 1) with the ideal
/// branch states of `ideal`. Throws SchemaError for labels absent from `ideal`.
SemiExperimentalEntropy semi_experimental_entropy(std::span<const BranchWeight> empirical,
                                                  const TrajectoryEnsemble &ideal);

/// Shot counts laid out as [group][outcome]; a group is a projective branch
/// or a kick-pattern circuit.
using CountTable = std::vector<std::vector<std::uint64_t>>;

CountTable count_table(const TrajectoryEnsemble &sampled);

enum class ResampleScheme {
    WithinGroup,  // multinomial inside each group; group sizes fixed
    Pooled,       // multinomial over all cells; group sizes resampled too
};

struct BootstrapOptions {
    std::size_t n_resamples = 1000;
    std::uint64_t seed = 0;
    ResampleScheme scheme = ResampleScheme::WithinGroup;
    double lo_percentile = 16.0;
    double hi_percentile = 84.0;
};

struct Interval {
    double lo = 0;
    double hi = 0;

    double half_width() const noexcept {
        return 0.5 * (hi - lo);
    }
    bool contains(double v) const noexcept {
        return lo <= v && v <= hi;
    }
};

/// Nearest-rank percentile of ascending data: element ceil(p/100 * n).
double nearest_rank_percentile(std::span<const double> sorted, double percentile);

using VectorEstimator = std::function<std::vector<double>(const CountTable &)>;
using ScalarEstimator = std::function<double(const CountTable &)>;

/// Percentile bootstrap over resampled counts, one interval per estimator
/// output. Resample i draws from a generator keyed by (seed, i). Resamples on
/// which the estimator throws an unravel::Error are discarded; more than 10%
/// discarded raises BootstrapError.
std::vector<Interval> bootstrap_ci(const CountTable &counts, const VectorEstimator &estimator,
                                   const BootstrapOptions &options);
Interval bootstrap_ci(const CountTable &counts, const ScalarEstimator &estimator, const BootstrapOptions &options);

/// Point statistics computed from raw sampled counts.
struct SampledStatistics {
    double mu = 0;
    double var_traj = 0;
    std::optional<SemiExperimentalEntropy> semi;
};

/// The full finite-shot estimator chain: group weights from counts, optional
/// unfolding per group, conditional estimates, mu and Var_traj, and (when
/// requested) the semi-experimental entropies against `ideal` branch states.
/// `ideal` fixes the group order and labels.
SampledStatistics sampled_statistics(const TrajectoryEnsemble &ideal, const CountTable &counts,
                                     const AssignmentMatrix *mitigation, bool semi_experimental,
                                     bool warn_on_drop = false);

}  // namespace unravel

#endif
