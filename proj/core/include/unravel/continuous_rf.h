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

#ifndef UNRAVEL_CONTINUOUS_RF_H
#define UNRAVEL_CONTINUOUS_RF_H

#include <cstdint>
#include <span>
#include <vector>

#include "unravel/qmat.h"

namespace unravel {

/// Driven two-level atom with radiative decay L = sqrt(gamma) sigma_minus.
struct RFParams {
    double omega = 0;
    double delta = 0;
    double gamma = 1.0;  // sets the time unit
    double dt = 1e-3;
    double t_max = 1.0;
    std::size_t n_traj = 1;
    std::uint64_t seed = 0;
    std::size_t record_every = 1;  // steps between stored states
    bool start_excited = false;    // otherwise start in the ground state |0>

    /// Throws ParameterError; requires dt * max(gamma, omega, |delta|) < 0.05
    /// and t_max an integer multiple of dt.
    void validate() const;
    std::size_t n_steps() const;
    /// Times at which states are stored: k * record_every * dt, k = 0, 1, ...
    std::vector<double> record_times() const;
};

/// Stored samples of one conditional trajectory.
struct RFTrajectory {
    std::vector<double> times;
    std::vector<PureState> pure_states;      // jump unraveling
    std::vector<DensityMatrix> mixed_states;  // homodyne unraveling
    std::vector<double> jump_times;           // photodetection clicks
    std::vector<double> record;               // homodyne current integrated over each stored interval

    std::size_t size() const noexcept {
        return times.size();
    }
    double sigma_z(std::size_t k) const;
};

/// Unconditional state at record_times(), fixed-step RK4 on the master equation.
/// Throws StepSizeError if the trace drifts by more than 1e-6.
std::vector<DensityMatrix> me_solve(const RFParams &params);

/// Monte Carlo wave function trajectory: jump with probability
/// gamma <sigma+ sigma-> dt per step, else evolve under
/// H_eff = H - (i gamma / 2) sigma+ sigma- and renormalize.
RFTrajectory jump_trajectory(const RFParams &params, std::uint64_t seed);

/// Unit-efficiency x-quadrature homodyne trajectory of the stochastic master
/// equation, first order in dt. Each step applies the measurement operator
///   M = U (1 - gamma/2 sigma+ sigma- dt + sqrt(gamma) sigma- dy) U,  U = exp(-i H dt/2),
///   dy = sqrt(gamma) <sigma- + sigma+> dt + dW,
/// as rho -> M rho M^dagger / Tr, which expands to the Euler-Maruyama update and
/// keeps rho positive.
RFTrajectory homodyne_trajectory(const RFParams &params, std::uint64_t seed);

/// params.n_traj independent trajectories; trajectory i uses a seed derived
/// from (params.seed, i), so results do not depend on `threads`.
std::vector<RFTrajectory> jump_ensemble(const RFParams &params, std::size_t threads = 1);
std::vector<RFTrajectory> homodyne_ensemble(const RFParams &params, std::size_t threads = 1);

/// Unbiased sample variance of <sigma_z>^(r) at stored index k.
double rf_traj_variance(std::span<const RFTrajectory> ensemble, std::size_t k);

struct RFMoments {
    double mean = 0;
    double mean_se = 0;
    double variance = 0;      // unbiased
    double variance_se = 0;   // from the fourth central moment
    double variance_se_normal = 0;  // sqrt(2 / (n - 1)) * variance
};

RFMoments rf_moments(std::span<const RFTrajectory> ensemble, std::size_t k);

}  // namespace unravel

#endif
