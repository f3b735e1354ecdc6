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

#include "unravel/continuous_rf.h"

#include <cmath>
#include <random>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "unravel/error.h"
#include "unravel/parallel.h"
#include "unravel/protocol.h"
#include "unravel/rng.h"

namespace unravel {

namespace {

using Mat2 = Eigen::Matrix2cd;
using Vec2 = Eigen::Vector2cd;

constexpr double kStabilityGuard = 0.05;
constexpr double kTraceDriftLimit = 1e-6;
constexpr double kPositivityFloor = -1e-6;
constexpr double kNormFloor = 1e-200;

struct Operators {
    Mat2 h;
    Mat2 lower;   // sigma_minus
    Mat2 excited; // sigma_plus sigma_minus
};

Operators operators(const RFParams &p) {
    Operators ops;
    ops.h = h_rf(p.omega, p.delta);
    ops.lower = pauli::sigma_minus();
    ops.excited = pauli::sigma_plus() * pauli::sigma_minus();
    return ops;
}

Vec2 initial_vector(const RFParams &p) {
    Vec2 v = Vec2::Zero();
    v(p.start_excited ? 1 : 0) = 1.0;
    return v;
}

Mat2 lindblad_rhs(const Mat2 &rho, const Operators &ops, double gamma) {
    const Complex i(0, 1);
    Mat2 comm = ops.h * rho - rho * ops.h;
    Mat2 diss = ops.lower * rho * ops.lower.adjoint() - 0.5 * (ops.excited * rho + rho * ops.excited);
    return -i * comm + gamma * diss;
}

double min_eigenvalue(const Mat2 &rho) {
    double a = rho(0, 0).real();
    double d = rho(1, 1).real();
    double b = std::abs(rho(0, 1));
    return 0.5 * (a + d) - std::sqrt(0.25 * (a - d) * (a - d) + b * b);
}

DensityMatrix to_density(const Mat2 &rho) {
    return DensityMatrix(Matrix(0.5 * (rho + rho.adjoint())));
}

}  // namespace

void RFParams::validate() const {
    for (double v : {omega, delta, gamma, dt, t_max}) {
        if (!std::isfinite(v)) {
            throw ParameterError("RFParams: parameters must be finite");
        }
    }
    if (!(gamma > 0)) {
        throw ParameterError("RFParams: gamma must be positive");
    }
    if (!(dt > 0) || !(t_max > 0)) {
        throw ParameterError("RFParams: dt and t_max must be positive");
    }
    double rate = std::max({gamma, std::abs(omega), std::abs(delta)});
    if (!(dt * rate < kStabilityGuard)) {
        throw ParameterError("RFParams: dt * max(gamma, omega, |delta|) = " + std::to_string(dt * rate) +
                             " violates the stability guard < 0.05");
    }
    double steps = t_max / dt;
    if (std::abs(steps - std::round(steps)) > 1e-9 * steps) {
        throw ParameterError("RFParams: t_max must be an integer multiple of dt");
    }
    if (record_every < 1) {
        throw ParameterError("RFParams: record_every must be >= 1");
    }
    if (n_traj < 1) {
        throw ParameterError("RFParams: n_traj must be >= 1");
    }
}

std::size_t RFParams::n_steps() const {
    return static_cast<std::size_t>(std::llround(t_max / dt));
}

std::vector<double> RFParams::record_times() const {
    std::vector<double> t;
    for (std::size_t k = 0; k <= n_steps(); k += record_every) {
        t.push_back(static_cast<double>(k) * dt);
    }
    return t;
}

double RFTrajectory::sigma_z(std::size_t k) const {
    if (!pure_states.empty()) {
        return expval(pauli::z(), pure_states.at(k));
    }
    return expval(pauli::z(), mixed_states.at(k));
}

std::vector<DensityMatrix> me_solve(const RFParams &params) {
    params.validate();
    const Operators ops = operators(params);
    const double dt = params.dt;
    const double g = params.gamma;
    Vec2 psi0 = initial_vector(params);
    Mat2 rho = psi0 * psi0.adjoint();

    std::vector<DensityMatrix> out;
    out.push_back(to_density(rho));
    double drift = 0;
    for (std::size_t k = 1; k <= params.n_steps(); k++) {
        Mat2 k1 = lindblad_rhs(rho, ops, g);
        Mat2 k2 = lindblad_rhs(rho + 0.5 * dt * k1, ops, g);
        Mat2 k3 = lindblad_rhs(rho + 0.5 * dt * k2, ops, g);
        Mat2 k4 = lindblad_rhs(rho + dt * k3, ops, g);
        rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        drift = std::max(drift, std::abs(rho.trace() - 1.0));
        if (drift > kTraceDriftLimit) {
            throw StepSizeError("me_solve: trace drifted by " + std::to_string(drift) + " at t = " +
                                std::to_string(static_cast<double>(k) * dt));
        }
        if (k % params.record_every == 0) {
            out.push_back(to_density(rho));
        }
    }
    return out;
}

RFTrajectory jump_trajectory(const RFParams &params, std::uint64_t seed) {
    params.validate();
    const Operators ops = operators(params);
    const Complex i(0, 1);
    const Mat2 h_eff = ops.h - 0.5 * i * params.gamma * ops.excited;
    const Mat2 no_jump = (-i * params.dt * h_eff).exp();

    KeyedRng rng(seed);
    RFTrajectory traj;
    Vec2 psi = initial_vector(params);
    traj.times.push_back(0);
    traj.pure_states.emplace_back(Vector(psi));
    for (std::size_t k = 1; k <= params.n_steps(); k++) {
        double p_jump = params.gamma * std::norm(psi(1)) * params.dt;
        if (rng.uniform() < p_jump) {
            psi = ops.lower * psi;
            traj.jump_times.push_back(static_cast<double>(k) * params.dt);
        } else {
            psi = no_jump * psi;
        }
        double n2 = psi.squaredNorm();
        if (!(n2 > kNormFloor) || !std::isfinite(n2)) {
            throw StepSizeError("jump_trajectory: state norm underflow at step " + std::to_string(k));
        }
        psi /= std::sqrt(n2);
        if (k % params.record_every == 0) {
            traj.times.push_back(static_cast<double>(k) * params.dt);
            traj.pure_states.emplace_back(Vector(psi));
        }
    }
    return traj;
}

RFTrajectory homodyne_trajectory(const RFParams &params, std::uint64_t seed) {
    params.validate();
    const Operators ops = operators(params);
    const double dt = params.dt;
    const double sqrt_gamma = std::sqrt(params.gamma);
    const Mat2 half_step = expm_hermitian(ops.h, 0.5 * dt).matrix();
    const Mat2 drift = Mat2::Identity() - 0.5 * params.gamma * dt * ops.excited;
    const Mat2 quadrature = ops.lower + ops.lower.adjoint();

    KeyedRng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double sqrt_dt = std::sqrt(dt);

    RFTrajectory traj;
    Vec2 psi0 = initial_vector(params);
    Mat2 rho = psi0 * psi0.adjoint();
    traj.times.push_back(0);
    traj.mixed_states.push_back(to_density(rho));
    double current = 0;
    for (std::size_t k = 1; k <= params.n_steps(); k++) {
        double x = (quadrature * rho).trace().real();
        double dy = sqrt_gamma * x * dt + sqrt_dt * normal(rng);
        current += dy;
        Mat2 m = half_step * (drift + sqrt_gamma * dy * ops.lower) * half_step;
        rho = m * rho * m.adjoint();
        double tr = rho.trace().real();
        if (!(tr > 0) || !std::isfinite(tr)) {
            throw StepSizeError("homodyne_trajectory: degenerate trace at step " + std::to_string(k));
        }
        rho /= tr;
        rho = 0.5 * (rho + rho.adjoint());
        if (min_eigenvalue(rho) < kPositivityFloor) {
            throw StepSizeError("homodyne_trajectory: positivity violated at step " + std::to_string(k));
        }
        if (k % params.record_every == 0) {
            traj.times.push_back(static_cast<double>(k) * dt);
            traj.mixed_states.push_back(to_density(rho));
            traj.record.push_back(current);
            current = 0;
        }
    }
    return traj;
}

namespace {

template <typename Simulate>
std::vector<RFTrajectory> ensemble(const RFParams &params, std::size_t threads, Stream stream, Simulate simulate) {
    params.validate();
    std::vector<RFTrajectory> out(params.n_traj);
    parallel_for(params.n_traj, threads, [&](std::size_t i) {
        out[i] = simulate(params, derive_key(params.seed, stream, {i}));
    });
    return out;
}

}  // namespace

std::vector<RFTrajectory> jump_ensemble(const RFParams &params, std::size_t threads) {
    return ensemble(params, threads, Stream::Jump, jump_trajectory);
}

std::vector<RFTrajectory> homodyne_ensemble(const RFParams &params, std::size_t threads) {
    return ensemble(params, threads, Stream::Homodyne, homodyne_trajectory);
}

RFMoments rf_moments(std::span<const RFTrajectory> ensemble, std::size_t k) {
    const std::size_t n = ensemble.size();
    if (n < 2) {
        throw SampleSizeError("rf_moments: need at least 2 trajectories");
    }
    std::vector<double> z(n);
    double mean = 0;
    for (std::size_t r = 0; r < n; r++) {
        z[r] = ensemble[r].sigma_z(k);
        mean += z[r];
    }
    mean /= static_cast<double>(n);
    double m2 = 0;
    double m4 = 0;
    for (double v : z) {
        double d = v - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    const double nd = static_cast<double>(n);
    RFMoments out;
    out.mean = mean;
    out.variance = m2 / (nd - 1);
    out.mean_se = std::sqrt(out.variance / nd);
    m4 /= nd;
    double s4 = out.variance * out.variance;
    out.variance_se = std::sqrt(std::max(0.0, (m4 - s4 * (nd - 3) / (nd - 1)) / nd));
    out.variance_se_normal = std::sqrt(2.0 / (nd - 1)) * out.variance;
    return out;
}

double rf_traj_variance(std::span<const RFTrajectory> ensemble, std::size_t k) {
    if (ensemble.size() < 2) {
        throw SampleSizeError("rf_traj_variance: need at least 2 trajectories");
    }
    return rf_moments(ensemble, k).variance;
}

}  // namespace unravel
