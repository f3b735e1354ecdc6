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

#include "unravel/trajectory.h"

#include <cmath>
#include <numeric>
#include <string>

#include "unravel/error.h"
#include "unravel/rng.h"

namespace unravel {

namespace {

void require_time(const ProtocolSpec &spec, double t) {
    if (!(t >= 0 && t <= spec.t_grid.back())) {
        throw RangeError("time " + std::to_string(t) + " outside [0, " + std::to_string(spec.t_grid.back()) + "]");
    }
}

std::vector<Branch> split(const std::vector<Branch> &parents, Unraveling u, int n_qubits) {
    const auto tokens = intervention_tokens(u, n_qubits);
    std::vector<Branch> children;
    children.reserve(parents.size() * tokens.size());

    std::vector<Matrix> kicks;
    if (u == Unraveling::Kick) {
        for (const auto &tok : tokens) {
            kicks.push_back(kick_unitary(tok, n_qubits).matrix());
        }
    }

    for (const auto &parent : parents) {
        for (std::size_t k = 0; k < tokens.size(); k++) {
            Branch child;
            child.label = parent.label;
            child.label.tokens.push_back(tokens[k]);
            if (!parent.defined() || parent.weight == 0) {
                children.push_back(std::move(child));
                continue;
            }
            const Vector &psi = parent.state->amplitudes();
            if (u == Unraveling::Projective) {
                // Outcome k projects onto basis state k.
                double p = std::norm(psi(static_cast<Eigen::Index>(k)));
                if (p > kZeroBranchProbability) {
                    Vector collapsed = Vector::Zero(psi.size());
                    collapsed(static_cast<Eigen::Index>(k)) = psi(static_cast<Eigen::Index>(k)) / std::sqrt(p);
                    child.weight = parent.weight * p;
                    child.state = PureState(std::move(collapsed));
                }
            } else {
                child.weight = parent.weight / static_cast<double>(tokens.size());
                child.state = PureState::normalized(kicks[k] * psi);
            }
            children.push_back(std::move(child));
        }
    }
    return children;
}

void evolve(std::vector<Branch> &branches, const Matrix &h, double dt) {
    if (dt == 0) {
        return;
    }
    UnitaryMatrix u = expm_hermitian(h, dt);
    for (auto &b : branches) {
        if (b.defined()) {
            b.state = u.apply(*b.state);
        }
    }
}

std::size_t ipow(std::size_t base, int exp) {
    std::size_t r = 1;
    for (int k = 0; k < exp; k++) {
        r *= base;
    }
    return r;
}

std::vector<double> outcome_probabilities(const Branch &b) {
    const Vector &psi = b.state->amplitudes();
    std::vector<double> p(static_cast<std::size_t>(psi.size()));
    for (Eigen::Index i = 0; i < psi.size(); i++) {
        p[static_cast<std::size_t>(i)] = std::norm(psi(i));
    }
    return p;
}

}  // namespace

std::string_view to_string(EnsembleMode m) {
    return m == EnsembleMode::Exact ? "exact" : "sampled";
}

std::uint64_t Branch::total_counts() const noexcept {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

double TrajectoryEnsemble::weight_sum() const noexcept {
    double s = 0;
    for (const auto &b : branches) {
        s += b.weight;
    }
    return s;
}

int intervention_count(const ProtocolSpec &spec, double t) {
    if (!(t >= 0)) {
        throw RangeError("intervention_count: time must be >= 0");
    }
    int m = 0;
    for (double tk : spec.intervention_times()) {
        if (t >= tk) {
            m++;
        }
    }
    return m;
}

TrajectoryEnsemble enumerate_branches(const ProtocolSpec &spec, double t) {
    spec.validate();
    require_time(spec, t);

    const Matrix h = spec.hamiltonian();
    std::vector<Branch> branches(1);
    branches[0].weight = 1.0;
    branches[0].state = PureState::basis(spec.dim(), 0);

    double now = 0;
    for (double tk : spec.intervention_times()) {
        if (t < tk) {
            break;
        }
        evolve(branches, h, tk - now);
        branches = split(branches, spec.unraveling, spec.n_qubits);
        now = tk;
    }
    evolve(branches, h, t - now);

    TrajectoryEnsemble ens;
    ens.time = t;
    ens.n_qubits = spec.n_qubits;
    ens.unraveling = spec.unraveling;
    ens.mode = EnsembleMode::Exact;
    ens.branches = std::move(branches);
    return ens;
}

TrajectoryEnsemble sample_shots(const ProtocolSpec &spec, std::size_t time_index) {
    spec.validate();
    if (time_index >= spec.t_grid.size()) {
        throw RangeError("sample_shots: time index out of range");
    }
    TrajectoryEnsemble ens = enumerate_branches(spec, spec.t_grid[time_index]);
    ens.mode = EnsembleMode::Sampled;
    ens.total_shots = spec.shots_per_time;

    const int m = intervention_count(spec, ens.time);
    const std::size_t fanout = intervention_tokens(spec.unraveling, spec.n_qubits).size();
    const std::size_t n_leaves = ens.branches.size();
    const auto dim = static_cast<std::size_t>(spec.dim());
    const std::uint64_t shots = spec.shots_per_time;

    std::vector<std::vector<double>> final_probs(n_leaves);
    for (std::size_t r = 0; r < n_leaves; r++) {
        ens.branches[r].counts.assign(dim, 0);
        if (ens.branches[r].defined()) {
            final_probs[r] = outcome_probabilities(ens.branches[r]);
        }
    }

    if (spec.unraveling == Unraveling::Projective) {
        // prefix_weight[l][j]: probability of the first l outcomes being the
        // base-`fanout` digits of j. Sequential Born sampling walks this tree.
        std::vector<std::vector<double>> prefix_weight(static_cast<std::size_t>(m) + 1);
        for (int l = 0; l <= m; l++) {
            std::size_t stride = ipow(fanout, m - l);
            prefix_weight[static_cast<std::size_t>(l)].assign(ipow(fanout, l), 0.0);
            for (std::size_t r = 0; r < n_leaves; r++) {
                prefix_weight[static_cast<std::size_t>(l)][r / stride] += ens.branches[r].weight;
            }
        }
        std::vector<double> conditional(fanout);
        for (std::uint64_t s = 0; s < shots; s++) {
            KeyedRng rng(spec.seed, Stream::Shots, {time_index, s});
            std::size_t prefix = 0;
            for (int l = 1; l <= m; l++) {
                const auto &parent_level = prefix_weight[static_cast<std::size_t>(l) - 1];
                const auto &level = prefix_weight[static_cast<std::size_t>(l)];
                double parent = parent_level[prefix];
                for (std::size_t b = 0; b < fanout; b++) {
                    conditional[b] = level[prefix * fanout + b] / parent;
                }
                prefix = prefix * fanout + rng.categorical(conditional);
            }
            ens.branches[prefix].counts[rng.categorical(final_probs[prefix])]++;
        }
    } else {
        // One sub-experiment per kick pattern; the remainder goes to the
        // lexicographically first patterns.
        std::uint64_t base = shots / n_leaves;
        std::uint64_t extra = shots % n_leaves;
        std::uint64_t s = 0;
        for (std::size_t r = 0; r < n_leaves; r++) {
            std::uint64_t n_r = base + (r < extra ? 1 : 0);
            for (std::uint64_t k = 0; k < n_r; k++, s++) {
                KeyedRng rng(spec.seed, Stream::Shots, {time_index, s});
                ens.branches[r].counts[rng.categorical(final_probs[r])]++;
            }
        }
    }

    for (auto &b : ens.branches) {
        b.weight = static_cast<double>(b.total_counts()) / static_cast<double>(shots);
    }
    return ens;
}

TrajectoryEnsemble sample_shots(const ProtocolSpec &spec, double t) {
    for (std::size_t k = 0; k < spec.t_grid.size(); k++) {
        if (spec.t_grid[k] == t) {
            return sample_shots(spec, k);
        }
    }
    throw RangeError("sample_shots: time " + std::to_string(t) + " is not on the evaluation grid");
}

DensityMatrix conditional_reduced_state(const Branch &branch, int keep) {
    if (!branch.defined()) {
        throw UndefinedBranchError("conditional_reduced_state: branch '" + branch.label.str() +
                                   "' has zero probability and no conditional state");
    }
    if (branch.state->dim() != 4) {
        throw DimensionError("conditional_reduced_state: requires a two-qubit branch");
    }
    return partial_trace(DensityMatrix(branch.state->projector()), keep);
}

DensityMatrix ensemble_average_state(const TrajectoryEnsemble &ensemble) {
    const Eigen::Index dim = Eigen::Index{1} << ensemble.n_qubits;
    Matrix rho = Matrix::Zero(dim, dim);
    for (const auto &b : ensemble.branches) {
        if (b.weight == 0) {
            continue;
        }
        if (!b.defined()) {
            throw UndefinedBranchError("ensemble_average_state: weighted branch without state");
        }
        rho += b.weight * b.state->projector();
    }
    return DensityMatrix(0.5 * (rho + rho.adjoint()));
}

DensityMatrix unconditional_state(const ProtocolSpec &spec, double t) {
    spec.validate();
    require_time(spec, t);
    const Matrix h = spec.hamiltonian();
    DensityMatrix rho = DensityMatrix::from_pure(PureState::basis(spec.dim(), 0));
    double now = 0;
    for (double tk : spec.intervention_times()) {
        if (t < tk) {
            break;
        }
        rho = dephase_projective(expm_hermitian(h, tk - now).conjugate(rho));
        now = tk;
    }
    return expm_hermitian(h, t - now).conjugate(rho);
}

Matrix measured_observable(int n_qubits) {
    if (n_qubits == 1) {
        return pauli::z();
    }
    if (n_qubits == 2) {
        return kron(pauli::z(), pauli::identity());
    }
    throw ParameterError("measured_observable: n_qubits must be 1 or 2");
}

}  // namespace unravel
