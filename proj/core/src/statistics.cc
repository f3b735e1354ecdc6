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

#include "unravel/statistics.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include <spdlog/spdlog.h>

#include "unravel/error.h"
#include "unravel/rng.h"

namespace unravel {

namespace {

constexpr double kWeightSumTol = 1e-9;
constexpr double kMaxDiscardFraction = 0.10;

void require_normalized(std::span<const ConditionalEstimate> estimates) {
    if (estimates.empty()) {
        throw NormalizationError("no branch estimates to average");
    }
    double s = 0;
    for (const auto &e : estimates) {
        s += e.weight;
    }
    if (std::abs(s - 1.0) > kWeightSumTol) {
        throw NormalizationError("branch weights sum to " + std::to_string(s));
    }
}

// Qubit-1 expectation p(b1 = 1) - p(b1 = 0) from a distribution over the
// joint computational-basis outcomes.
template <typename Probs>
double qubit1_expectation(const Probs &p, std::size_t n, int n_qubits) {
    double e = 0;
    for (std::size_t idx = 0; idx < n; idx++) {
        bool b1 = (idx >> (n_qubits - 1)) & 1;
        e += b1 ? p[idx] : -p[idx];
    }
    return e;
}

double estimate_from_counts(std::span<const std::uint64_t> counts, int n_qubits, const AssignmentMatrix *mitigation) {
    std::uint64_t total = 0;
    for (auto c : counts) {
        total += c;
    }
    std::vector<double> freq(counts.size());
    for (std::size_t i = 0; i < counts.size(); i++) {
        freq[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
    }
    if (mitigation != nullptr && !mitigation->is_identity()) {
        auto unfolded = unfold(freq, *mitigation);
        return qubit1_expectation(unfolded.probabilities, counts.size(), n_qubits);
    }
    return qubit1_expectation(freq, counts.size(), n_qubits);
}

std::vector<double> flatten_probabilities(const CountTable &counts, std::uint64_t &total) {
    total = 0;
    for (const auto &g : counts) {
        for (auto c : g) {
            total += c;
        }
    }
    std::vector<double> p;
    for (const auto &g : counts) {
        for (auto c : g) {
            p.push_back(static_cast<double>(c) / static_cast<double>(total));
        }
    }
    return p;
}

CountTable resample(const CountTable &counts, ResampleScheme scheme, KeyedRng &rng) {
    CountTable out(counts.size());
    if (scheme == ResampleScheme::WithinGroup) {
        for (std::size_t g = 0; g < counts.size(); g++) {
            std::uint64_t n = 0;
            for (auto c : counts[g]) {
                n += c;
            }
            if (n == 0) {
                out[g].assign(counts[g].size(), 0);
                continue;
            }
            std::vector<double> p(counts[g].size());
            for (std::size_t k = 0; k < p.size(); k++) {
                p[k] = static_cast<double>(counts[g][k]) / static_cast<double>(n);
            }
            out[g] = sample_multinomial(n, p, rng);
        }
        return out;
    }
    std::uint64_t total = 0;
    auto p = flatten_probabilities(counts, total);
    auto flat = sample_multinomial(total, p, rng);
    std::size_t k = 0;
    for (std::size_t g = 0; g < counts.size(); g++) {
        out[g].assign(flat.begin() + static_cast<std::ptrdiff_t>(k),
                      flat.begin() + static_cast<std::ptrdiff_t>(k + counts[g].size()));
        k += counts[g].size();
    }
    return out;
}

}  // namespace

ConditionalEstimate conditional_estimate(const Branch &branch, int n_qubits, EnsembleMode mode,
                                         const AssignmentMatrix *mitigation) {
    ConditionalEstimate est;
    est.label = branch.label;
    est.weight = branch.weight;
    if (mode == EnsembleMode::Sampled) {
        std::uint64_t n = branch.total_counts();
        if (n == 0) {
            throw EmptyBranchError("branch '" + branch.label.str() + "' has no final-measurement shots");
        }
        est.value = estimate_from_counts(branch.counts, n_qubits, mitigation);
        est.n_shots = n;
        return est;
    }
    if (!branch.defined()) {
        throw UndefinedBranchError("branch '" + branch.label.str() + "' has no conditional state");
    }
    est.value = expval(measured_observable(n_qubits), *branch.state);
    return est;
}

std::vector<ConditionalEstimate> estimate_branches(const TrajectoryEnsemble &ensemble,
                                                   const AssignmentMatrix *mitigation, bool warn_on_drop) {
    std::vector<ConditionalEstimate> out;
    for (const auto &b : ensemble.branches) {
        if (ensemble.mode == EnsembleMode::Exact) {
            if (b.weight > 0) {
                out.push_back(conditional_estimate(b, ensemble.n_qubits, ensemble.mode));
            }
            continue;
        }
        try {
            out.push_back(conditional_estimate(b, ensemble.n_qubits, ensemble.mode, mitigation));
        } catch (const EmptyBranchError &e) {
            // An unobserved projective record is simply absent; an empty kick
            // circuit is a realized branch without data.
            if (warn_on_drop && ensemble.unraveling == Unraveling::Kick) {
                spdlog::warn("t={}: dropping kick pattern '{}' with no shots", ensemble.time, b.label.str());
            }
        }
    }
    double s = 0;
    for (const auto &e : out) {
        s += e.weight;
    }
    if (ensemble.mode == EnsembleMode::Sampled && s > 0) {
        for (auto &e : out) {
            e.weight /= s;
        }
    }
    return out;
}

double ensemble_mean(std::span<const ConditionalEstimate> estimates) {
    require_normalized(estimates);
    double mu = 0;
    for (const auto &e : estimates) {
        mu += e.weight * e.value;
    }
    return mu;
}

double trajectory_variance(std::span<const ConditionalEstimate> estimates) {
    double mu = ensemble_mean(estimates);
    double v = 0;
    for (const auto &e : estimates) {
        v += e.weight * (e.value - mu) * (e.value - mu);
    }
    return v;
}

double traj_avg_entropy(const TrajectoryEnsemble &ensemble) {
    double s = 0;
    for (const auto &b : ensemble.branches) {
        if (b.weight == 0) {
            continue;
        }
        if (!b.defined()) {
            throw UndefinedBranchError("traj_avg_entropy: weighted branch '" + b.label.str() + "' has no state");
        }
        s += b.weight * (ensemble.n_qubits == 1 ? vn_entropy(*b.state) : vn_entropy(conditional_reduced_state(b, 1)));
    }
    return s;
}

AverageStateEntropy entropy_of_average(const DensityMatrix &state) {
    AverageStateEntropy out;
    out.full = vn_entropy(state);
    out.reduced = state.dim() == 4 ? vn_entropy(partial_trace(state, 1)) : out.full;
    return out;
}

AverageStateEntropy entropy_of_average(const TrajectoryEnsemble &ensemble) {
    return entropy_of_average(ensemble_average_state(ensemble));
}

SemiExperimentalEntropy semi_experimental_entropy(std::span<const BranchWeight> empirical,
                                                  const TrajectoryEnsemble &ideal) {
    std::map<RecordLabel, const Branch *> by_label;
    for (const auto &b : ideal.branches) {
        by_label[b.label] = &b;
    }
    double total = 0;
    for (const auto &w : empirical) {
        if (!by_label.contains(w.label)) {
            throw SchemaError("semi_experimental_entropy: label '" + w.label.str() + "' has no ideal branch");
        }
        if (!(w.weight >= 0)) {
            throw NormalizationError("semi_experimental_entropy: negative weight");
        }
        total += w.weight;
    }
    if (!(total > 0)) {
        throw NormalizationError("semi_experimental_entropy: empirical weights sum to zero");
    }

    const Eigen::Index dim = Eigen::Index{1} << ideal.n_qubits;
    Matrix rho = Matrix::Zero(dim, dim);
    SemiExperimentalEntropy out;
    for (const auto &w : empirical) {
        if (w.weight == 0) {
            continue;
        }
        const Branch &b = *by_label.at(w.label);
        if (!b.defined()) {
            throw UndefinedBranchError("semi_experimental_entropy: observed record '" + w.label.str() +
                                       "' has zero ideal probability");
        }
        double weight = w.weight / total;
        rho += weight * b.state->projector();
        out.traj_avg += weight * (ideal.n_qubits == 1 ? vn_entropy(*b.state)
                                                      : vn_entropy(conditional_reduced_state(b, 1)));
    }
    auto avg = entropy_of_average(DensityMatrix(0.5 * (rho + rho.adjoint())));
    out.of_average_full = avg.full;
    out.of_average_reduced = avg.reduced;
    return out;
}

CountTable count_table(const TrajectoryEnsemble &sampled) {
    if (sampled.mode != EnsembleMode::Sampled) {
        throw ValidationError("count_table: ensemble is not sampled");
    }
    CountTable table;
    table.reserve(sampled.branches.size());
    for (const auto &b : sampled.branches) {
        table.push_back(b.counts);
    }
    return table;
}

double nearest_rank_percentile(std::span<const double> sorted, double percentile) {
    if (sorted.empty()) {
        throw SampleSizeError("nearest_rank_percentile: no data");
    }
    if (!(percentile > 0 && percentile <= 100)) {
        throw ParameterError("nearest_rank_percentile: percentile must be in (0, 100]");
    }
    auto rank = static_cast<std::size_t>(std::ceil(percentile / 100.0 * static_cast<double>(sorted.size())));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

std::vector<Interval> bootstrap_ci(const CountTable &counts, const VectorEstimator &estimator,
                                   const BootstrapOptions &options) {
    if (options.n_resamples < 100) {
        throw ParameterError("bootstrap_ci: n_resamples must be >= 100");
    }
    std::uint64_t total = 0;
    for (const auto &g : counts) {
        for (auto c : g) {
            total += c;
        }
    }
    if (counts.empty() || total == 0) {
        throw SampleSizeError("bootstrap_ci: counts are empty");
    }

    std::vector<std::vector<double>> samples;
    std::size_t discarded = 0;
    for (std::size_t r = 0; r < options.n_resamples; r++) {
        KeyedRng rng(options.seed, Stream::Bootstrap, {r});
        CountTable synthetic = resample(counts, options.scheme, rng);
        std::vector<double> values;
        try {
            values = estimator(synthetic);
        } catch (const Error &e) {
            discarded++;
            spdlog::debug("bootstrap resample {} discarded: {}", r, e.what());
            continue;
        }
        if (samples.empty()) {
            samples.resize(values.size());
        } else if (values.size() != samples.size()) {
            throw BootstrapError("bootstrap_ci: estimator returned a varying number of outputs");
        }
        for (std::size_t q = 0; q < values.size(); q++) {
            samples[q].push_back(values[q]);
        }
    }
    if (static_cast<double>(discarded) > kMaxDiscardFraction * static_cast<double>(options.n_resamples)) {
        throw BootstrapError("bootstrap_ci: estimator failed on " + std::to_string(discarded) + " of " +
                             std::to_string(options.n_resamples) + " resamples");
    }
    if (discarded > 0) {
        spdlog::warn("bootstrap: discarded {} of {} resamples", discarded, options.n_resamples);
    }

    std::vector<Interval> out;
    for (auto &s : samples) {
        std::sort(s.begin(), s.end());
        out.push_back({nearest_rank_percentile(s, options.lo_percentile), nearest_rank_percentile(s, options.hi_percentile)});
    }
    return out;
}

Interval bootstrap_ci(const CountTable &counts, const ScalarEstimator &estimator, const BootstrapOptions &options) {
    auto wrapped = [&](const CountTable &c) { return std::vector<double>{estimator(c)}; };
    return bootstrap_ci(counts, VectorEstimator(wrapped), options).at(0);
}

SampledStatistics sampled_statistics(const TrajectoryEnsemble &ideal, const CountTable &counts,
                                     const AssignmentMatrix *mitigation, bool semi_experimental, bool warn_on_drop) {
    if (counts.size() != ideal.branches.size()) {
        throw SchemaError("sampled_statistics: count table does not match the branch structure");
    }
    TrajectoryEnsemble view;
    view.time = ideal.time;
    view.n_qubits = ideal.n_qubits;
    view.unraveling = ideal.unraveling;
    view.mode = EnsembleMode::Sampled;

    std::uint64_t total = 0;
    for (const auto &g : counts) {
        for (auto c : g) {
            total += c;
        }
    }
    if (total == 0) {
        throw SampleSizeError("sampled_statistics: no shots");
    }
    view.total_shots = total;
    std::vector<BranchWeight> weights;
    for (std::size_t r = 0; r < counts.size(); r++) {
        Branch b;
        b.label = ideal.branches[r].label;
        b.counts = counts[r];
        b.weight = static_cast<double>(b.total_counts()) / static_cast<double>(total);
        weights.push_back({b.label, b.weight});
        view.branches.push_back(std::move(b));
    }

    auto estimates = estimate_branches(view, mitigation, warn_on_drop);
    SampledStatistics out;
    out.mu = ensemble_mean(estimates);
    out.var_traj = trajectory_variance(estimates);
    if (semi_experimental) {
        out.semi = semi_experimental_entropy(weights, ideal);
    }
    return out;
}

}  // namespace unravel
