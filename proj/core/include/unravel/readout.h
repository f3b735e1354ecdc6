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

#ifndef UNRAVEL_READOUT_H
#define UNRAVEL_READOUT_H

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace unravel {

/// Column-stochastic confusion matrix, entry (observed, true).
class AssignmentMatrix {
   public:
    /// Validates: square 2x2 or 4x4, entries in [0,1], columns sum to 1 within 1e-12.
    explicit AssignmentMatrix(Eigen::MatrixXd entries);

    static AssignmentMatrix identity(Eigen::Index n_outcomes);

    const Eigen::MatrixXd &matrix() const noexcept {
        return entries_;
    }
    Eigen::Index n_outcomes() const noexcept {
        return entries_.rows();
    }
    double operator()(Eigen::Index observed, Eigen::Index truth) const {
        return entries_(observed, truth);
    }
    bool is_identity() const;

   private:
    Eigen::MatrixXd entries_;
};

/// Per-qubit detector: p00 = P(read 0 | 0), p11 = P(read 1 | 1).
struct ReadoutNoiseParams {
    double p00 = 1.0;
    double p11 = 1.0;

    static ReadoutNoiseParams from_fidelity(double f) {
        return {f, f};
    }
    double fidelity() const noexcept {
        return 0.5 * (p00 + p11);
    }
    /// Throws ParameterError unless both probabilities are in [0.5, 1].
    void validate() const;
};

/// Tensor-product noise model: one parameter set per qubit, qubit 1 is the
/// left factor of the (00, 01, 10, 11) ordering.
AssignmentMatrix assignment_from_params(std::span<const ReadoutNoiseParams> params, int n_qubits);

/// Reassigns each true-outcome shot to an observed outcome by sampling the
/// corresponding column of M. Total shots are preserved.
std::vector<std::uint64_t> corrupt_counts(std::span<const std::uint64_t> true_counts, const AssignmentMatrix &m,
                                          std::uint64_t seed);

/// Observed counts after preparing computational basis state `prepared`.
using BasisMeasurement = std::function<std::vector<std::uint64_t>(std::size_t prepared, std::uint64_t shots)>;

/// Column j = empirical observed frequencies when basis state j is prepared.
AssignmentMatrix calibrate(const BasisMeasurement &measure, Eigen::Index n_outcomes, std::uint64_t shots_per_state);

/// Basis-state preparation followed by readout through `truth`.
BasisMeasurement simulated_basis_measurement(const AssignmentMatrix &truth, std::uint64_t seed);

struct UnfoldResult {
    Eigen::VectorXd probabilities;
    double residual = 0;  // ||M p - f||_2
    std::size_t iterations = 0;
};

/// Bounded least squares: argmin ||M p - f||^2 subject to p >= 0, sum p = 1.
///
/// Projected gradient descent on the probability simplex with step 1/||M||_2^2,
/// started from f. Stops when the largest coordinate change is below 1e-12;
/// throws OptimizationError after 1e5 iterations or for a singular M.
UnfoldResult unfold(std::span<const double> observed_freq, const AssignmentMatrix &m);

/// Euclidean projection onto {p : p >= 0, sum p = 1}.
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd &v);

}  // namespace unravel

#endif
