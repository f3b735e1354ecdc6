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

#include "unravel/readout.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "unravel/error.h"
#include "unravel/rng.h"

namespace unravel {

namespace {

constexpr double kColumnSumTol = 1e-12;
constexpr double kFrequencySumTol = 1e-9;
constexpr std::size_t kMaxUnfoldIterations = 100000;
constexpr double kUnfoldStepTol = 1e-12;
constexpr double kSingularRatio = 1e-12;

}  // namespace

AssignmentMatrix::AssignmentMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols() || (entries_.rows() != 2 && entries_.rows() != 4)) {
        throw DimensionError("AssignmentMatrix: must be 2x2 or 4x4");
    }
    if (!entries_.allFinite() || entries_.minCoeff() < 0 || entries_.maxCoeff() > 1) {
        throw ParameterError("AssignmentMatrix: entries must lie in [0, 1]");
    }
    for (Eigen::Index j = 0; j < entries_.cols(); j++) {
        if (std::abs(entries_.col(j).sum() - 1.0) > kColumnSumTol) {
            throw ParameterError("AssignmentMatrix: column " + std::to_string(j) + " does not sum to 1");
        }
    }
}

AssignmentMatrix AssignmentMatrix::identity(Eigen::Index n_outcomes) {
    return AssignmentMatrix(Eigen::MatrixXd::Identity(n_outcomes, n_outcomes));
}

bool AssignmentMatrix::is_identity() const {
    return entries_ == Eigen::MatrixXd::Identity(entries_.rows(), entries_.cols());
}

void ReadoutNoiseParams::validate() const {
    for (double p : {p00, p11}) {
        if (!(p >= 0.5 && p <= 1.0)) {
            throw ParameterError("ReadoutNoiseParams: p00 and p11 must lie in [0.5, 1], got " + std::to_string(p));
        }
    }
}

AssignmentMatrix assignment_from_params(std::span<const ReadoutNoiseParams> params, int n_qubits) {
    if (n_qubits != 1 && n_qubits != 2) {
        throw ParameterError("assignment_from_params: n_qubits must be 1 or 2");
    }
    if (params.size() != static_cast<std::size_t>(n_qubits)) {
        throw ParameterError("assignment_from_params: need one parameter set per qubit");
    }
    auto single = [](const ReadoutNoiseParams &p) {
        p.validate();
        Eigen::Matrix2d m;
        m << p.p00, 1 - p.p11, 1 - p.p00, p.p11;
        return m;
    };
    if (n_qubits == 1) {
        return AssignmentMatrix(single(params[0]));
    }
    Eigen::Matrix2d a = single(params[0]);
    Eigen::Matrix2d b = single(params[1]);
    Eigen::MatrixXd m(4, 4);
    for (int i = 0; i < 2; i++) {
        for (int j = 0; j < 2; j++) {
            m.block(2 * i, 2 * j, 2, 2) = a(i, j) * b;
        }
    }
    return AssignmentMatrix(std::move(m));
}

std::vector<std::uint64_t> corrupt_counts(std::span<const std::uint64_t> true_counts, const AssignmentMatrix &m,
                                          std::uint64_t seed) {
    const auto n = static_cast<std::size_t>(m.n_outcomes());
    if (true_counts.size() != n) {
        throw DimensionError("corrupt_counts: counts length does not match the assignment matrix");
    }
    std::vector<std::uint64_t> observed(n, 0);
    std::vector<double> column(n);
    for (std::size_t j = 0; j < n; j++) {
        if (true_counts[j] == 0) {
            continue;
        }
        for (std::size_t i = 0; i < n; i++) {
            column[i] = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
        KeyedRng rng(seed, Stream::Readout, {j});
        auto draw = sample_multinomial(true_counts[j], column, rng);
        for (std::size_t i = 0; i < n; i++) {
            observed[i] += draw[i];
        }
    }
    return observed;
}

AssignmentMatrix calibrate(const BasisMeasurement &measure, Eigen::Index n_outcomes, std::uint64_t shots_per_state) {
    if (shots_per_state < 1) {
        throw CalibrationError("calibrate: shots_per_state must be >= 1");
    }
    if (n_outcomes != 2 && n_outcomes != 4) {
        throw DimensionError("calibrate: n_outcomes must be 2 or 4");
    }
    Eigen::MatrixXd m(n_outcomes, n_outcomes);
    for (Eigen::Index j = 0; j < n_outcomes; j++) {
        auto counts = measure(static_cast<std::size_t>(j), shots_per_state);
        if (counts.size() != static_cast<std::size_t>(n_outcomes)) {
            throw CalibrationError("calibrate: measurement returned wrong number of outcomes");
        }
        std::uint64_t total = 0;
        for (auto c : counts) {
            total += c;
        }
        if (total == 0) {
            throw CalibrationError("calibrate: no shots recorded for prepared state " + std::to_string(j));
        }
        for (Eigen::Index i = 0; i < n_outcomes; i++) {
            m(i, j) = static_cast<double>(counts[static_cast<std::size_t>(i)]) / static_cast<double>(total);
        }
    }
    return AssignmentMatrix(std::move(m));
}

BasisMeasurement simulated_basis_measurement(const AssignmentMatrix &truth, std::uint64_t seed) {
    return [truth, seed](std::size_t prepared, std::uint64_t shots) {
        std::vector<std::uint64_t> ideal(static_cast<std::size_t>(truth.n_outcomes()), 0);
        ideal.at(prepared) = shots;
        return corrupt_counts(ideal, truth, derive_key(seed, Stream::Calibration, {prepared}));
    };
}

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd &v) {
    std::vector<double> u(v.data(), v.data() + v.size());
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumsum = 0;
    double theta = 0;
    for (std::size_t j = 0; j < u.size(); j++) {
        cumsum += u[j];
        double candidate = (cumsum - 1.0) / static_cast<double>(j + 1);
        if (u[j] - candidate > 0) {
            theta = candidate;
        }
    }
    return (v.array() - theta).cwiseMax(0.0).matrix();
}

UnfoldResult unfold(std::span<const double> observed_freq, const AssignmentMatrix &m) {
    const Eigen::Index n = m.n_outcomes();
    if (static_cast<Eigen::Index>(observed_freq.size()) != n) {
        throw DimensionError("unfold: frequency vector length does not match the assignment matrix");
    }
    Eigen::VectorXd f(n);
    for (Eigen::Index i = 0; i < n; i++) {
        f(i) = observed_freq[static_cast<std::size_t>(i)];
    }
    if (!f.allFinite() || std::abs(f.sum() - 1.0) > kFrequencySumTol) {
        throw NormalizationError("unfold: observed frequencies must sum to 1");
    }

    const Eigen::MatrixXd &a = m.matrix();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    const auto &sv = svd.singularValues();
    if (sv(n - 1) <= kSingularRatio * sv(0)) {
        throw OptimizationError("unfold: assignment matrix is singular", (a * f - f).norm());
    }
    const double step = 1.0 / (sv(0) * sv(0));
    const Eigen::MatrixXd ata = a.transpose() * a;
    const Eigen::VectorXd atf = a.transpose() * f;

    UnfoldResult result;
    Eigen::VectorXd p = project_to_simplex(f);
    bool converged = false;
    for (std::size_t it = 1; it <= kMaxUnfoldIterations; it++) {
        Eigen::VectorXd next = project_to_simplex(p - step * (ata * p - atf));
        double change = (next - p).cwiseAbs().maxCoeff();
        p = std::move(next);
        result.iterations = it;
        if (change < kUnfoldStepTol) {
            converged = true;
            break;
        }
    }
    result.residual = (a * p - f).norm();
    if (!converged) {
        throw OptimizationError("unfold: no convergence after " + std::to_string(kMaxUnfoldIterations) + " iterations",
                                result.residual);
    }
    result.probabilities = std::move(p);
    return result;
}

}  // namespace unravel
