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

#include "unravel/qmat.h"

#include <cmath>
#include <string>

#include "unravel/error.h"

namespace unravel {

namespace {

void require_finite(const Matrix &m, const char *what) {
    if (!m.allFinite()) {
        throw InvalidOperatorError(std::string(what) + ": entries must be finite");
    }
}

void require_square(const Matrix &m, const char *what) {
    if (m.rows() != m.cols()) {
        throw DimensionError(std::string(what) + ": matrix must be square, got " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()));
    }
}

}  // namespace

void require_supported_dim(Eigen::Index dim, const char *what) {
    if (dim != 2 && dim != 4) {
        throw DimensionError(std::string(what) + ": dimension must be 2 or 4, got " + std::to_string(dim));
    }
}

double hermiticity_defect(const Matrix &a) {
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

double unitarity_defect(const Matrix &u) {
    return (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

PureState::PureState(Vector amplitudes) : amplitudes_(std::move(amplitudes)) {
    require_supported_dim(amplitudes_.size(), "PureState");
    if (!amplitudes_.allFinite()) {
        throw InvalidStateError("PureState: amplitudes must be finite");
    }
    double norm2 = amplitudes_.squaredNorm();
    if (std::abs(norm2 - 1.0) > kNormTol) {
        throw InvalidStateError("PureState: squared norm " + std::to_string(norm2) + " differs from 1");
    }
}

PureState PureState::basis(Eigen::Index dim, Eigen::Index index) {
    require_supported_dim(dim, "PureState::basis");
    if (index < 0 || index >= dim) {
        throw RangeError("PureState::basis: index out of range");
    }
    Vector v = Vector::Zero(dim);
    v(index) = 1.0;
    return PureState(std::move(v));
}

PureState PureState::normalized(const Vector &v) {
    double n = v.norm();
    if (!(n > 0) || !std::isfinite(n)) {
        throw InvalidStateError("PureState::normalized: vector has zero or non-finite norm");
    }
    return PureState(v / n);
}

DensityMatrix::DensityMatrix(Matrix entries) : entries_(std::move(entries)) {
    require_square(entries_, "DensityMatrix");
    require_supported_dim(entries_.rows(), "DensityMatrix");
    if (!entries_.allFinite()) {
        throw InvalidStateError("DensityMatrix: entries must be finite");
    }
    if (hermiticity_defect(entries_) > kHermitianTol) {
        throw InvalidStateError("DensityMatrix: not Hermitian");
    }
    Complex tr = entries_.trace();
    if (std::abs(tr - 1.0) > kTraceTol) {
        throw InvalidStateError("DensityMatrix: trace " + std::to_string(tr.real()) + " differs from 1");
    }
    if (eigenvalues().minCoeff() < kEigenvalueFloor) {
        throw InvalidStateError("DensityMatrix: negative eigenvalue");
    }
}

DensityMatrix DensityMatrix::from_pure(const PureState &psi) {
    return DensityMatrix(psi.projector());
}

DensityMatrix DensityMatrix::maximally_mixed(Eigen::Index dim) {
    require_supported_dim(dim, "DensityMatrix::maximally_mixed");
    return DensityMatrix(Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

Eigen::VectorXd DensityMatrix::eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(entries_, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw EigenDecompositionError("DensityMatrix: eigenvalue computation failed");
    }
    return solver.eigenvalues();
}

UnitaryMatrix::UnitaryMatrix(Matrix entries) : entries_(std::move(entries)) {
    require_square(entries_, "UnitaryMatrix");
    require_supported_dim(entries_.rows(), "UnitaryMatrix");
    require_finite(entries_, "UnitaryMatrix");
    double defect = unitarity_defect(entries_);
    if (defect > kUnitaryTol) {
        throw InvalidOperatorError("UnitaryMatrix: U^dagger U deviates from identity by " + std::to_string(defect));
    }
}

PureState UnitaryMatrix::apply(const PureState &psi) const {
    if (psi.dim() != dim()) {
        throw DimensionError("UnitaryMatrix::apply: dimension mismatch");
    }
    return PureState::normalized(entries_ * psi.amplitudes());
}

DensityMatrix UnitaryMatrix::conjugate(const DensityMatrix &rho) const {
    if (rho.dim() != dim()) {
        throw DimensionError("UnitaryMatrix::conjugate: dimension mismatch");
    }
    Matrix out = entries_ * rho.matrix() * entries_.adjoint();
    return DensityMatrix(0.5 * (out + out.adjoint()));
}

namespace pauli {

Matrix identity(Eigen::Index dim) {
    return Matrix::Identity(dim, dim);
}

Matrix x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

Matrix y() {
    const Complex i(0, 1);
    Matrix m(2, 2);
    m << 0, i, -i, 0;
    return m;
}

Matrix z() {
    Matrix m(2, 2);
    m << -1, 0, 0, 1;
    return m;
}

Matrix sigma_minus() {
    const Complex i(0, 1);
    return 0.5 * (x() - i * y());
}

Matrix sigma_plus() {
    const Complex i(0, 1);
    return 0.5 * (x() + i * y());
}

}  // namespace pauli

UnitaryMatrix expm_hermitian(const Matrix &h, double t) {
    require_square(h, "expm_hermitian");
    require_supported_dim(h.rows(), "expm_hermitian");
    require_finite(h, "expm_hermitian");
    if (!std::isfinite(t)) {
        throw ParameterError("expm_hermitian: time must be finite");
    }
    double defect = hermiticity_defect(h);
    if (defect > kHermitianTol) {
        throw InvalidOperatorError("expm_hermitian: generator is not Hermitian (defect " + std::to_string(defect) +
                                   ")");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (h + h.adjoint()));
    if (solver.info() != Eigen::Success) {
        throw EigenDecompositionError("expm_hermitian: eigendecomposition failed for " + std::to_string(h.rows()) +
                                      "x" + std::to_string(h.rows()) + " generator, max |H| = " +
                                      std::to_string(h.cwiseAbs().maxCoeff()));
    }
    const Matrix &v = solver.eigenvectors();
    Vector phases(h.rows());
    for (Eigen::Index k = 0; k < h.rows(); k++) {
        phases(k) = std::polar(1.0, -solver.eigenvalues()(k) * t);
    }
    return UnitaryMatrix(v * phases.asDiagonal() * v.adjoint());
}

Matrix kron(const Matrix &a, const Matrix &b) {
    if (a.rows() != 2 || a.cols() != 2 || b.rows() != 2 || b.cols() != 2) {
        throw DimensionError("kron: both factors must be 2x2");
    }
    Matrix out(4, 4);
    for (Eigen::Index i = 0; i < 2; i++) {
        for (Eigen::Index j = 0; j < 2; j++) {
            out.block(2 * i, 2 * j, 2, 2) = a(i, j) * b;
        }
    }
    return out;
}

DensityMatrix partial_trace(const DensityMatrix &rho, int keep) {
    if (rho.dim() != 4) {
        throw DimensionError("partial_trace: expected a two-qubit (4x4) state, got dimension " +
                             std::to_string(rho.dim()));
    }
    if (keep != 1 && keep != 2) {
        throw RangeError("partial_trace: keep must be 1 or 2");
    }
    const Matrix &m = rho.matrix();
    Matrix out = Matrix::Zero(2, 2);
    for (Eigen::Index i = 0; i < 2; i++) {
        for (Eigen::Index j = 0; j < 2; j++) {
            for (Eigen::Index k = 0; k < 2; k++) {
                out(i, j) += keep == 1 ? m(2 * i + k, 2 * j + k) : m(2 * k + i, 2 * k + j);
            }
        }
    }
    return DensityMatrix(0.5 * (out + out.adjoint()));
}

double vn_entropy(const DensityMatrix &rho) {
    Eigen::VectorXd lambda = rho.eigenvalues();
    double s = 0;
    for (Eigen::Index k = 0; k < lambda.size(); k++) {
        double l = lambda(k);
        if (l < kEigenvalueFloor) {
            throw InvalidStateError("vn_entropy: eigenvalue " + std::to_string(l) + " below -1e-10");
        }
        if (l > 0) {
            s -= l * std::log2(l);
        }
    }
    return std::max(0.0, s);
}

double binary_entropy(double p) {
    if (p <= 0 || p >= 1) {
        return 0.0;
    }
    return -p * std::log2(p) - (1 - p) * std::log2(1 - p);
}

double expval(const Matrix &op, const DensityMatrix &rho) {
    if (op.rows() != rho.dim() || op.cols() != rho.dim()) {
        throw DimensionError("expval: operator and state dimensions differ");
    }
    Complex v = (op * rho.matrix()).trace();
    if (std::abs(v.imag()) > kImagTol) {
        throw InvalidOperatorError("expval: Tr(op rho) has imaginary part " + std::to_string(v.imag()));
    }
    return v.real();
}

double expval(const Matrix &op, const PureState &psi) {
    if (op.rows() != psi.dim() || op.cols() != psi.dim()) {
        throw DimensionError("expval: operator and state dimensions differ");
    }
    Complex v = psi.amplitudes().dot(op * psi.amplitudes());
    if (std::abs(v.imag()) > kImagTol) {
        throw InvalidOperatorError("expval: <psi|op|psi> has imaginary part " + std::to_string(v.imag()));
    }
    return v.real();
}

}  // namespace unravel
