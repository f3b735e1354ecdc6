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

#ifndef UNRAVEL_QMAT_H
#define UNRAVEL_QMAT_H

#include <complex>

#include <Eigen/Dense>

namespace unravel {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Tolerances shared by the state and operator invariants.
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kNormTol = 1e-12;
inline constexpr double kUnitaryTol = 1e-10;
inline constexpr double kEigenvalueFloor = -1e-10;
inline constexpr double kImagTol = 1e-8;

/// Throws DimensionError unless dim is 2 or 4.
void require_supported_dim(Eigen::Index dim, const char *what);

/// Max element of |A - A^dagger|.
double hermiticity_defect(const Matrix &a);

/// Max element deviation of U^dagger U from the identity.
double unitarity_defect(const Matrix &u);

/// Normalized state vector in dimension 2 or 4.
class PureState {
   public:
    /// Validates the norm (within 1e-12) and dimension.
    explicit PureState(Vector amplitudes);

    /// Computational basis state |index>.
    static PureState basis(Eigen::Index dim, Eigen::Index index);

    /// Renormalizes an arbitrary nonzero vector.
    static PureState normalized(const Vector &v);

    const Vector &amplitudes() const noexcept {
        return amplitudes_;
    }
    Eigen::Index dim() const noexcept {
        return amplitudes_.size();
    }
    Matrix projector() const {
        return amplitudes_ * amplitudes_.adjoint();
    }

   private:
    Vector amplitudes_;
};

/// Hermitian, unit-trace, positive semidefinite matrix in dimension 2 or 4.
class DensityMatrix {
   public:
    /// Validates hermiticity, trace and positivity (eigenvalues >= -1e-10).
    explicit DensityMatrix(Matrix entries);

    static DensityMatrix from_pure(const PureState &psi);
    static DensityMatrix maximally_mixed(Eigen::Index dim);

    const Matrix &matrix() const noexcept {
        return entries_;
    }
    Eigen::Index dim() const noexcept {
        return entries_.rows();
    }
    /// Eigenvalues in ascending order.
    Eigen::VectorXd eigenvalues() const;

   private:
    Matrix entries_;
};

class UnitaryMatrix {
   public:
    /// Validates U^dagger U = 1 within 1e-10.
    explicit UnitaryMatrix(Matrix entries);

    const Matrix &matrix() const noexcept {
        return entries_;
    }
    Eigen::Index dim() const noexcept {
        return entries_.rows();
    }
    PureState apply(const PureState &psi) const;
    DensityMatrix conjugate(const DensityMatrix &rho) const;

   private:
    Matrix entries_;
};

/// Single-qubit operators with sigma_z |0> = -|0>: sigma_z = diag(-1, +1).
/// |0> is the ground state and sigma_minus = |0><1| lowers |1> to |0>.
namespace pauli {
Matrix identity(Eigen::Index dim = 2);
Matrix x();
Matrix y();
Matrix z();
Matrix sigma_minus();
Matrix sigma_plus();
}  // namespace pauli

/// exp(-i H t) from the eigendecomposition of the Hermitian generator H.
UnitaryMatrix expm_hermitian(const Matrix &h, double t);

/// Tensor product with qubit 1 as the left factor: |b1 b2> = |b1> (x) |b2>.
Matrix kron(const Matrix &a, const Matrix &b);

/// Reduced state of a two-qubit density matrix; keep = 1 traces out qubit 2.
DensityMatrix partial_trace(const DensityMatrix &rho, int keep);

/// Von Neumann entropy in bits. Eigenvalues in (-1e-10, 0) are clamped to 0.
double vn_entropy(const DensityMatrix &rho);

/// A normalized pure state carries no entropy.
constexpr double vn_entropy(const PureState &) noexcept {
    return 0.0;
}

/// Binary entropy H2(p) in bits.
double binary_entropy(double p);

/// Tr(op rho); throws InvalidOperatorError if the imaginary part exceeds 1e-8.
double expval(const Matrix &op, const DensityMatrix &rho);
double expval(const Matrix &op, const PureState &psi);

}  // namespace unravel

#endif
