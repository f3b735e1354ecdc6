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

#include "unravel/protocol.h"

#include <cmath>

#include "unravel/error.h"

namespace unravel {

namespace {

void require_qubits(int n_qubits, const char *what) {
    if (n_qubits != 1 && n_qubits != 2) {
        throw ParameterError(std::string(what) + ": n_qubits must be 1 or 2");
    }
}

// Parses a token of binary digits of the given width, e.g. "10" -> 2.
Eigen::Index parse_bits(std::string_view label, int width, const char *what) {
    if (static_cast<int>(label.size()) != width) {
        throw LabelError(std::string(what) + ": invalid label '" + std::string(label) + "'");
    }
    Eigen::Index index = 0;
    for (char c : label) {
        if (c != '0' && c != '1') {
            throw LabelError(std::string(what) + ": invalid label '" + std::string(label) + "'");
        }
        index = 2 * index + (c - '0');
    }
    return index;
}

// Applies sum_k A_k rho A_k^dagger / n for the given operators.
DensityMatrix mix(const DensityMatrix &rho, const std::vector<Matrix> &ops, double weight) {
    Matrix out = Matrix::Zero(rho.dim(), rho.dim());
    for (const auto &a : ops) {
        out += weight * (a * rho.matrix() * a.adjoint());
    }
    return DensityMatrix(std::move(out));
}

}  // namespace

std::string_view to_string(Unraveling u) {
    switch (u) {
        case Unraveling::Projective:
            return "projective";
        case Unraveling::Kick:
            return "kick";
    }
    return "?";
}

Unraveling parse_unraveling(std::string_view text) {
    if (text == "projective") {
        return Unraveling::Projective;
    }
    if (text == "kick") {
        return Unraveling::Kick;
    }
    throw LabelError("unknown unraveling '" + std::string(text) + "'");
}

void ProtocolSpec::validate() const {
    require_qubits(n_qubits, "ProtocolSpec");
    for (double v : {omega, delta, coupling_j, t1, t2}) {
        if (!std::isfinite(v)) {
            throw ParameterError("ProtocolSpec: parameters must be finite");
        }
    }
    if (t_grid.empty() || t_grid.front() != 0.0) {
        throw ParameterError("ProtocolSpec: t_grid must start at 0");
    }
    for (std::size_t k = 1; k < t_grid.size(); k++) {
        if (!(t_grid[k] > t_grid[k - 1]) || !std::isfinite(t_grid[k])) {
            throw ParameterError("ProtocolSpec: t_grid must be strictly increasing");
        }
    }
    if (!(0 < t1 && t1 < t2 && t2 <= t_grid.back())) {
        throw ParameterError("ProtocolSpec: need 0 < t1 < t2 <= max(t_grid)");
    }
    if (shots_per_time < 1) {
        throw ParameterError("ProtocolSpec: shots_per_time must be >= 1");
    }
}

Matrix ProtocolSpec::hamiltonian() const {
    return n_qubits == 1 ? h_rf(omega, delta) : h_two_qubit(omega, delta, coupling_j);
}

std::string RecordLabel::str() const {
    std::string out;
    for (const auto &t : tokens) {
        out += t;
    }
    return out;
}

Matrix h_rf(double omega, double delta) {
    if (!std::isfinite(omega) || !std::isfinite(delta)) {
        throw ParameterError("h_rf: parameters must be finite");
    }
    return 0.5 * omega * pauli::x() - 0.5 * delta * pauli::z();
}

Matrix h_two_qubit(double omega, double delta, double j) {
    if (!std::isfinite(j)) {
        throw ParameterError("h_two_qubit: coupling must be finite");
    }
    Matrix h1 = h_rf(omega, delta);
    Matrix id = pauli::identity();
    return kron(h1, id) + kron(id, h1) + j * kron(pauli::z(), pauli::z());
}

DensityMatrix dephase_projective(const DensityMatrix &rho) {
    int n = rho.dim() == 2 ? 1 : 2;
    std::vector<Matrix> ops;
    for (const auto &label : intervention_tokens(Unraveling::Projective, n)) {
        ops.push_back(projector(label, n));
    }
    return mix(rho, ops, 1.0);
}

DensityMatrix dephase_kick(const DensityMatrix &rho) {
    int n = rho.dim() == 2 ? 1 : 2;
    std::vector<Matrix> ops;
    for (const auto &label : intervention_tokens(Unraveling::Kick, n)) {
        ops.push_back(kick_unitary(label, n).matrix());
    }
    return mix(rho, ops, 1.0 / static_cast<double>(ops.size()));
}

UnitaryMatrix kick_unitary(std::string_view label, int n_qubits) {
    require_qubits(n_qubits, "kick_unitary");
    if (n_qubits == 1) {
        if (label == "I") {
            return UnitaryMatrix(pauli::identity());
        }
        if (label == "Z") {
            return UnitaryMatrix(pauli::z());
        }
        throw LabelError("kick_unitary: invalid single-qubit kick '" + std::string(label) + "'");
    }
    Eigen::Index ab = parse_bits(label, 2, "kick_unitary");
    Matrix za = (ab >> 1) ? pauli::z() : pauli::identity();
    Matrix zb = (ab & 1) ? pauli::z() : pauli::identity();
    return UnitaryMatrix(kron(za, zb));
}

Matrix projector(std::string_view label, int n_qubits) {
    require_qubits(n_qubits, "projector");
    Eigen::Index dim = Eigen::Index{1} << n_qubits;
    Eigen::Index index = parse_bits(label, n_qubits, "projector");
    Matrix p = Matrix::Zero(dim, dim);
    p(index, index) = 1.0;
    return p;
}

std::vector<std::string> intervention_tokens(Unraveling u, int n_qubits) {
    require_qubits(n_qubits, "intervention_tokens");
    if (n_qubits == 1) {
        return u == Unraveling::Projective ? std::vector<std::string>{"0", "1"} : std::vector<std::string>{"I", "Z"};
    }
    return {"00", "01", "10", "11"};
}

Matrix swap_matrix() {
    Matrix s = Matrix::Zero(4, 4);
    s(0, 0) = 1;
    s(1, 2) = 1;
    s(2, 1) = 1;
    s(3, 3) = 1;
    return s;
}

}  // namespace unravel
