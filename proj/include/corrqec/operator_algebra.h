// Copyright 2026 The corrqec Authors
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

#ifndef CORRQEC_OPERATOR_ALGEBRA_H
#define CORRQEC_OPERATOR_ALGEBRA_H

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace corrqec {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Dense storage caps the register at 12 qubits (Hilbert dimension 4096).
constexpr int kMaxQubits = 12;

/// Raised when an argument is outside the mathematical domain of an operation.
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Raised when a requested object would exceed the dense-storage cap.
struct ResourceError : std::length_error {
    using std::length_error::length_error;
};

/// Raised when an iterative numerical routine fails to converge or drifts out of tolerance.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Axis : uint8_t { X = 1, Y = 2, Z = 3 };

char axis_char(Axis axis);

/// A single-qubit Pauli sigma_l^alpha. Qubits are 1-based.
///
/// The flat index 3(l-1)+alpha-1 is the only ordering used for the 3L x 3L
/// correlation matrices, their eigenvector matrix, and jump-channel numbering.
struct PauliIndex {
    int qubit = 1;
    Axis axis = Axis::X;

    int flat() const {
        return 3 * (qubit - 1) + static_cast<int>(axis) - 1;
    }
    static PauliIndex from_flat(int flat_index);

    bool operator==(const PauliIndex &) const = default;
};

size_t hilbert_dim(int num_qubits);
void check_num_qubits(int num_qubits);

/// Matrix of sigma_l^alpha on an L-qubit register. Qubit 1 is the leftmost tensor
/// factor, i.e. the most significant bit of the computational basis index.
ComplexMatrix pauli_op(PauliIndex idx, int num_qubits);

/// Pauli string such as "XZZXI" (one character per qubit, qubit 1 first).
ComplexMatrix pauli_string_op(std::string_view paulis);

ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b);

struct HermitianEigen {
    std::vector<double> values;  // ascending
    ComplexMatrix vectors;       // unitary, column j pairs with values[j]
};

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// The input must be Hermitian to 1e-10 (absolute, entrywise) and is symmetrized
/// before rotating. Degenerate eigenvalues get an arbitrary orthonormal basis.
HermitianEigen hermitian_eig(const ComplexMatrix &m);

/// exp(scale * m) by scaling and squaring of a truncated Taylor series.
ComplexMatrix matrix_exp(const ComplexMatrix &m, Complex scale);

double max_abs(const ComplexMatrix &m);
double hermiticity_error(const ComplexMatrix &m);
bool all_finite(const ComplexMatrix &m);

/// A normalized pure state on an L-qubit register.
class StateVector {
  public:
    /// Normalizes `amplitudes`; throws DomainError on wrong dimension, non-finite
    /// entries or a vanishing norm.
    StateVector(int num_qubits, ComplexVector amplitudes);

    static StateVector basis(int num_qubits, size_t index);
    /// Computational basis state from a bit string such as "0110".
    static StateVector from_bits(std::string_view bits);

    int num_qubits() const {
        return num_qubits_;
    }
    size_t dim() const {
        return static_cast<size_t>(amplitudes_.size());
    }
    const ComplexVector &amplitudes() const {
        return amplitudes_;
    }
    Complex operator[](size_t k) const {
        return amplitudes_[static_cast<Eigen::Index>(k)];
    }

    Complex inner(const StateVector &other) const;
    /// |<this|other>|^2.
    double fidelity(const StateVector &other) const;
    ComplexMatrix projector() const;

  private:
    int num_qubits_;
    ComplexVector amplitudes_;
};

/// A density operator on an L-qubit register.
///
/// Construction checks dimension, Hermiticity (1e-10) and unit trace (1e-9). Positivity
/// is not checked on construction because it needs a full eigendecomposition; call
/// min_eigenvalue() where it matters.
class DensityMatrix {
  public:
    DensityMatrix(int num_qubits, ComplexMatrix matrix);
    explicit DensityMatrix(const StateVector &pure);

    static DensityMatrix maximally_mixed(int num_qubits);

    int num_qubits() const {
        return num_qubits_;
    }
    size_t dim() const {
        return static_cast<size_t>(matrix_.rows());
    }
    const ComplexMatrix &matrix() const {
        return matrix_;
    }

    double trace() const;
    double purity() const;
    double min_eigenvalue() const;
    /// <psi|rho|psi>.
    double fidelity(const StateVector &psi) const;
    /// tr(rho sigma), the fidelity to a pure reference when sigma is a projector.
    double overlap(const DensityMatrix &other) const;

  private:
    int num_qubits_;
    ComplexMatrix matrix_;
};

/// Half the trace norm of (a - b).
double trace_distance(const ComplexMatrix &a, const ComplexMatrix &b);
double trace_distance(const DensityMatrix &a, const DensityMatrix &b);

}  // namespace corrqec

#endif
