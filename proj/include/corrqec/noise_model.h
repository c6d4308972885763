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

#ifndef CORRQEC_NOISE_MODEL_H
#define CORRQEC_NOISE_MODEL_H

#include <string>
#include <vector>

#include "corrqec/operator_algebra.h"

namespace corrqec {

enum class KernelKind { Independent, CollectiveAxis, Exponential, CrossAxis, Table };

std::string kernel_kind_name(KernelKind kind);

/// Second moments of the bath operators coupling to sigma_l^alpha, factorized as
///
///     f_{l'l}^{beta alpha}(tau) = C[(l',beta), (l,alpha)] * exp(-|tau| / tau_c)
///
/// with C a 3L x 3L spatial/axis table indexed by flat Pauli indices (row = primed
/// index). C must be Hermitian, which is the time-reversal symmetry of the bath
/// correlation functions for this even temporal profile.
class CorrelationKernel {
  public:
    /// a * delta_{ll'} delta_{alpha beta}.
    static CorrelationKernel independent(int num_qubits, double amplitude, double tau_c, double coupling);
    /// a on axis `axis` for every qubit pair, zero on the other axes.
    static CorrelationKernel collective(int num_qubits, double amplitude, Axis axis, double tau_c, double coupling);
    /// a * delta_{alpha beta} * exp(-|l - l'| / correlation_length).
    static CorrelationKernel exponential(
        int num_qubits, double amplitude, double correlation_length, double tau_c, double coupling);
    /// The same 3x3 axis block on every qubit, no inter-qubit correlation.
    static CorrelationKernel cross_axis(int num_qubits, const ComplexMatrix &axis_block, double tau_c, double coupling);
    /// Explicit 3L x 3L table.
    static CorrelationKernel from_table(int num_qubits, const ComplexMatrix &table, double tau_c, double coupling);

    KernelKind kind() const {
        return kind_;
    }
    int num_qubits() const {
        return num_qubits_;
    }
    const ComplexMatrix &spatial() const {
        return spatial_;
    }
    double tau_c() const {
        return tau_c_;
    }
    double coupling() const {
        return coupling_;
    }

    /// g1^2 f_{l'l}^{beta alpha}(tau) for one table entry.
    Complex correlation(int row, int col, double tau) const;

    /// Same kernel family and parameters on a different number of qubits.
    /// Table kernels cannot be resized.
    CorrelationKernel resized(int num_qubits) const;

  private:
    CorrelationKernel(KernelKind kind, int num_qubits, ComplexMatrix spatial, double tau_c, double coupling);

    KernelKind kind_;
    int num_qubits_;
    ComplexMatrix spatial_;
    double tau_c_;
    double coupling_;
    // Parameters the factories were called with, kept for resized().
    double amplitude_ = 0;
    double correlation_length_ = 0;
    Axis axis_ = Axis::Z;
    ComplexMatrix axis_block_;
};

/// The decoherence-rate matrix A and Lamb-shift matrix B in the 3L-dimensional
/// flat Pauli basis (row = primed index). A is Hermitian PSD, B Hermitian.
class NoiseSpec {
  public:
    /// Validates A and B. Eigenvalues of A in [-1e-10, 0) are clamped to zero;
    /// anything more negative is a DomainError naming the eigenvalue.
    static NoiseSpec direct(const ComplexMatrix &a, const ComplexMatrix &b, int num_qubits);
    static NoiseSpec noiseless(int num_qubits);

    int num_qubits() const {
        return num_qubits_;
    }
    const ComplexMatrix &a() const {
        return a_;
    }
    const ComplexMatrix &b() const {
        return b_;
    }

    /// Both matrices multiplied by `factor`, i.e. a change of time unit.
    NoiseSpec scaled(double factor) const;
    double max_rate() const;

  private:
    NoiseSpec(int num_qubits, ComplexMatrix a, ComplexMatrix b);

    int num_qubits_;
    ComplexMatrix a_;
    ComplexMatrix b_;
};

/// Closed-form time integrals of an exponential kernel:
/// A = g1^2 * 2 tau_c * C, and B = 0 because the temporal profile is even.
NoiseSpec integrate_kernel(const CorrelationKernel &kernel);

/// Jump channels of the diagonalized dissipator together with the effective
/// Hamiltonian. Channel n has rate xi[n] and operator s_n = sum_j U(n, j) sigma_j.
struct JumpChannelSet {
    int num_qubits = 0;
    std::vector<double> rates;
    ComplexMatrix mixing;  // U, with A = U^dag diag(rates) U
    std::vector<ComplexMatrix> jump_ops;
    std::vector<bool> inert;
    ComplexMatrix lamb_shift;  // (1/2) sum B_{l'l}^{beta alpha} sigma_{l'}^beta sigma_l^alpha
    ComplexMatrix damping;     // sum over active channels of xi_n s_n^dag s_n
    ComplexMatrix h_eff;       // lamb_shift - (i/2) damping

    size_t num_channels() const {
        return rates.size();
    }
    size_t dim() const {
        return static_cast<size_t>(h_eff.rows());
    }
    double max_rate() const;
};

/// Diagonalizes A and assembles the channels. Channels with rate below
/// 1e-12 * max rate are kept in place but flagged inert.
JumpChannelSet build_channels(const NoiseSpec &spec);

/// Channels from a caller-supplied eigensystem of A. `mixing` rows are the
/// conjugated eigenvectors. Used to check invariance under the choice of basis
/// inside degenerate eigenspaces.
JumpChannelSet channels_from_eigensystem(const NoiseSpec &spec, std::vector<double> rates, ComplexMatrix mixing);

/// L_dissipator(rho) = sum xi_n (s_n rho s_n^dag - {s_n^dag s_n, rho}/2).
ComplexMatrix apply_dissipator(const JumpChannelSet &channels, const ComplexMatrix &rho);

}  // namespace corrqec

#endif
