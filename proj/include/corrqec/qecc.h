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

#ifndef CORRQEC_QECC_H
#define CORRQEC_QECC_H

#include <cstdint>
#include <string>
#include <vector>

#include "corrqec/operator_algebra.h"
#include "corrqec/trajectory.h"

namespace corrqec {

/// A Pauli string over {I, X, Y, Z}, qubit 1 first, stored in symplectic form.
struct PauliString {
    std::string text;
    std::vector<uint8_t> x_bits;
    std::vector<uint8_t> z_bits;

    static PauliString parse(const std::string &text);
    /// R_n of the single-qubit error basis: identity for n = 0, else sigma at flat n - 1.
    static PauliString error_basis(int index, int num_qubits);

    size_t num_qubits() const {
        return text.size();
    }
    bool commutes_with(const PauliString &other) const;
    ComplexMatrix matrix() const;
};

/// An independent syndrome value: bit g is set when generator g reads -1.
using Syndrome = uint32_t;

struct SyndromeOutcome {
    Syndrome bits = 0;
    StateVector collapsed;
    double born_probability = 1;

    /// Bit g as 0 (eigenvalue +1) or 1 (eigenvalue -1).
    int bit(size_t g) const {
        return static_cast<int>((bits >> g) & 1u);
    }
};

/// A nondegenerate stabilizer code whose 3n+1 single-qubit error basis elements
/// have distinct syndromes.
class StabilizerCode {
  public:
    StabilizerCode(std::string name, std::vector<std::string> generators, std::string logical_x);

    const std::string &name() const {
        return name_;
    }
    int num_physical() const {
        return num_physical_;
    }
    size_t num_generators() const {
        return generators_.size();
    }
    const std::vector<PauliString> &generators() const {
        return generators_;
    }
    const std::vector<ComplexMatrix> &generator_matrices() const {
        return generator_matrices_;
    }
    const StateVector &logical_zero() const {
        return logical_zero_;
    }
    const StateVector &logical_one() const {
        return logical_one_;
    }
    size_t num_errors() const {
        return error_basis_.size();
    }
    const std::vector<ComplexMatrix> &error_basis() const {
        return error_basis_;
    }
    /// Syndrome produced by error basis element R_n.
    Syndrome error_syndrome(size_t n) const {
        return error_syndromes_[n];
    }
    /// Recovery index m for a syndrome value.
    int recovery_index(Syndrome s) const;
    /// Projector onto the joint eigenspace labelled by syndrome s.
    const ComplexMatrix &syndrome_projector(Syndrome s) const {
        return projectors_[s];
    }

    /// Generators one per line, e.g. "g1 = XZZXI".
    std::string describe() const;

  private:
    std::string name_;
    int num_physical_;
    std::vector<PauliString> generators_;
    std::vector<ComplexMatrix> generator_matrices_;
    StateVector logical_zero_;
    StateVector logical_one_;
    std::vector<ComplexMatrix> error_basis_;
    std::vector<Syndrome> error_syndromes_;
    std::vector<int> recovery_table_;
    std::vector<ComplexMatrix> projectors_;
};

/// Cyclic [[5,1,3]] code with generators XZZXI, IXZZX, XIXZZ, ZXIXZ and logical X = XXXXX.
/// Every construction invariant is re-checked; a failure throws std::logic_error.
const StabilizerCode &five_qubit_code();

/// Looks up a code by identifier ("five_qubit").
const StabilizerCode &code_by_name(const std::string &name);

/// alpha |0_L> + beta |1_L>. Throws DomainError unless |alpha|^2 + |beta|^2 = 1 within 1e-10.
StateVector encode(Complex alpha, Complex beta, const StabilizerCode &code);

/// <psi| R_n^dag R_m |psi> over the error basis.
ComplexMatrix error_gram_matrix(const StateVector &psi, const StabilizerCode &code);

/// Sequential projective measurement of each generator in list order.
SyndromeOutcome measure_syndrome(const StateVector &psi, const StabilizerCode &code, RngStream &rng);

/// Applies the recovery R_m for the measured syndrome.
StateVector recover(const SyndromeOutcome &outcome, const StabilizerCode &code);

/// sum_m R_m P_m rho P_m R_m^dag over all syndromes.
DensityMatrix correction_channel(const DensityMatrix &rho, const StabilizerCode &code);

}  // namespace corrqec

#endif
