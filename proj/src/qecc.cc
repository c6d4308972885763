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

#include "corrqec/qecc.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace corrqec {

namespace {

constexpr double kCodeTol = 1e-10;

void require(bool condition, const std::string &code_name, const std::string &what) {
    if (!condition) {
        throw std::logic_error("stabilizer code '" + code_name + "' failed self-check: " + what);
    }
}

}  // namespace

PauliString PauliString::parse(const std::string &text) {
    PauliString out;
    out.text = text;
    for (char c : text) {
        switch (c) {
            case 'I':
                out.x_bits.push_back(0);
                out.z_bits.push_back(0);
                break;
            case 'X':
                out.x_bits.push_back(1);
                out.z_bits.push_back(0);
                break;
            case 'Y':
                out.x_bits.push_back(1);
                out.z_bits.push_back(1);
                break;
            case 'Z':
                out.x_bits.push_back(0);
                out.z_bits.push_back(1);
                break;
            default:
                throw DomainError("Pauli strings may contain only I, X, Y, Z; got '" + text + "'");
        }
    }
    return out;
}

PauliString PauliString::error_basis(int index, int num_qubits) {
    std::string text(static_cast<size_t>(num_qubits), 'I');
    if (index > 0) {
        PauliIndex p = PauliIndex::from_flat(index - 1);
        if (p.qubit > num_qubits) {
            throw DomainError("error basis index out of range");
        }
        text[static_cast<size_t>(p.qubit - 1)] = axis_char(p.axis);
    }
    return parse(text);
}

bool PauliString::commutes_with(const PauliString &other) const {
    if (other.num_qubits() != num_qubits()) {
        throw DomainError("Pauli strings act on different numbers of qubits");
    }
    unsigned parity = 0;
    for (size_t q = 0; q < num_qubits(); q++) {
        parity ^= (x_bits[q] & other.z_bits[q]) ^ (z_bits[q] & other.x_bits[q]);
    }
    return parity == 0;
}

ComplexMatrix PauliString::matrix() const {
    return pauli_string_op(text);
}

StabilizerCode::StabilizerCode(std::string name, std::vector<std::string> generators, std::string logical_x)
    : name_(std::move(name)),
      num_physical_(generators.empty() ? 0 : static_cast<int>(generators.front().size())),
      logical_zero_(StateVector::basis(1, 0)),
      logical_one_(StateVector::basis(1, 1)) {
    require(!generators.empty(), name_, "no generators");
    require(logical_x.size() == static_cast<size_t>(num_physical_), name_, "logical X has the wrong length");
    for (const std::string &g : generators) {
        require(g.size() == static_cast<size_t>(num_physical_), name_, "generators have unequal lengths");
        generators_.push_back(PauliString::parse(g));
        generator_matrices_.push_back(generators_.back().matrix());
    }
    const size_t r = generators_.size();
    auto dim = static_cast<Eigen::Index>(hilbert_dim(num_physical_));
    const ComplexMatrix identity = ComplexMatrix::Identity(dim, dim);

    for (size_t a = 0; a < r; a++) {
        require(max_abs(generator_matrices_[a] * generator_matrices_[a] - identity) < kCodeTol, name_,
                "generator " + generators_[a].text + " does not square to I");
        for (size_t b = a + 1; b < r; b++) {
            require(generators_[a].commutes_with(generators_[b]), name_, "generators do not commute");
            require(max_abs(generator_matrices_[a] * generator_matrices_[b] -
                            generator_matrices_[b] * generator_matrices_[a]) < kCodeTol,
                    name_, "generator matrices do not commute");
        }
    }

    // |0_L> is the normalized projection of |0...0> onto the code space.
    ComplexVector zero = ComplexVector::Zero(dim);
    zero[0] = 1.0;
    for (const ComplexMatrix &g : generator_matrices_) {
        zero = 0.5 * (zero + g * zero);
    }
    require(zero.norm() > 1e-6, name_, "|0...0> has no overlap with the code space");
    logical_zero_ = StateVector(num_physical_, zero);
    PauliString xbar = PauliString::parse(logical_x);
    for (const PauliString &g : generators_) {
        require(xbar.commutes_with(g), name_, "logical X does not commute with the stabilizer");
    }
    logical_one_ = StateVector(num_physical_, xbar.matrix() * logical_zero_.amplitudes());

    for (const ComplexMatrix &g : generator_matrices_) {
        for (const StateVector *cw : {&logical_zero_, &logical_one_}) {
            require((g * cw->amplitudes() - cw->amplitudes()).norm() < kCodeTol, name_,
                    "codeword is not a +1 eigenstate of every generator");
        }
    }
    require(std::abs(logical_zero_.inner(logical_one_)) < 1e-12, name_, "logical codewords are not orthogonal");

    const size_t num_errors = 3 * static_cast<size_t>(num_physical_) + 1;
    const size_t num_syndromes = size_t{1} << r;
    recovery_table_.assign(num_syndromes, -1);
    for (size_t n = 0; n < num_errors; n++) {
        PauliString e = PauliString::error_basis(static_cast<int>(n), num_physical_);
        error_basis_.push_back(e.matrix());
        Syndrome s = 0;
        for (size_t g = 0; g < r; g++) {
            if (!e.commutes_with(generators_[g])) {
                s |= Syndrome{1} << g;
            }
        }
        require(recovery_table_[s] == -1, name_, "two single-qubit errors share a syndrome (degenerate code)");
        recovery_table_[s] = static_cast<int>(n);
        error_syndromes_.push_back(s);
    }
    require(num_errors == num_syndromes, name_, "syndromes and single-qubit errors are not in bijection");

    for (Syndrome s = 0; s < num_syndromes; s++) {
        ComplexMatrix p = identity;
        for (size_t g = 0; g < r; g++) {
            double sign = ((s >> g) & 1u) ? -1.0 : 1.0;
            p = (0.5 * (identity + sign * generator_matrices_[g])) * p;
        }
        projectors_.push_back(std::move(p));
    }

    StateVector plus(num_physical_, logical_zero_.amplitudes() + logical_one_.amplitudes());
    for (const StateVector *psi : {&logical_zero_, &logical_one_, &plus}) {
        ComplexMatrix gram = error_gram_matrix(*psi, *this);
        require(max_abs(gram - ComplexMatrix::Identity(gram.rows(), gram.cols())) < kCodeTol, name_,
                "error basis is not orthonormal on the code space");
    }
}

int StabilizerCode::recovery_index(Syndrome s) const {
    if (s >= recovery_table_.size()) {
        throw DomainError("syndrome value out of range");
    }
    return recovery_table_[s];
}

std::string StabilizerCode::describe() const {
    std::ostringstream out;
    out << name_ << " [[" << num_physical_ << ",1]] code\n";
    for (size_t g = 0; g < generators_.size(); g++) {
        out << "g" << (g + 1) << " = " << generators_[g].text << "\n";
    }
    return out.str();
}

const StabilizerCode &five_qubit_code() {
    static const StabilizerCode code("five_qubit", {"XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"}, "XXXXX");
    return code;
}

const StabilizerCode &code_by_name(const std::string &name) {
    if (name == "five_qubit") {
        return five_qubit_code();
    }
    throw DomainError("unknown code '" + name + "' (supported: five_qubit)");
}

StateVector encode(Complex alpha, Complex beta, const StabilizerCode &code) {
    double norm2 = std::norm(alpha) + std::norm(beta);
    if (std::abs(norm2 - 1.0) > 1e-10) {
        std::ostringstream msg;
        msg << "logical amplitudes have |alpha|^2 + |beta|^2 = " << norm2 << ", expected 1";
        throw DomainError(msg.str());
    }
    return StateVector(
        code.num_physical(), alpha * code.logical_zero().amplitudes() + beta * code.logical_one().amplitudes());
}

ComplexMatrix error_gram_matrix(const StateVector &psi, const StabilizerCode &code) {
    auto n = static_cast<Eigen::Index>(code.num_errors());
    ComplexMatrix images(psi.amplitudes().size(), n);
    for (Eigen::Index k = 0; k < n; k++) {
        images.col(k) = code.error_basis()[static_cast<size_t>(k)] * psi.amplitudes();
    }
    return images.adjoint() * images;
}

SyndromeOutcome measure_syndrome(const StateVector &psi, const StabilizerCode &code, RngStream &rng) {
    if (psi.num_qubits() != code.num_physical()) {
        throw DomainError("state does not live on the code's physical qubits");
    }
    ComplexVector v = psi.amplitudes();
    Syndrome bits = 0;
    double probability = 1;
    for (size_t g = 0; g < code.num_generators(); g++) {
        const ComplexMatrix &gen = code.generator_matrices()[g];
        ComplexVector gv = gen * v;
        ComplexVector plus = 0.5 * (v + gv);
        double p_plus = plus.squaredNorm();
        if (!(p_plus >= -1e-10 && p_plus <= 1 + 1e-10)) {
            std::ostringstream msg;
            msg << "syndrome probability " << p_plus << " outside [0, 1]";
            throw NumericalError(msg.str());
        }
        double u = rng.uniform();
        ComplexVector minus = 0.5 * (v - gv);
        double p_minus = minus.squaredNorm();
        if (u < p_plus || p_minus <= 1e-300) {
            v = plus / std::sqrt(p_plus);
            probability *= p_plus;
        } else {
            v = minus / std::sqrt(p_minus);
            probability *= p_minus;
            bits |= Syndrome{1} << g;
        }
    }
    return SyndromeOutcome{bits, StateVector(psi.num_qubits(), std::move(v)), probability};
}

StateVector recover(const SyndromeOutcome &outcome, const StabilizerCode &code) {
    int m = code.recovery_index(outcome.bits);
    const ComplexMatrix &r = code.error_basis()[static_cast<size_t>(m)];
    return StateVector(outcome.collapsed.num_qubits(), r * outcome.collapsed.amplitudes());
}

DensityMatrix correction_channel(const DensityMatrix &rho, const StabilizerCode &code) {
    if (rho.num_qubits() != code.num_physical()) {
        throw DomainError("density matrix does not live on the code's physical qubits");
    }
    const ComplexMatrix &m = rho.matrix();
    ComplexMatrix out = ComplexMatrix::Zero(m.rows(), m.cols());
    size_t num_syndromes = size_t{1} << code.num_generators();
    for (Syndrome s = 0; s < num_syndromes; s++) {
        const ComplexMatrix &r = code.error_basis()[static_cast<size_t>(code.recovery_index(s))];
        ComplexMatrix kraus = r * code.syndrome_projector(s);
        out.noalias() += kraus * m * kraus.adjoint();
    }
    out = 0.5 * (out + out.adjoint()).eval();
    return DensityMatrix(rho.num_qubits(), std::move(out));
}

}  // namespace corrqec
