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

#include "corrqec/noise_model.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace corrqec {

namespace {

constexpr double kHermitianTol = 1e-10;
constexpr double kPsdFloor = -1e-10;
constexpr double kInertRelative = 1e-12;
constexpr double kEntryRoundoff = 1e-14;

Eigen::Index table_dim(int num_qubits) {
    check_num_qubits(num_qubits);
    return 3 * static_cast<Eigen::Index>(num_qubits);
}

void check_table(const ComplexMatrix &m, int num_qubits, const char *what) {
    Eigen::Index n = table_dim(num_qubits);
    if (m.rows() != n || m.cols() != n) {
        std::ostringstream msg;
        msg << what << " must be " << n << "x" << n << " for " << num_qubits << " qubits, got " << m.rows() << "x"
            << m.cols();
        throw DomainError(msg.str());
    }
    if (!all_finite(m)) {
        throw DomainError(std::string(what) + " has non-finite entries");
    }
    double err = hermiticity_error(m);
    if (err > kHermitianTol) {
        std::ostringstream msg;
        msg << what << " is not Hermitian (max deviation " << err << ")";
        throw DomainError(msg.str());
    }
}

ComplexMatrix symmetrized(const ComplexMatrix &m) {
    return 0.5 * (m + m.adjoint());
}

std::vector<ComplexMatrix> all_paulis(int num_qubits) {
    std::vector<ComplexMatrix> out;
    out.reserve(3 * static_cast<size_t>(num_qubits));
    for (int j = 0; j < 3 * num_qubits; j++) {
        out.push_back(pauli_op(PauliIndex::from_flat(j), num_qubits));
    }
    return out;
}

void check_timescales(double tau_c, double coupling) {
    if (!(tau_c > 0) || !std::isfinite(tau_c)) {
        throw DomainError("kernel correlation time tau_c must be positive");
    }
    if (!std::isfinite(coupling)) {
        throw DomainError("kernel coupling must be finite");
    }
}

}  // namespace

std::string kernel_kind_name(KernelKind kind) {
    switch (kind) {
        case KernelKind::Independent:
            return "independent";
        case KernelKind::CollectiveAxis:
            return "collective";
        case KernelKind::Exponential:
            return "exponential";
        case KernelKind::CrossAxis:
            return "cross_axis";
        case KernelKind::Table:
            return "table";
    }
    return "unknown";
}

CorrelationKernel::CorrelationKernel(
    KernelKind kind, int num_qubits, ComplexMatrix spatial, double tau_c, double coupling)
    : kind_(kind), num_qubits_(num_qubits), spatial_(std::move(spatial)), tau_c_(tau_c), coupling_(coupling) {
    check_timescales(tau_c, coupling);
    check_table(spatial_, num_qubits, "correlation table");
    spatial_ = symmetrized(spatial_);
}

CorrelationKernel CorrelationKernel::independent(int num_qubits, double amplitude, double tau_c, double coupling) {
    Eigen::Index n = table_dim(num_qubits);
    CorrelationKernel k(
        KernelKind::Independent, num_qubits, amplitude * ComplexMatrix::Identity(n, n), tau_c, coupling);
    k.amplitude_ = amplitude;
    return k;
}

CorrelationKernel CorrelationKernel::collective(
    int num_qubits, double amplitude, Axis axis, double tau_c, double coupling) {
    Eigen::Index n = table_dim(num_qubits);
    ComplexMatrix table = ComplexMatrix::Zero(n, n);
    for (int lp = 1; lp <= num_qubits; lp++) {
        for (int l = 1; l <= num_qubits; l++) {
            table(PauliIndex{lp, axis}.flat(), PauliIndex{l, axis}.flat()) = amplitude;
        }
    }
    CorrelationKernel k(KernelKind::CollectiveAxis, num_qubits, std::move(table), tau_c, coupling);
    k.amplitude_ = amplitude;
    k.axis_ = axis;
    return k;
}

CorrelationKernel CorrelationKernel::exponential(
    int num_qubits, double amplitude, double correlation_length, double tau_c, double coupling) {
    if (!(correlation_length > 0)) {
        throw DomainError("correlation length must be positive");
    }
    Eigen::Index n = table_dim(num_qubits);
    ComplexMatrix table = ComplexMatrix::Zero(n, n);
    for (int lp = 1; lp <= num_qubits; lp++) {
        for (int l = 1; l <= num_qubits; l++) {
            double weight = amplitude * std::exp(-std::abs(lp - l) / correlation_length);
            for (Axis axis : {Axis::X, Axis::Y, Axis::Z}) {
                table(PauliIndex{lp, axis}.flat(), PauliIndex{l, axis}.flat()) = weight;
            }
        }
    }
    CorrelationKernel k(KernelKind::Exponential, num_qubits, std::move(table), tau_c, coupling);
    k.amplitude_ = amplitude;
    k.correlation_length_ = correlation_length;
    return k;
}

CorrelationKernel CorrelationKernel::cross_axis(
    int num_qubits, const ComplexMatrix &axis_block, double tau_c, double coupling) {
    if (axis_block.rows() != 3 || axis_block.cols() != 3) {
        throw DomainError("cross-axis block must be 3x3");
    }
    Eigen::Index n = table_dim(num_qubits);
    ComplexMatrix table = ComplexMatrix::Zero(n, n);
    for (int l = 0; l < num_qubits; l++) {
        table.block(3 * l, 3 * l, 3, 3) = axis_block;
    }
    CorrelationKernel k(KernelKind::CrossAxis, num_qubits, std::move(table), tau_c, coupling);
    k.axis_block_ = axis_block;
    return k;
}

CorrelationKernel CorrelationKernel::from_table(
    int num_qubits, const ComplexMatrix &table, double tau_c, double coupling) {
    return CorrelationKernel(KernelKind::Table, num_qubits, table, tau_c, coupling);
}

Complex CorrelationKernel::correlation(int row, int col, double tau) const {
    return coupling_ * coupling_ * spatial_(row, col) * std::exp(-std::abs(tau) / tau_c_);
}

CorrelationKernel CorrelationKernel::resized(int num_qubits) const {
    switch (kind_) {
        case KernelKind::Independent:
            return independent(num_qubits, amplitude_, tau_c_, coupling_);
        case KernelKind::CollectiveAxis:
            return collective(num_qubits, amplitude_, axis_, tau_c_, coupling_);
        case KernelKind::Exponential:
            return exponential(num_qubits, amplitude_, correlation_length_, tau_c_, coupling_);
        case KernelKind::CrossAxis:
            return cross_axis(num_qubits, axis_block_, tau_c_, coupling_);
        case KernelKind::Table:
            break;
    }
    if (num_qubits == num_qubits_) {
        return *this;
    }
    throw DomainError("an explicit correlation table cannot be resized");
}

NoiseSpec::NoiseSpec(int num_qubits, ComplexMatrix a, ComplexMatrix b)
    : num_qubits_(num_qubits), a_(std::move(a)), b_(std::move(b)) {
}

NoiseSpec NoiseSpec::direct(const ComplexMatrix &a, const ComplexMatrix &b, int num_qubits) {
    check_table(a, num_qubits, "decoherence matrix A");
    check_table(b, num_qubits, "Lamb-shift matrix B");
    ComplexMatrix a_sym = symmetrized(a);
    HermitianEigen eig = hermitian_eig(a_sym);
    double lowest = eig.values.front();
    if (lowest < kPsdFloor) {
        std::ostringstream msg;
        msg << "decoherence matrix A is not positive semidefinite: eigenvalue " << lowest;
        throw DomainError(msg.str());
    }
    if (lowest < 0) {
        Eigen::VectorXd clamped(static_cast<Eigen::Index>(eig.values.size()));
        for (size_t k = 0; k < eig.values.size(); k++) {
            clamped[static_cast<Eigen::Index>(k)] = std::max(eig.values[k], 0.0);
        }
        a_sym = eig.vectors * clamped.asDiagonal() * eig.vectors.adjoint();
        a_sym = symmetrized(a_sym);
    }
    return NoiseSpec(num_qubits, std::move(a_sym), symmetrized(b));
}

NoiseSpec NoiseSpec::noiseless(int num_qubits) {
    Eigen::Index n = table_dim(num_qubits);
    return direct(ComplexMatrix::Zero(n, n), ComplexMatrix::Zero(n, n), num_qubits);
}

NoiseSpec NoiseSpec::scaled(double factor) const {
    if (!(factor >= 0) || !std::isfinite(factor)) {
        throw DomainError("rate scale factor must be finite and nonnegative");
    }
    return NoiseSpec(num_qubits_, a_ * factor, b_ * factor);
}

double NoiseSpec::max_rate() const {
    return hermitian_eig(a_).values.back();
}

NoiseSpec integrate_kernel(const CorrelationKernel &kernel) {
    // int_{-inf}^{inf} exp(-|tau|/tau_c) dtau = 2 tau_c. The profile is even, so the
    // Lamb-shift integrand f(tau) - f(-tau) vanishes identically.
    double g2 = kernel.coupling() * kernel.coupling();
    ComplexMatrix a = (g2 * 2.0 * kernel.tau_c()) * kernel.spatial();
    Eigen::Index n = a.rows();
    return NoiseSpec::direct(a, ComplexMatrix::Zero(n, n), kernel.num_qubits());
}

double JumpChannelSet::max_rate() const {
    double m = 0;
    for (double r : rates) {
        m = std::max(m, r);
    }
    return m;
}

JumpChannelSet channels_from_eigensystem(const NoiseSpec &spec, std::vector<double> rates, ComplexMatrix mixing) {
    const int num_qubits = spec.num_qubits();
    const Eigen::Index n_flat = 3 * static_cast<Eigen::Index>(num_qubits);
    if (static_cast<Eigen::Index>(rates.size()) != n_flat || mixing.rows() != n_flat || mixing.cols() != n_flat) {
        throw DomainError("eigensystem size does not match the noise spec");
    }
    JumpChannelSet out;
    out.num_qubits = num_qubits;
    auto dim = static_cast<Eigen::Index>(hilbert_dim(num_qubits));

    double max_rate = 0;
    for (double &r : rates) {
        r = std::max(r, 0.0);
        max_rate = std::max(max_rate, r);
    }
    std::vector<ComplexMatrix> paulis = all_paulis(num_qubits);

    out.damping = ComplexMatrix::Zero(dim, dim);
    for (Eigen::Index ch = 0; ch < n_flat; ch++) {
        ComplexMatrix s = ComplexMatrix::Zero(dim, dim);
        for (Eigen::Index j = 0; j < n_flat; j++) {
            Complex u = mixing(ch, j);
            if (u != Complex(0)) {
                s += u * paulis[static_cast<size_t>(j)];
            }
        }
        // Cancellations between Pauli terms (X + iY, say) leave ~1e-17 residues that would
        // let a lowering channel fire on its ground state.
        double scale = max_abs(s);
        s = s.unaryExpr([&](Complex z) {
            return Complex(std::abs(z.real()) < kEntryRoundoff * scale ? 0.0 : z.real(),
                           std::abs(z.imag()) < kEntryRoundoff * scale ? 0.0 : z.imag());
        });
        double rate = rates[static_cast<size_t>(ch)];
        bool inert = !(rate >= kInertRelative * max_rate) || max_rate == 0.0;
        if (!inert) {
            out.damping += rate * (s.adjoint() * s);
        }
        out.jump_ops.push_back(std::move(s));
        out.inert.push_back(inert);
    }

    out.lamb_shift = ComplexMatrix::Zero(dim, dim);
    const ComplexMatrix &b = spec.b();
    for (Eigen::Index jp = 0; jp < n_flat; jp++) {
        for (Eigen::Index j = 0; j < n_flat; j++) {
            if (b(jp, j) != Complex(0)) {
                out.lamb_shift += (0.5 * b(jp, j)) * (paulis[static_cast<size_t>(jp)] * paulis[static_cast<size_t>(j)]);
            }
        }
    }
    out.lamb_shift = symmetrized(out.lamb_shift);
    out.damping = symmetrized(out.damping);
    out.h_eff = out.lamb_shift - Complex(0, 0.5) * out.damping;
    out.rates = std::move(rates);
    out.mixing = std::move(mixing);
    return out;
}

JumpChannelSet build_channels(const NoiseSpec &spec) {
    HermitianEigen eig = hermitian_eig(spec.a());
    // A = V diag(xi) V^dag = U^dag diag(xi) U with U = V^dag.
    return channels_from_eigensystem(spec, eig.values, eig.vectors.adjoint());
}

ComplexMatrix apply_dissipator(const JumpChannelSet &channels, const ComplexMatrix &rho) {
    ComplexMatrix out = -0.5 * (channels.damping * rho + rho * channels.damping);
    for (size_t n = 0; n < channels.num_channels(); n++) {
        if (channels.inert[n]) {
            continue;
        }
        const ComplexMatrix &s = channels.jump_ops[n];
        out.noalias() += channels.rates[n] * (s * rho * s.adjoint());
    }
    return out;
}

}  // namespace corrqec
