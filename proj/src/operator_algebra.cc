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

#include "corrqec/operator_algebra.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace corrqec {

namespace {

constexpr double kHermitianTol = 1e-10;
constexpr double kTraceTol = 1e-9;
constexpr int kMaxJacobiSweeps = 100;

}  // namespace

char axis_char(Axis axis) {
    switch (axis) {
        case Axis::X:
            return 'X';
        case Axis::Y:
            return 'Y';
        case Axis::Z:
            return 'Z';
    }
    return '?';
}

PauliIndex PauliIndex::from_flat(int flat_index) {
    if (flat_index < 0) {
        throw DomainError("negative flat Pauli index");
    }
    return PauliIndex{flat_index / 3 + 1, static_cast<Axis>(flat_index % 3 + 1)};
}

void check_num_qubits(int num_qubits) {
    if (num_qubits < 1) {
        throw DomainError("qubit count must be positive, got " + std::to_string(num_qubits));
    }
    if (num_qubits > kMaxQubits) {
        throw ResourceError(
            "qubit count " + std::to_string(num_qubits) + " exceeds the dense cap of " +
            std::to_string(kMaxQubits));
    }
}

size_t hilbert_dim(int num_qubits) {
    check_num_qubits(num_qubits);
    return size_t{1} << num_qubits;
}

ComplexMatrix pauli_op(PauliIndex idx, int num_qubits) {
    size_t dim = hilbert_dim(num_qubits);
    if (idx.qubit < 1 || idx.qubit > num_qubits) {
        throw DomainError(
            "qubit index " + std::to_string(idx.qubit) + " out of range for " + std::to_string(num_qubits) +
            " qubits");
    }
    size_t mask = size_t{1} << (num_qubits - idx.qubit);
    auto n = static_cast<Eigen::Index>(dim);
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    const Complex i_unit(0, 1);
    for (size_t col = 0; col < dim; col++) {
        bool bit = (col & mask) != 0;
        auto c = static_cast<Eigen::Index>(col);
        auto flipped = static_cast<Eigen::Index>(col ^ mask);
        switch (idx.axis) {
            case Axis::X:
                out(flipped, c) = 1.0;
                break;
            case Axis::Y:
                // Y|0> = i|1>, Y|1> = -i|0>.
                out(flipped, c) = bit ? -i_unit : i_unit;
                break;
            case Axis::Z:
                out(c, c) = bit ? -1.0 : 1.0;
                break;
        }
    }
    return out;
}

ComplexMatrix pauli_string_op(std::string_view paulis) {
    int num_qubits = static_cast<int>(paulis.size());
    size_t dim = hilbert_dim(num_qubits);
    auto n = static_cast<Eigen::Index>(dim);
    ComplexMatrix out = ComplexMatrix::Identity(n, n);
    for (int q = 0; q < num_qubits; q++) {
        char c = paulis[static_cast<size_t>(q)];
        switch (c) {
            case 'I':
            case '_':
                break;
            case 'X':
                out = pauli_op({q + 1, Axis::X}, num_qubits) * out;
                break;
            case 'Y':
                out = pauli_op({q + 1, Axis::Y}, num_qubits) * out;
                break;
            case 'Z':
                out = pauli_op({q + 1, Axis::Z}, num_qubits) * out;
                break;
            default:
                throw DomainError(std::string("unrecognized Pauli character '") + c + "'");
        }
    }
    return out;
}

ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b) {
    const double cap = static_cast<double>(size_t{1} << kMaxQubits);
    double rows = static_cast<double>(a.rows()) * static_cast<double>(b.rows());
    double cols = static_cast<double>(a.cols()) * static_cast<double>(b.cols());
    if (rows > cap || cols > cap) {
        throw ResourceError("Kronecker product exceeds the dense dimension cap");
    }
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); i++) {
        for (Eigen::Index j = 0; j < a.cols(); j++) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

double max_abs(const ComplexMatrix &m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double hermiticity_error(const ComplexMatrix &m) {
    if (m.rows() != m.cols()) {
        return std::numeric_limits<double>::infinity();
    }
    return max_abs(m - m.adjoint());
}

bool all_finite(const ComplexMatrix &m) {
    return m.allFinite();
}

HermitianEigen hermitian_eig(const ComplexMatrix &m) {
    if (m.rows() != m.cols()) {
        throw DomainError("hermitian_eig requires a square matrix");
    }
    if (!all_finite(m)) {
        throw DomainError("hermitian_eig input has non-finite entries");
    }
    double herm_err = hermiticity_error(m);
    if (herm_err > kHermitianTol) {
        std::ostringstream msg;
        msg << "hermitian_eig input is not Hermitian (max |m - m^dag| = " << herm_err << ")";
        throw DomainError(msg.str());
    }

    const Eigen::Index n = m.rows();
    ComplexMatrix a = 0.5 * (m + m.adjoint());
    ComplexMatrix v = ComplexMatrix::Identity(n, n);
    for (Eigen::Index k = 0; k < n; k++) {
        a(k, k) = a(k, k).real();
    }

    auto off_norm = [&]() {
        double s = 0;
        for (Eigen::Index i = 0; i < n; i++) {
            for (Eigen::Index j = 0; j < n; j++) {
                if (i != j) {
                    s += std::norm(a(i, j));
                }
            }
        }
        return std::sqrt(s);
    };

    const double scale = a.norm();
    const double tight_tol = 1e-14 * scale;
    const double loose_tol = 1e-12 * std::max(scale, 1.0);
    bool converged = scale == 0.0;
    for (int sweep = 0; sweep < kMaxJacobiSweeps && !converged; sweep++) {
        if (off_norm() <= tight_tol) {
            converged = true;
            break;
        }
        for (Eigen::Index p = 0; p < n - 1; p++) {
            for (Eigen::Index q = p + 1; q < n; q++) {
                Complex apq = a(p, q);
                double r = std::abs(apq);
                if (r == 0.0) {
                    continue;
                }
                Complex phase = apq / r;  // e^{i phi}
                double app = a(p, p).real();
                double aqq = a(q, q).real();
                double theta = 0.5 * std::atan2(2.0 * r, aqq - app);
                double c = std::cos(theta);
                double s = std::sin(theta);
                // J = diag(1, e^{-i phi}) * [[c, s], [-s, c]] on the (p, q) plane.
                Complex jpp = c;
                Complex jpq = s;
                Complex jqp = -s * std::conj(phase);
                Complex jqq = c * std::conj(phase);
                for (Eigen::Index k = 0; k < n; k++) {
                    Complex akp = a(k, p);
                    Complex akq = a(k, q);
                    a(k, p) = akp * jpp + akq * jqp;
                    a(k, q) = akp * jpq + akq * jqq;
                    Complex vkp = v(k, p);
                    Complex vkq = v(k, q);
                    v(k, p) = vkp * jpp + vkq * jqp;
                    v(k, q) = vkp * jpq + vkq * jqq;
                }
                for (Eigen::Index k = 0; k < n; k++) {
                    Complex apk = a(p, k);
                    Complex aqk = a(q, k);
                    a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
                    a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
            }
        }
    }
    if (!converged && off_norm() > loose_tol) {
        throw NumericalError("Jacobi eigensolver did not converge within 100 sweeps");
    }

    std::vector<Eigen::Index> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
        return a(x, x).real() < a(y, y).real();
    });
    HermitianEigen out;
    out.values.reserve(static_cast<size_t>(n));
    out.vectors.resize(n, n);
    for (Eigen::Index j = 0; j < n; j++) {
        Eigen::Index src = order[static_cast<size_t>(j)];
        out.values.push_back(a(src, src).real());
        out.vectors.col(j) = v.col(src);
    }
    return out;
}

ComplexMatrix matrix_exp(const ComplexMatrix &m, Complex scale) {
    if (m.rows() != m.cols()) {
        throw DomainError("matrix_exp requires a square matrix");
    }
    if (m.rows() > static_cast<Eigen::Index>(size_t{1} << kMaxQubits)) {
        throw ResourceError("matrix_exp argument exceeds the dense dimension cap");
    }
    const Eigen::Index n = m.rows();
    ComplexMatrix arg = scale * m;
    double norm1 = n == 0 ? 0.0 : arg.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    if (norm1 > 0.5) {
        squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
    }
    arg /= std::ldexp(1.0, squarings);

    ComplexMatrix result = ComplexMatrix::Identity(n, n);
    ComplexMatrix term = ComplexMatrix::Identity(n, n);
    for (int k = 1; k <= 40; k++) {
        term = (term * arg) / static_cast<double>(k);
        result += term;
        if (max_abs(term) <= 1e-18 * max_abs(result)) {
            break;
        }
    }
    for (int k = 0; k < squarings; k++) {
        result = result * result;
    }
    return result;
}

StateVector::StateVector(int num_qubits, ComplexVector amplitudes)
    : num_qubits_(num_qubits), amplitudes_(std::move(amplitudes)) {
    size_t dim = hilbert_dim(num_qubits);
    if (static_cast<size_t>(amplitudes_.size()) != dim) {
        throw DomainError(
            "state has " + std::to_string(amplitudes_.size()) + " amplitudes, expected " + std::to_string(dim));
    }
    if (!amplitudes_.allFinite()) {
        throw DomainError("state has non-finite amplitudes");
    }
    double norm = amplitudes_.norm();
    if (!(norm > 1e-300)) {
        throw DomainError("state vector has zero norm");
    }
    amplitudes_ /= norm;
}

StateVector StateVector::basis(int num_qubits, size_t index) {
    size_t dim = hilbert_dim(num_qubits);
    if (index >= dim) {
        throw DomainError("basis index out of range");
    }
    ComplexVector amps = ComplexVector::Zero(static_cast<Eigen::Index>(dim));
    amps[static_cast<Eigen::Index>(index)] = 1.0;
    return StateVector(num_qubits, std::move(amps));
}

StateVector StateVector::from_bits(std::string_view bits) {
    size_t index = 0;
    for (char c : bits) {
        if (c != '0' && c != '1') {
            throw DomainError("basis bit string may contain only '0' and '1'");
        }
        index = (index << 1) | static_cast<size_t>(c == '1');
    }
    return basis(static_cast<int>(bits.size()), index);
}

Complex StateVector::inner(const StateVector &other) const {
    if (other.dim() != dim()) {
        throw DomainError("inner product of states with different dimensions");
    }
    return amplitudes_.dot(other.amplitudes_);
}

double StateVector::fidelity(const StateVector &other) const {
    return std::norm(inner(other));
}

ComplexMatrix StateVector::projector() const {
    return amplitudes_ * amplitudes_.adjoint();
}

DensityMatrix::DensityMatrix(int num_qubits, ComplexMatrix matrix)
    : num_qubits_(num_qubits), matrix_(std::move(matrix)) {
    auto dim = static_cast<Eigen::Index>(hilbert_dim(num_qubits));
    if (matrix_.rows() != dim || matrix_.cols() != dim) {
        throw DomainError("density matrix dimension does not match the qubit count");
    }
    if (!all_finite(matrix_)) {
        throw DomainError("density matrix has non-finite entries");
    }
    double herm_err = hermiticity_error(matrix_);
    if (herm_err > kHermitianTol) {
        std::ostringstream msg;
        msg << "density matrix is not Hermitian (max |rho - rho^dag| = " << herm_err << ")";
        throw DomainError(msg.str());
    }
    matrix_ = 0.5 * (matrix_ + matrix_.adjoint()).eval();
    double tr = matrix_.trace().real();
    if (std::abs(tr - 1.0) > kTraceTol) {
        std::ostringstream msg;
        msg << "density matrix trace " << tr << " differs from 1";
        throw DomainError(msg.str());
    }
}

DensityMatrix::DensityMatrix(const StateVector &pure) : DensityMatrix(pure.num_qubits(), pure.projector()) {
}

DensityMatrix DensityMatrix::maximally_mixed(int num_qubits) {
    auto dim = static_cast<Eigen::Index>(hilbert_dim(num_qubits));
    return DensityMatrix(num_qubits, ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

double DensityMatrix::trace() const {
    return matrix_.trace().real();
}

double DensityMatrix::purity() const {
    // tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
    return matrix_.squaredNorm();
}

double DensityMatrix::min_eigenvalue() const {
    return hermitian_eig(matrix_).values.front();
}

double DensityMatrix::fidelity(const StateVector &psi) const {
    if (psi.dim() != dim()) {
        throw DomainError("fidelity reference has the wrong dimension");
    }
    return psi.amplitudes().dot(matrix_ * psi.amplitudes()).real();
}

double DensityMatrix::overlap(const DensityMatrix &other) const {
    if (other.dim() != dim()) {
        throw DomainError("overlap of density matrices with different dimensions");
    }
    return (matrix_.cwiseProduct(other.matrix_.transpose())).sum().real();
}

double trace_distance(const ComplexMatrix &a, const ComplexMatrix &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DomainError("trace distance of matrices with different shapes");
    }
    ComplexMatrix diff = a - b;
    diff = 0.5 * (diff + diff.adjoint()).eval();
    double total = 0;
    for (double lambda : hermitian_eig(diff).values) {
        total += std::abs(lambda);
    }
    return 0.5 * total;
}

double trace_distance(const DensityMatrix &a, const DensityMatrix &b) {
    return trace_distance(a.matrix(), b.matrix());
}

}  // namespace corrqec
