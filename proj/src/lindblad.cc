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

#include "corrqec/lindblad.h"

#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>

#include "corrqec/trajectory.h"

namespace corrqec {

namespace {

constexpr double kDriftSilent = 1e-9;
constexpr double kDriftFatal = 1e-7;
constexpr double kEigenFloor = -1e-8;

void check_dims(const ComplexMatrix &rho, const JumpChannelSet &channels) {
    auto dim = static_cast<Eigen::Index>(channels.dim());
    if (rho.rows() != dim || rho.cols() != dim) {
        std::ostringstream msg;
        msg << "density matrix is " << rho.rows() << "x" << rho.cols() << " but the channels act on dimension "
            << dim;
        throw DomainError(msg.str());
    }
}

}  // namespace

double default_integrator_step(const JumpChannelSet &channels) {
    double scale = channels.max_rate();
    if (channels.lamb_shift.size() > 0 && max_abs(channels.lamb_shift) > 0) {
        HermitianEigen eig = hermitian_eig(channels.lamb_shift);
        scale = std::max({scale, std::abs(eig.values.front()), std::abs(eig.values.back())});
    }
    if (scale == 0) {
        return std::numeric_limits<double>::infinity();
    }
    return 1e-3 / scale;
}

ComplexMatrix lindblad_rhs(const ComplexMatrix &rho, const JumpChannelSet &channels) {
    check_dims(rho, channels);
    const Complex minus_i(0, -1);
    ComplexMatrix out = minus_i * (channels.h_eff * rho);
    out.noalias() += Complex(0, 1) * (rho * channels.h_eff.adjoint());
    ComplexMatrix tmp(rho.rows(), rho.cols());
    for (size_t n = 0; n < channels.num_channels(); n++) {
        if (channels.inert[n]) {
            continue;
        }
        const ComplexMatrix &s = channels.jump_ops[n];
        tmp.noalias() = s * rho;
        out.noalias() += channels.rates[n] * (tmp * s.adjoint());
    }
    return out;
}

ComplexMatrix lindblad_rhs(const DensityMatrix &rho, const JumpChannelSet &channels) {
    return lindblad_rhs(rho.matrix(), channels);
}

EvolutionResult evolve_exact(const DensityMatrix &rho0, const JumpChannelSet &channels, const EvolutionConfig &cfg) {
    check_dims(rho0.matrix(), channels);
    if (!(cfg.t_final >= 0) || !std::isfinite(cfg.t_final)) {
        throw DomainError("evolution time must be finite and nonnegative");
    }
    double dt_max = cfg.dt_integrator > 0 ? cfg.dt_integrator : default_integrator_step(channels);
    int steps = 0;
    if (cfg.t_final > 0) {
        double ratio = cfg.t_final / dt_max;
        steps = std::isfinite(ratio) ? std::max(1, static_cast<int>(std::ceil(ratio - 1e-9))) : 1;
    }
    double h = steps > 0 ? cfg.t_final / steps : 0.0;

    const double trace0 = rho0.trace();
    ComplexMatrix rho = rho0.matrix();
    EvolutionResult result{rho0, {}, steps, false};
    auto record = [&](double t) {
        Snapshot snap;
        snap.time = t;
        snap.fidelity_to_initial = (rho0.matrix().cwiseProduct(rho.transpose())).sum().real();
        snap.trace = rho.trace().real();
        snap.purity = (rho.cwiseProduct(rho.transpose())).sum().real();
        result.snapshots.push_back(snap);
    };
    if (cfg.record_every > 0) {
        record(0.0);
    }

    for (int k = 0; k < steps; k++) {
        ComplexMatrix k1 = lindblad_rhs(rho, channels);
        ComplexMatrix k2 = lindblad_rhs(rho + (0.5 * h) * k1, channels);
        ComplexMatrix k3 = lindblad_rhs(rho + (0.5 * h) * k2, channels);
        ComplexMatrix k4 = lindblad_rhs(rho + h * k3, channels);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        double drift = std::abs(rho.trace().real() - trace0);
        if (drift > kDriftFatal) {
            std::ostringstream msg;
            msg << "trace drifted by " << drift << " after " << (k + 1)
                << " RK4 steps; reduce dt_integrator (currently " << h << ")";
            throw IntegrationError(msg.str());
        }
        if (cfg.record_every > 0 && ((k + 1) % cfg.record_every == 0 || k + 1 == steps)) {
            record((k + 1) * h);
        }
    }

    double drift = std::abs(rho.trace().real() - 1.0);
    if (drift > kDriftSilent) {
        std::cerr << "corrqec: renormalizing density matrix after trace drift " << drift << "\n";
        rho /= rho.trace().real();
        result.renormalized = true;
    }
    rho = 0.5 * (rho + rho.adjoint()).eval();
    result.state = DensityMatrix(rho0.num_qubits(), std::move(rho));
    if (steps > 0) {
        double lowest = result.state.min_eigenvalue();
        if (lowest < kEigenFloor) {
            std::ostringstream msg;
            msg << "evolved density matrix has eigenvalue " << lowest << "; reduce dt_integrator";
            throw IntegrationError(msg.str());
        }
    }
    return result;
}

DensityMatrix evolve_for(const DensityMatrix &rho0, const JumpChannelSet &channels, double t, double dt_integrator) {
    EvolutionConfig cfg;
    cfg.t_final = t;
    cfg.dt_integrator = dt_integrator;
    return evolve_exact(rho0, channels, cfg).state;
}

DensityMatrix apply_first_order_channel(const DensityMatrix &rho0, const FirstOrderChannel &channel) {
    const ComplexMatrix &rho = rho0.matrix();
    ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
    for (size_t n = 0; n < channel.size(); n++) {
        double p = channel.probabilities[n];
        if (p == 0) {
            continue;
        }
        const ComplexMatrix &q = channel.ops[n];
        if (q.rows() != rho.rows()) {
            throw DomainError("first-order channel dimension does not match the density matrix");
        }
        out.noalias() += p * (q * rho * q.adjoint());
    }
    out /= out.trace().real();
    out = 0.5 * (out + out.adjoint()).eval();
    return DensityMatrix(rho0.num_qubits(), std::move(out));
}

}  // namespace corrqec
