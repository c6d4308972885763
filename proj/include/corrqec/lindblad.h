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

#ifndef CORRQEC_LINDBLAD_H
#define CORRQEC_LINDBLAD_H

#include <vector>

#include "corrqec/noise_model.h"
#include "corrqec/operator_algebra.h"

namespace corrqec {

struct FirstOrderChannel;

/// Raised when the integrated trace drifts beyond what renormalization may hide.
struct IntegrationError : NumericalError {
    using NumericalError::NumericalError;
};

struct EvolutionConfig {
    /// RK4 step; <= 0 selects default_integrator_step().
    double dt_integrator = 0;
    double t_final = 0;
    /// Record a snapshot every this many RK4 steps (0 disables recording). The
    /// initial and final states are always recorded when enabled.
    int record_every = 0;
};

struct Snapshot {
    double time;
    double fidelity_to_initial;  // tr(rho_0 rho(t))
    double trace;
    double purity;
};

struct EvolutionResult {
    DensityMatrix state;
    std::vector<Snapshot> snapshots;
    int steps = 0;
    bool renormalized = false;
};

/// Largest step with max(xi) * dt <= 1e-3, also bounding the Lamb-shift frequency.
double default_integrator_step(const JumpChannelSet &channels);

/// d rho / dt = -i H_eff rho + i rho H_eff^dag + sum_n xi_n s_n rho s_n^dag.
ComplexMatrix lindblad_rhs(const ComplexMatrix &rho, const JumpChannelSet &channels);
ComplexMatrix lindblad_rhs(const DensityMatrix &rho, const JumpChannelSet &channels);

/// Classical RK4 on the density matrix. The step is shrunk so that an integer number
/// of steps lands exactly on t_final. Trace drift above 1e-9 is renormalized with a
/// warning on stderr; above 1e-7 it throws IntegrationError.
EvolutionResult evolve_exact(const DensityMatrix &rho0, const JumpChannelSet &channels, const EvolutionConfig &cfg);

/// Convenience wrapper returning only the final state.
DensityMatrix evolve_for(const DensityMatrix &rho0, const JumpChannelSet &channels, double t, double dt_integrator = 0);

/// sum_n p_n Q_n rho Q_n^dag, renormalized to unit trace.
DensityMatrix apply_first_order_channel(const DensityMatrix &rho0, const FirstOrderChannel &channel);

}  // namespace corrqec

#endif
