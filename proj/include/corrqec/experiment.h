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

#ifndef CORRQEC_EXPERIMENT_H
#define CORRQEC_EXPERIMENT_H

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "corrqec/lindblad.h"
#include "corrqec/noise_model.h"
#include "corrqec/qecc.h"
#include "corrqec/trajectory.h"

namespace corrqec {

/// Malformed or inconsistent configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Engine { Density, Trajectory };

std::string engine_name(Engine engine);
Engine parse_engine(const std::string &name);

struct NoiseConfig {
    /// independent | collective | exponential | cross_axis | table | direct
    std::string kind = "exponential";
    /// 0 means "match the code".
    int num_qubits = 0;
    double amplitude = 1.0;
    double correlation_length = 2.0;
    Axis axis = Axis::Z;
    double tau_c = 0.01;
    double coupling = 1.0;
    ComplexMatrix axis_block;  // cross_axis
    ComplexMatrix table;       // table
    ComplexMatrix a;           // direct
    ComplexMatrix b;           // direct, optional
    /// Rescale time so the largest jump rate is 1.
    bool normalize_rates = true;
};

struct ExperimentConfig {
    NoiseConfig noise;
    std::string code = "five_qubit";
    Complex alpha = 0.6;
    Complex beta = Complex(0, 0.8);
    double t0 = 0.5;
    std::vector<int> n_values{5, 10, 20, 40, 80};
    std::vector<double> delta_t_values{0.002, 0.003, 0.004, 0.006, 0.008, 0.011, 0.015, 0.02};
    size_t trajectories = 10000;
    uint64_t base_seed = 20260101;
    Engine engine = Engine::Density;
    /// <= 0 selects the default RK4 step.
    double dt_integrator = 0;
    /// Trajectory steps per correction interval.
    int trajectory_substeps = 10;
    NoJumpMode no_jump_mode = NoJumpMode::FirstOrder;
    bool correction = true;
};

ExperimentConfig default_config();
ExperimentConfig parse_config(const std::string &json_text);
ExperimentConfig load_config(const std::string &path);
std::string config_to_json(const ExperimentConfig &cfg);

/// Number of qubits the noise acts on once the code is taken into account.
int noise_num_qubits(const ExperimentConfig &cfg);
NoiseSpec build_noise_spec(const NoiseConfig &noise, int num_qubits);
/// Noise spec for the experiment, normalized when requested.
NoiseSpec build_noise_spec(const ExperimentConfig &cfg);

struct FitResult {
    bool valid = false;
    double slope = 0;
    double intercept = 0;
    double slope_stderr = 0;
    size_t points = 0;
    std::string note;
};

/// Ordinary least squares of log(y) on log(x) over the points with y > 0.
/// At least five usable points are required for a valid fit.
FitResult fit_log_log(const std::vector<double> &x, const std::vector<double> &y);

struct CycleRow {
    double delta_t;
    double fidelity;
    double infidelity;
    double std_error;
};

struct ScalingRow {
    int n;
    double delta_t;
    double final_fidelity;
    double final_infidelity;
    double std_error;
};

struct FidelityResult {
    Engine engine = Engine::Density;
    size_t trajectories = 0;
    uint64_t seed = 0;
    bool correction = true;
    std::vector<CycleRow> cycle_rows;
    std::vector<ScalingRow> scaling_rows;
    FitResult fit;
    double wall_seconds = 0;
};

/// Per-cycle fidelity over delta_t_values, fitted against delta_t.
FidelityResult run_cycle_fidelity(const ExperimentConfig &cfg);
/// Final fidelity after N correction cycles over T0, fitted against N.
FidelityResult run_repetition_scaling(const ExperimentConfig &cfg);

void write_cycle_csv(std::ostream &out, const FidelityResult &result);
void write_scaling_csv(std::ostream &out, const FidelityResult &result);
void write_snapshot_csv(std::ostream &out, const std::vector<Snapshot> &snapshots);

struct TrajectoryRecord {
    size_t index;
    TrajectoryState state;
};

/// Unravels the configured noise on the encoded state over T0 (no correction),
/// with step delta_t_values[0] / trajectory_substeps.
std::vector<TrajectoryRecord> run_trajectories(const ExperimentConfig &cfg);
void write_jump_log_csv(std::ostream &out, const std::vector<TrajectoryRecord> &records);

struct ValidationCheck {
    std::string name;
    bool passed;
    double measured;
    double threshold;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    bool all_passed() const;
};

ValidationReport run_validation_suite(const ExperimentConfig &cfg);
void write_validation_csv(std::ostream &out, const ValidationReport &report);

/// Round-trip (%.17g) number formatting shared by the CSV writers.
std::string format_double(double value);

}  // namespace corrqec

#endif
