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

#ifndef CORRQEC_TRAJECTORY_H
#define CORRQEC_TRAJECTORY_H

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "corrqec/noise_model.h"
#include "corrqec/operator_algebra.h"

namespace corrqec {

/// Raised when a step is too long for the first-order jump expansion
/// (total jump probability above 0.1).
struct StepSizeError : NumericalError {
    using NumericalError::NumericalError;
};

constexpr double kFirstOrderGate = 0.1;

/// Deterministic random stream keyed by (base_seed, stream_index).
///
/// Streams with different keys are seeded independently from a splitmix64 expansion of the key, so
/// results never depend on which thread ran which trajectory.
class RngStream {
  public:
    RngStream(uint64_t base_seed, uint64_t stream_index);

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform();

    uint64_t base_seed() const {
        return base_seed_;
    }
    uint64_t stream_index() const {
        return stream_index_;
    }

  private:
    uint64_t base_seed_;
    uint64_t stream_index_;
    std::mt19937_64 engine_;
};

/// Mixes a sweep-point index into a base seed so sweep points draw disjoint streams.
uint64_t derive_seed(uint64_t base_seed, uint64_t salt);

enum class NoJumpMode { FirstOrder, Exact };

struct JumpEvent {
    double time;
    int channel;

    bool operator==(const JumpEvent &) const = default;
};

struct TrajectoryState {
    StateVector psi;
    double t = 0;
    std::vector<JumpEvent> jump_log;
};

/// p_n = xi_n dt <psi| s_n^dag s_n |psi>. Inert channels give exactly 0.
/// Throws StepSizeError when the sum exceeds 0.1.
std::vector<double> jump_probabilities(const StateVector &psi, const JumpChannelSet &channels, double dt);

/// s_n psi / |s_n psi|. Throws std::logic_error if s_n annihilates psi.
StateVector apply_jump(const StateVector &psi, const JumpChannelSet &channels, int channel);

struct NoJumpResult {
    StateVector psi;
    double p0;  // squared norm before renormalization
};

/// No-jump propagation over dt, either with the first-order operator
/// 1 - i dt H_eff or with exp(-i dt H_eff). First-order mode enforces the step gate.
NoJumpResult no_jump_step(const StateVector &psi, const JumpChannelSet &channels, double dt, NoJumpMode mode);

/// Precomputed per-(channels, dt, mode) data for fast repeated stepping.
class TrajectoryStepper {
  public:
    TrajectoryStepper(const JumpChannelSet &channels, double dt, NoJumpMode mode = NoJumpMode::FirstOrder);

    /// One Bernoulli step: jump with probability sum p_n (channel chosen by the
    /// cumulative distribution), otherwise no-jump evolution. Appends to the log.
    void step(TrajectoryState &state, RngStream &rng) const;

    /// Runs until state.t reaches t_end (which must be a whole number of steps away).
    void run(TrajectoryState &state, double t_end, RngStream &rng) const;
    /// Takes exactly `steps` steps.
    void advance(TrajectoryState &state, int steps, RngStream &rng) const;
    /// Same as calling advance on each (states[j], rngs[j]); the states must share a clock.
    void advance_group(TrajectoryState *states, RngStream *rngs, size_t count, int steps) const;

    double dt() const {
        return dt_;
    }
    const JumpChannelSet &channels() const {
        return *channels_;
    }

  private:
    const JumpChannelSet *channels_;
    double dt_;
    NoJumpMode mode_;
    ComplexMatrix no_jump_;
    std::vector<size_t> active_;
};

/// Number of steps of size dt in T, requiring T to be an integer multiple of dt.
int whole_steps(double total, double dt);

TrajectoryState sample_trajectory(
    const StateVector &psi0,
    const JumpChannelSet &channels,
    double total_time,
    double dt,
    RngStream &rng,
    NoJumpMode mode = NoJumpMode::FirstOrder);

/// (1/M) sum |psi><psi|. Throws DomainError on an empty list.
DensityMatrix ensemble_density(const std::vector<StateVector> &states);

/// Running sum of pure-state projectors; merging is associative and the final
/// estimate depends only on the order of add/merge calls.
class DensityAccumulator {
  public:
    explicit DensityAccumulator(int num_qubits);
    void add(const StateVector &psi);
    void merge(const DensityAccumulator &other);
    size_t count() const {
        return count_;
    }
    DensityMatrix mean() const;

  private:
    int num_qubits_;
    ComplexMatrix sum_;
    size_t count_ = 0;
};

/// Runs `task(index)` for index in [0, count) over a thread pool. Tasks are handed out
/// in contiguous chunks; callers must reduce results by index to stay deterministic.
void parallel_for(size_t count, const std::function<void(size_t)> &task, unsigned max_threads = 0);

/// Monte Carlo estimate of rho(T) from M trajectories keyed (base_seed, 0..M-1).
DensityMatrix simulate_ensemble(
    const StateVector &psi0,
    const JumpChannelSet &channels,
    double total_time,
    double dt,
    size_t num_trajectories,
    uint64_t base_seed,
    NoJumpMode mode = NoJumpMode::FirstOrder);

/// The complete first-order error-operator set over one interval dt, built against
/// a reference state. Index 0 is the no-jump error, 1..3L follow channel order.
struct FirstOrderChannel {
    double dt = 0;
    std::vector<ComplexMatrix> ops;
    std::vector<double> probabilities;

    size_t size() const {
        return ops.size();
    }
    double total_probability() const;
    /// max |sum_n p_n Q_n^dag Q_n - I|, which is O(dt^2) when every p_n > 0.
    double completeness_residual() const;
};

FirstOrderChannel build_first_order_channel(const StateVector &psi_ref, const JumpChannelSet &channels, double dt);

}  // namespace corrqec

#endif
