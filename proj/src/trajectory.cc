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

#include "corrqec/trajectory.h"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace corrqec {

namespace {

constexpr size_t kEnsembleChunk = 64;

uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Seed sequence for mt19937_64 that expands a (base_seed, stream_index) key with
// splitmix64. It fills the engine state at a fraction of std::seed_seq's cost, which
// matters when every trajectory constructs its own stream.
struct KeyedSeedSequence {
    using result_type = uint32_t;
    uint64_t key;

    template <typename It>
    void generate(It begin, It end) const {
        uint64_t counter = key;
        for (It it = begin; it != end; ++it) {
            counter += 0x9E3779B97F4A7C15ULL;
            *it = static_cast<uint32_t>(splitmix64(counter) >> 32);
        }
    }
};

std::mt19937_64 seeded_engine(uint64_t base_seed, uint64_t stream_index) {
    KeyedSeedSequence seq{splitmix64(splitmix64(base_seed) ^ (stream_index * 0xD1B54A32D192ED03ULL))};
    return std::mt19937_64(seq);
}

void check_dt(double dt) {
    if (!(dt >= 0) || !std::isfinite(dt)) {
        throw DomainError("time step must be finite and nonnegative");
    }
}

void check_state(const StateVector &psi, const JumpChannelSet &channels) {
    if (psi.dim() != channels.dim()) {
        throw DomainError("state dimension does not match the jump channels");
    }
}

[[noreturn]] void throw_gate(double total, double dt) {
    std::ostringstream msg;
    msg << "total jump probability " << total << " at dt = " << dt << " exceeds the first-order gate "
        << kFirstOrderGate << "; use a smaller step";
    throw StepSizeError(msg.str());
}

ComplexMatrix first_order_no_jump(const JumpChannelSet &channels, double dt) {
    auto dim = static_cast<Eigen::Index>(channels.dim());
    return ComplexMatrix::Identity(dim, dim) - Complex(0, dt) * channels.h_eff;
}

ComplexMatrix no_jump_operator(const JumpChannelSet &channels, double dt, NoJumpMode mode) {
    if (mode == NoJumpMode::Exact) {
        return matrix_exp(channels.h_eff, Complex(0, -dt));
    }
    return first_order_no_jump(channels, dt);
}

// One step on normalized amplitudes; work is scratch of the same size. Templated so
// small systems run on fixed-size Eigen types. With H_eff = H_ls - (i/2) D one product
// h = H_eff psi yields both <D> = -2 Im <psi|h> and the first-order update psi - i dt h.
template <typename Mat, typename Vec>
void step_in_place(
    const JumpChannelSet &ch,
    const std::vector<size_t> &active,
    const Mat &h_eff,
    const Mat *exact_propagator,
    double dt,
    Vec &amps,
    Vec &work,
    double t_next,
    std::vector<JumpEvent> &log,
    RngStream &rng) {
    if constexpr (Mat::RowsAtCompileTime == Eigen::Dynamic) {
        work.noalias() = h_eff * amps;
    } else {
        work.noalias() = h_eff.lazyProduct(amps);
    }
    double total = -2 * dt * amps.dot(work).imag();
    if (total > kFirstOrderGate) {
        throw_gate(total, dt);
    }
    double u = rng.uniform();
    if (u < total) {
        // Cumulative selection; a draw exactly on a boundary goes to the lower index.
        double cumulative = 0;
        size_t chosen = ch.num_channels();
        for (size_t n : active) {
            work.noalias() = ch.jump_ops[n] * amps;
            double p = ch.rates[n] * dt * work.squaredNorm();
            if (p <= 0) {
                continue;
            }
            cumulative += p;
            chosen = n;
            if (u <= cumulative) {
                break;
            }
        }
        if (chosen == ch.num_channels()) {
            throw std::logic_error("jump selected but every channel has zero probability");
        }
        log.push_back(JumpEvent{t_next, static_cast<int>(chosen)});
    } else if (exact_propagator) {
        work.noalias() = *exact_propagator * amps;
    } else {
        work = amps + Complex(0, -dt) * work;
    }
    double norm = work.norm();
    if (!(norm > 1e-300) || !std::isfinite(norm)) {
        throw NumericalError("trajectory state lost its norm");
    }
    work /= norm;
    amps.swap(work);
}

// Advances `count` independent trajectories in lockstep. Each one only touches its own
// amplitudes and stream, so results equal sequential stepping while the interleaving
// hides the latency of the per-step normalization.
template <typename Mat, typename Vec>
void advance_amplitudes(
    const JumpChannelSet &ch,
    const std::vector<size_t> &active,
    const ComplexMatrix &no_jump,
    NoJumpMode mode,
    double dt,
    TrajectoryState *states,
    RngStream *rngs,
    size_t count,
    int steps) {
    constexpr size_t kMaxGroup = 4;
    const Mat h_eff = ch.h_eff;
    const Mat propagator = no_jump;
    const Mat *exact = mode == NoJumpMode::Exact ? &propagator : nullptr;
    for (size_t base = 0; base < count; base += kMaxGroup) {
        size_t group = std::min(kMaxGroup, count - base);
        std::array<Vec, kMaxGroup> amps;
        std::array<Vec, kMaxGroup> work;
        for (size_t j = 0; j < group; j++) {
            amps[j] = states[base + j].psi.amplitudes();
            work[j].resize(amps[j].size());
        }
        const double t_start = states[base].t;
        for (int k = 0; k < steps; k++) {
            const double t_next = t_start + (k + 1) * dt;
            for (size_t j = 0; j < group; j++) {
                step_in_place(ch, active, h_eff, exact, dt, amps[j], work[j], t_next, states[base + j].jump_log,
                              rngs[base + j]);
            }
        }
        for (size_t j = 0; j < group; j++) {
            TrajectoryState &state = states[base + j];
            state.psi = StateVector(state.psi.num_qubits(), ComplexVector(amps[j]));
        }
    }
}

}  // namespace

RngStream::RngStream(uint64_t base_seed, uint64_t stream_index)
    : base_seed_(base_seed), stream_index_(stream_index), engine_(seeded_engine(base_seed, stream_index)) {
}

double RngStream::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

uint64_t derive_seed(uint64_t base_seed, uint64_t salt) {
    return splitmix64(base_seed ^ splitmix64(salt + 0x632BE59BD9B4E019ULL));
}

std::vector<double> jump_probabilities(const StateVector &psi, const JumpChannelSet &channels, double dt) {
    check_dt(dt);
    check_state(psi, channels);
    std::vector<double> out(channels.num_channels(), 0.0);
    double total = 0;
    for (size_t n = 0; n < channels.num_channels(); n++) {
        if (channels.inert[n]) {
            continue;
        }
        double weight = (channels.jump_ops[n] * psi.amplitudes()).squaredNorm();
        out[n] = channels.rates[n] * dt * weight;
        total += out[n];
    }
    if (total > kFirstOrderGate) {
        throw_gate(total, dt);
    }
    return out;
}

StateVector apply_jump(const StateVector &psi, const JumpChannelSet &channels, int channel) {
    check_state(psi, channels);
    if (channel < 0 || static_cast<size_t>(channel) >= channels.num_channels()) {
        throw DomainError("jump channel index out of range");
    }
    ComplexVector v = channels.jump_ops[static_cast<size_t>(channel)] * psi.amplitudes();
    if (!(v.norm() > 1e-12)) {
        throw std::logic_error("jump channel " + std::to_string(channel) + " annihilates the state");
    }
    return StateVector(psi.num_qubits(), std::move(v));
}

NoJumpResult no_jump_step(const StateVector &psi, const JumpChannelSet &channels, double dt, NoJumpMode mode) {
    check_dt(dt);
    check_state(psi, channels);
    if (mode == NoJumpMode::FirstOrder) {
        jump_probabilities(psi, channels, dt);
    }
    ComplexVector v = no_jump_operator(channels, dt, mode) * psi.amplitudes();
    double p0 = v.squaredNorm();
    return NoJumpResult{StateVector(psi.num_qubits(), std::move(v)), p0};
}

TrajectoryStepper::TrajectoryStepper(const JumpChannelSet &channels, double dt, NoJumpMode mode)
    : channels_(&channels), dt_(dt), mode_(mode), no_jump_(no_jump_operator(channels, dt, mode)) {
    if (!(dt > 0) || !std::isfinite(dt)) {
        throw DomainError("trajectory step must be positive");
    }
    for (size_t n = 0; n < channels.num_channels(); n++) {
        if (!channels.inert[n]) {
            active_.push_back(n);
        }
    }
}

void TrajectoryStepper::step(TrajectoryState &state, RngStream &rng) const {
    advance(state, 1, rng);
}

int whole_steps(double total, double dt) {
    if (!(total >= 0) || !std::isfinite(total)) {
        throw DomainError("total time must be finite and nonnegative");
    }
    if (total == 0) {
        return 0;
    }
    if (!(dt > 0)) {
        throw DomainError("time step must be positive");
    }
    double ratio = total / dt;
    double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio) || rounded < 1) {
        std::ostringstream msg;
        msg << "total time " << total << " is not an integer multiple of the step " << dt;
        throw DomainError(msg.str());
    }
    return static_cast<int>(rounded);
}

void TrajectoryStepper::run(TrajectoryState &state, double t_end, RngStream &rng) const {
    advance(state, whole_steps(t_end - state.t, dt_), rng);
}

void TrajectoryStepper::advance(TrajectoryState &state, int steps, RngStream &rng) const {
    advance_group(&state, &rng, 1, steps);
}

void TrajectoryStepper::advance_group(TrajectoryState *states, RngStream *rngs, size_t count, int steps) const {
    if (count == 0) {
        return;
    }
    double t_start = states[0].t;
    for (size_t j = 1; j < count; j++) {
        if (states[j].t != t_start) {
            throw DomainError("trajectories advanced together must share a clock");
        }
    }
    if (steps > 0) {
        const JumpChannelSet &ch = *channels_;
        switch (ch.h_eff.rows()) {
            case 2:
                advance_amplitudes<Eigen::Matrix2cd, Eigen::Vector2cd>(
                    ch, active_, no_jump_, mode_, dt_, states, rngs, count, steps);
                break;
            case 4:
                advance_amplitudes<Eigen::Matrix4cd, Eigen::Vector4cd>(
                    ch, active_, no_jump_, mode_, dt_, states, rngs, count, steps);
                break;
            case 8:
                advance_amplitudes<Eigen::Matrix<Complex, 8, 8>, Eigen::Matrix<Complex, 8, 1>>(
                    ch, active_, no_jump_, mode_, dt_, states, rngs, count, steps);
                break;
            default:
                advance_amplitudes<ComplexMatrix, ComplexVector>(
                    ch, active_, no_jump_, mode_, dt_, states, rngs, count, steps);
        }
    }
    // Avoid accumulating floating-point drift in the clock.
    for (size_t j = 0; j < count; j++) {
        states[j].t = t_start + steps * dt_;
    }
}

TrajectoryState sample_trajectory(
    const StateVector &psi0,
    const JumpChannelSet &channels,
    double total_time,
    double dt,
    RngStream &rng,
    NoJumpMode mode) {
    check_state(psi0, channels);
    TrajectoryState state{psi0, 0.0, {}};
    if (total_time == 0) {
        return state;
    }
    TrajectoryStepper stepper(channels, dt, mode);
    stepper.run(state, total_time, rng);
    return state;
}

DensityAccumulator::DensityAccumulator(int num_qubits) : num_qubits_(num_qubits) {
    auto dim = static_cast<Eigen::Index>(hilbert_dim(num_qubits));
    sum_ = ComplexMatrix::Zero(dim, dim);
}

void DensityAccumulator::add(const StateVector &psi) {
    if (psi.num_qubits() != num_qubits_) {
        throw DomainError("ensemble states have different dimensions");
    }
    sum_.noalias() += psi.amplitudes() * psi.amplitudes().adjoint();
    count_++;
}

void DensityAccumulator::merge(const DensityAccumulator &other) {
    if (other.num_qubits_ != num_qubits_) {
        throw DomainError("cannot merge ensembles of different dimensions");
    }
    sum_ += other.sum_;
    count_ += other.count_;
}

DensityMatrix DensityAccumulator::mean() const {
    if (count_ == 0) {
        throw DomainError("ensemble is empty");
    }
    ComplexMatrix rho = sum_ / static_cast<double>(count_);
    rho /= rho.trace().real();
    return DensityMatrix(num_qubits_, std::move(rho));
}

DensityMatrix ensemble_density(const std::vector<StateVector> &states) {
    if (states.empty()) {
        throw DomainError("ensemble_density needs at least one state");
    }
    DensityAccumulator acc(states.front().num_qubits());
    for (const StateVector &psi : states) {
        acc.add(psi);
    }
    return acc.mean();
}

void parallel_for(size_t count, const std::function<void(size_t)> &task, unsigned max_threads) {
    unsigned threads = max_threads > 0 ? max_threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<size_t>(threads, count));
    if (threads <= 1) {
        for (size_t k = 0; k < count; k++) {
            task(k);
        }
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&]() {
        for (size_t k = next++; k < count; k = next++) {
            try {
                task(k);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next = count;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; t++) {
        pool.emplace_back(worker);
    }
    for (std::thread &th : pool) {
        th.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

DensityMatrix simulate_ensemble(
    const StateVector &psi0,
    const JumpChannelSet &channels,
    double total_time,
    double dt,
    size_t num_trajectories,
    uint64_t base_seed,
    NoJumpMode mode) {
    if (num_trajectories == 0) {
        throw DomainError("simulate_ensemble needs at least one trajectory");
    }
    check_state(psi0, channels);
    TrajectoryStepper stepper(channels, dt, mode);

    size_t num_chunks = (num_trajectories + kEnsembleChunk - 1) / kEnsembleChunk;
    std::vector<DensityAccumulator> partial(num_chunks, DensityAccumulator(psi0.num_qubits()));
    int steps = whole_steps(total_time, dt);
    parallel_for(num_chunks, [&](size_t chunk) {
        size_t begin = chunk * kEnsembleChunk;
        size_t end = std::min(num_trajectories, begin + kEnsembleChunk);
        std::vector<TrajectoryState> states(end - begin, TrajectoryState{psi0, 0.0, {}});
        std::vector<RngStream> rngs;
        rngs.reserve(end - begin);
        for (size_t k = begin; k < end; k++) {
            rngs.emplace_back(base_seed, k);
        }
        stepper.advance_group(states.data(), rngs.data(), states.size(), steps);
        for (const TrajectoryState &state : states) {
            partial[chunk].add(state.psi);
        }
    });
    DensityAccumulator total(psi0.num_qubits());
    for (const DensityAccumulator &acc : partial) {
        total.merge(acc);
    }
    return total.mean();
}

double FirstOrderChannel::total_probability() const {
    double s = 0;
    for (double p : probabilities) {
        s += p;
    }
    return s;
}

double FirstOrderChannel::completeness_residual() const {
    if (ops.empty()) {
        return 0;
    }
    Eigen::Index dim = ops.front().rows();
    ComplexMatrix sum = -ComplexMatrix::Identity(dim, dim);
    for (size_t n = 0; n < ops.size(); n++) {
        sum.noalias() += probabilities[n] * (ops[n].adjoint() * ops[n]);
    }
    return max_abs(sum);
}

FirstOrderChannel build_first_order_channel(const StateVector &psi_ref, const JumpChannelSet &channels, double dt) {
    std::vector<double> jumps = jump_probabilities(psi_ref, channels, dt);
    FirstOrderChannel out;
    out.dt = dt;
    ComplexMatrix k0 = first_order_no_jump(channels, dt);
    double p0 = (k0 * psi_ref.amplitudes()).squaredNorm();
    out.ops.push_back(k0 / std::sqrt(p0));
    out.probabilities.push_back(p0);
    auto dim = static_cast<Eigen::Index>(channels.dim());
    for (size_t n = 0; n < channels.num_channels(); n++) {
        double p = jumps[n];
        if (p > 0) {
            out.ops.push_back(std::sqrt(channels.rates[n] * dt / p) * channels.jump_ops[n]);
        } else {
            out.ops.push_back(ComplexMatrix::Zero(dim, dim));
        }
        out.probabilities.push_back(p);
    }
    return out;
}

}  // namespace corrqec
