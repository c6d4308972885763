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


// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "corrqec/experiment.h"
#include "test_util.h"

namespace corrqec {
namespace {

struct Outcome {
    bool passed = true;
    std::string summary;
    std::vector<std::string> details;
};

std::string fmt(const char *pattern, double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, value);
    return buf;
}

StateVector random_logical(std::mt19937_64 &rng) {
    ComplexMatrix c = testing::random_matrix(2, 1, rng);
    double n = c.norm();
    return encode(c(0, 0) / n, c(1, 0) / n, five_qubit_code());
}

NoiseSpec unit_rate(const NoiseSpec &spec) {
    return spec.scaled(1.0 / spec.max_rate());
}

Outcome ac1_gram() {
    const StabilizerCode &code = five_qubit_code();
    std::vector<StateVector> states{code.logical_zero(), code.logical_one(),
                                    encode(1 / std::sqrt(2.0), Complex(0, 1 / std::sqrt(2.0)), code)};
    std::mt19937_64 rng(1001);
    for (int k = 0; k < 10; k++) {
        states.push_back(random_logical(rng));
    }
    double worst = 0;
    for (const StateVector &psi : states) {
        ComplexMatrix gram = error_gram_matrix(psi, code);
        worst = std::max(worst, max_abs(gram - ComplexMatrix::Identity(gram.rows(), gram.cols())));
        if (gram.rows() != 16) {
            return {false, "Gram matrix is not 16x16", {}};
        }
    }
    return {worst <= 1e-10, "13 states, max |G - I| = " + fmt("%.3g", worst) + " (limit 1e-10)", {}};
}

Outcome ac2_recovery() {
    const StabilizerCode &code = five_qubit_code();
    std::mt19937_64 rng(1002);
    RngStream meas(1002, 0);
    double worst = 0;
    for (int k = 0; k < 10; k++) {
        StateVector psi = random_logical(rng);
        for (int flat = 0; flat < 15; flat++) {
            StateVector damaged(5, pauli_op(PauliIndex::from_flat(flat), 5) * psi.amplitudes());
            StateVector out = recover(measure_syndrome(damaged, code, meas), code);
            worst = std::max(worst, 1 - out.fidelity(psi));
        }
    }
    return {worst <= 1e-9, "150 cases, max 1 - F = " + fmt("%.3g", worst) + " (limit 1e-9)", {}};
}

// The expected trace distance at M is estimated from four disjoint 1e4-trajectory
// ensembles, each of which must meet the bound; a further disjoint 4e4 ensemble must
// land below that mean.
Outcome ac3_unraveling(double trajectory_dt) {
    Outcome o;
    const double tau_c = 0.01, coupling = 1.0, t = 1.0;
    const size_t m = 10000;
    const int replicates = 4;
    std::mt19937_64 rng(1003);
    double worst = 0;
    uint64_t index = 0;
    for (int l = 1; l <= 3; l++) {
        std::vector<std::pair<std::string, CorrelationKernel>> kernels{
            {"independent", CorrelationKernel::independent(l, 1.0, tau_c, coupling)},
            {"collective-z", CorrelationKernel::collective(l, 1.0, Axis::Z, tau_c, coupling)},
            {"exponential", CorrelationKernel::exponential(l, 1.0, 1.0, tau_c, coupling)},
            {"cross-axis lowering", CorrelationKernel::cross_axis(l, testing::lowering_block(), tau_c, coupling)},
        };
        for (const auto &[name, kernel] : kernels) {
            JumpChannelSet ch = build_channels(unit_rate(integrate_kernel(kernel)));
            StateVector psi = testing::random_state(l, rng);
            DensityMatrix exact = evolve_for(DensityMatrix(psi), ch, t);
            uint64_t seed = derive_seed(1003, index++);
            double mean_m = 0, worst_m = 0;
            // Each ensemble draws from its own derived base seed, so none share trajectories.
            for (int r = 0; r < replicates; r++) {
                double td = trace_distance(simulate_ensemble(psi, ch, t, trajectory_dt, m, derive_seed(seed, r)), exact);
                mean_m += td / replicates;
                worst_m = std::max(worst_m, td);
            }
            double td4 = trace_distance(simulate_ensemble(psi, ch, t, trajectory_dt, 4 * m, derive_seed(seed, 99)), exact);
            bool ok = worst_m <= 0.02 && td4 < mean_m;
            o.passed = o.passed && ok;
            worst = std::max(worst, worst_m);
            o.details.push_back((ok ? "ok   " : "FAIL ") + std::string("L=") + std::to_string(l) + " " + name +
                                ": TD(M=1e4) mean " + fmt("%.4f", mean_m) + " max " + fmt("%.4f", worst_m) +
                                ", TD(M=4e4) " + fmt("%.4f", td4));
        }
    }
    o.summary = "12 specs at xi_max t = 1, step " + fmt("%g", trajectory_dt) + ", worst TD(M=1e4) = " +
                fmt("%.4f", worst) + " (limit 0.02, mean must drop at 4M)";
    return o;
}

Outcome ac4_channel_order() {
    Outcome o;
    std::mt19937_64 rng(1004);
    double lo = 1e300, hi = 0;
    for (int k = 0; k < 5; k++) {
        ComplexMatrix b = k % 2 ? testing::random_hermitian(6, rng) : ComplexMatrix::Zero(6, 6);
        JumpChannelSet ch = build_channels(unit_rate(NoiseSpec::direct(testing::random_psd(6, rng), b, 2)));
        StateVector psi = testing::random_state(2, rng);
        DensityMatrix rho(psi);
        double err[2];
        for (int h = 0; h < 2; h++) {
            double dt = 0.01 / (1 << h);
            DensityMatrix approx = apply_first_order_channel(rho, build_first_order_channel(psi, ch, dt));
            err[h] = (approx.matrix() - evolve_for(rho, ch, dt).matrix()).norm();
        }
        double ratio = err[0] / err[1];
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        o.passed = o.passed && std::abs(ratio - 4.0) <= 0.5;
        o.details.push_back("spec " + std::to_string(k) + (k % 2 ? " (with Lamb shift)" : "") +
                            ": error ratio " + fmt("%.4f", ratio));
    }
    o.summary = "5 random 2-qubit specs, halving ratios in [" + fmt("%.3f", lo) + ", " + fmt("%.3f", hi) +
                "] (limit 4 +/- 0.5)";
    return o;
}

Outcome ac5_cycle_slope() {
    ExperimentConfig cfg = default_config();
    FidelityResult r = run_cycle_fidelity(cfg);
    double span = cfg.delta_t_values.back() / cfg.delta_t_values.front();
    bool ok = r.fit.valid && span >= 10 - 1e-9 && r.fit.slope >= 1.8 && r.fit.slope <= 2.2;
    return {ok,
            "exponential kernel, delta_t span x" + fmt("%.3g", span) + ", slope " + fmt("%.4f", r.fit.slope) +
                " +/- " + fmt("%.2g", r.fit.slope_stderr) + " (limit [1.8, 2.2])",
            {}};
}

Outcome ac6_scaling() {
    Outcome o;
    ExperimentConfig exponential = default_config();
    ExperimentConfig collective = default_config();
    collective.noise.kind = "collective";
    collective.noise.axis = Axis::Z;
    for (const auto &[name, cfg] : {std::pair{"exponential", exponential}, std::pair{"collective-z", collective}}) {
        double xi_t0 = build_noise_spec(cfg).max_rate() * cfg.t0;
        FidelityResult r = run_repetition_scaling(cfg);
        bool ok = r.fit.valid && std::abs(xi_t0 - 0.5) < 1e-12 && r.fit.slope >= -1.2 && r.fit.slope <= -0.8;
        o.passed = o.passed && ok;
        std::string line = (ok ? "ok   " : "FAIL ") + std::string(name) + ": slope " + fmt("%.4f", r.fit.slope) +
                           " +/- " + fmt("%.2g", r.fit.slope_stderr) + ", infidelities";
        for (const ScalingRow &row : r.scaling_rows) {
            line += " N=" + std::to_string(row.n) + ":" + fmt("%.4g", row.final_infidelity);
        }
        o.details.push_back(line);
    }
    o.summary = "N in {5..80}, xi_max T0 = 0.5, both kernels must give slope in [-1.2, -0.8]";
    return o;
}

Outcome ac7_control() {
    ExperimentConfig cfg = default_config();
    cfg.correction = false;
    FidelityResult r = run_cycle_fidelity(cfg);
    bool ok = r.fit.valid && r.fit.slope >= 0.8 && r.fit.slope <= 1.2;
    return {ok, "uncorrected slope " + fmt("%.4f", r.fit.slope) + " (limit [0.8, 1.2])", {}};
}

Outcome ac8_oracles() {
    double worst = 0;
    for (double xi : {0.5, 1.0, 2.0}) {
        JumpChannelSet ch = build_channels(testing::single_axis_spec(Axis::Z, xi));
        for (double t : {0.1, 0.5, 1.0, 2.0}) {
            DensityMatrix rho = evolve_for(DensityMatrix(testing::plus_state()), ch, t);
            worst = std::max(worst, std::abs(std::abs(rho.matrix()(0, 1)) - 0.5 * std::exp(-2 * xi * t)));
        }
    }
    ComplexMatrix a = ComplexMatrix::Zero(3, 3);
    a.topLeftCorner(2, 2) = testing::lowering_block().topLeftCorner(2, 2);
    JumpChannelSet lowering = build_channels(NoiseSpec::direct(a, ComplexMatrix::Zero(3, 3), 1));
    for (double t : {0.1, 0.5, 1.0, 2.0}) {
        // Single channel s = sqrt(2) |0><1| at unit rate: excited population e^{-2t}.
        DensityMatrix rho = evolve_for(DensityMatrix(StateVector::basis(1, 1)), lowering, t);
        worst = std::max(worst, std::abs(rho.matrix()(1, 1).real() - std::exp(-2 * t)));
    }
    return {worst <= 1e-6, "dephasing and lowering, max deviation " + fmt("%.3g", worst) + " (limit 1e-6)", {}};
}

Outcome ac9_determinism() {
    ExperimentConfig cfg = default_config();
    cfg.noise.kind = "collective";
    cfg.engine = Engine::Trajectory;
    cfg.trajectories = 2000;
    cfg.delta_t_values = {0.01, 0.02, 0.03, 0.04, 0.05};
    auto csv = [&cfg]() {
        std::ostringstream out;
        write_cycle_csv(out, run_cycle_fidelity(cfg));
        return out.str();
    };
    std::string first = csv();
    std::string second = csv();
    ExperimentConfig density = default_config();
    std::ostringstream d1, d2;
    write_cycle_csv(d1, run_cycle_fidelity(density));
    write_cycle_csv(d2, run_cycle_fidelity(density));
    bool ok = first == second && d1.str() == d2.str() && !first.empty();
    return {ok, std::string("trajectory and density cycle CSVs ") + (ok ? "bit-identical" : "differ") + " across reruns",
            {}};
}

}  // namespace
}  // namespace corrqec

int main() {
    using namespace corrqec;
    struct Criterion {
        const char *id;
        const char *title;
        double limit_seconds;
        std::function<Outcome()> run;
    };
    std::vector<Criterion> criteria{
        {"AC1", "code Gram matrix", 1, ac1_gram},
        {"AC2", "exhaustive single-error recovery", 5, ac2_recovery},
        {"AC3", "unraveling consistency", 120, [] { return ac3_unraveling(1e-3); }},
        {"AC4", "first-order channel order", 30, ac4_channel_order},
        {"AC5", "per-cycle infidelity slope", 120, ac5_cycle_slope},
        {"AC6", "repetition scaling slope", 300, ac6_scaling},
        {"AC7", "uncorrected control slope", 60, ac7_control},
        {"AC8", "analytic oracles", 5, ac8_oracles},
        {"AC9", "determinism", 60, ac9_determinism},
    };
    int failures = 0;
    for (const Criterion &c : criteria) {
        auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what(), {}};
        }
        double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool in_time = seconds < c.limit_seconds;
        bool passed = o.passed && in_time;
        failures += passed ? 0 : 1;
        std::printf("[%s] %s %s: %s; %.2f s (limit %g s%s)\n", passed ? "PASS" : "FAIL", c.id, c.title,
                    o.summary.c_str(), seconds, c.limit_seconds, in_time ? "" : ", exceeded");
        for (const std::string &d : o.details) {
            std::printf("       %s\n", d.c_str());
        }
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
