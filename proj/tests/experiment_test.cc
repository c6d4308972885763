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


#include "corrqec/experiment.h"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace corrqec {
namespace {

using json = nlohmann::json;

std::string config_path(const std::string &name) {
    return std::string(CORRQEC_SOURCE_DIR) + "/configs/" + name;
}

ExperimentConfig collective_config() {
    ExperimentConfig cfg;
    cfg.noise.kind = "collective";
    cfg.noise.amplitude = 0.2;
    cfg.noise.axis = Axis::Z;
    return cfg;
}

TEST(ParseConfig, EmptyObjectGivesDefaults) {
    ExperimentConfig cfg = parse_config("{}");
    ExperimentConfig def = default_config();
    EXPECT_EQ(cfg.noise.kind, "exponential");
    EXPECT_EQ(cfg.code, "five_qubit");
    EXPECT_EQ(cfg.t0, def.t0);
    EXPECT_EQ(cfg.n_values, def.n_values);
    EXPECT_EQ(cfg.delta_t_values, def.delta_t_values);
    EXPECT_EQ(cfg.trajectories, def.trajectories);
    EXPECT_EQ(cfg.base_seed, def.base_seed);
    EXPECT_EQ(cfg.engine, Engine::Density);
    EXPECT_TRUE(cfg.correction);
    EXPECT_EQ(cfg.alpha, Complex(0.6));
    EXPECT_EQ(cfg.beta, Complex(0, 0.8));
}

TEST(ParseConfig, AllFields) {
    std::string text = R"({
        "noise": {"kind": "collective", "axis": "x", "amplitude": 0.3, "tau_c": 0.2, "coupling": 2.0,
                  "num_qubits": 5, "normalize_rates": false},
        "code": "five_qubit",
        "logical_state": [[0, 0], [0, 1]],
        "T0": 1.5,
        "N_values": [3, 6],
        "delta_t_values": [0.1, 0.2],
        "M": 77,
        "base_seed": 5,
        "engine": "trajectory",
        "dt_integrator": 1e-4,
        "trajectory_substeps": 4,
        "no_jump_mode": "exact",
        "correction": false
    })";
    ExperimentConfig cfg = parse_config(text);
    EXPECT_EQ(cfg.noise.kind, "collective");
    EXPECT_EQ(cfg.noise.axis, Axis::X);
    EXPECT_EQ(cfg.noise.amplitude, 0.3);
    EXPECT_EQ(cfg.noise.tau_c, 0.2);
    EXPECT_EQ(cfg.noise.coupling, 2.0);
    EXPECT_FALSE(cfg.noise.normalize_rates);
    EXPECT_EQ(cfg.alpha, Complex(0));
    EXPECT_EQ(cfg.beta, Complex(0, 1));
    EXPECT_EQ(cfg.t0, 1.5);
    EXPECT_EQ(cfg.n_values, (std::vector<int>{3, 6}));
    EXPECT_EQ(cfg.delta_t_values, (std::vector<double>{0.1, 0.2}));
    EXPECT_EQ(cfg.trajectories, 77u);
    EXPECT_EQ(cfg.base_seed, 5u);
    EXPECT_EQ(cfg.engine, Engine::Trajectory);
    EXPECT_EQ(cfg.dt_integrator, 1e-4);
    EXPECT_EQ(cfg.trajectory_substeps, 4);
    EXPECT_EQ(cfg.no_jump_mode, NoJumpMode::Exact);
    EXPECT_FALSE(cfg.correction);
    // tau_c and coupling only matter through g^2 2 tau_c.
    EXPECT_NEAR(build_noise_spec(cfg).a()(0, 3).real(), 0.3 * 4.0 * 0.4, 1e-14);
}

TEST(ParseConfig, RejectsUnknownAndMalformed) {
    EXPECT_THROW(parse_config(R"({"bogus": 1})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"noise": {"kind": "independent", "sigma": 1}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"noise": {"kind": "pink"}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"noise": {"amplitude": 1}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"engine": "gpu"})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"T0": "long"})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"T0": -1})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"N_values": [0, 5]})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"delta_t_values": [0.01, -0.01]})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"logical_state": [1, 0]})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"M": -3})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"no_jump_mode": "second_order"})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"trajectory_substeps": 0})"), ConfigError);
    EXPECT_THROW(parse_config("{not json"), ConfigError);
    EXPECT_THROW(parse_config(R"({"noise": {"kind": "direct"}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"noise": {"kind": "table"}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"noise": {"kind": "cross_axis"}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"noise": {"kind": "independent", "B": [[[0, 0]]]}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"noise": {"kind": "table", "table": [[[1, 0], [0, 0]], [[0, 0]]]}})"),
                 ConfigError);
    EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(ParseConfig, RoundTrip) {
    ExperimentConfig cfg = collective_config();
    cfg.beta = Complex(0.8, 0);
    cfg.engine = Engine::Trajectory;
    cfg.trajectories = 12;
    cfg.correction = false;
    ExperimentConfig back = parse_config(config_to_json(cfg));
    EXPECT_EQ(config_to_json(back), config_to_json(cfg));
    EXPECT_EQ(back.noise.kind, "collective");
    EXPECT_EQ(back.noise.axis, Axis::Z);
    EXPECT_EQ(back.beta, Complex(0.8, 0));
    EXPECT_EQ(back.trajectories, 12u);

    std::ifstream in(config_path("direct_lamb_shift.json"));
    ASSERT_TRUE(in.good());
    ExperimentConfig direct = load_config(config_path("direct_lamb_shift.json"));
    ExperimentConfig direct_back = parse_config(config_to_json(direct));
    EXPECT_EQ(direct_back.noise.a, direct.noise.a);
    EXPECT_EQ(direct_back.noise.b, direct.noise.b);
}

TEST(ParseConfig, ShippedConfigsLoad) {
    int loaded = 0;
    for (const auto &entry : std::filesystem::directory_iterator(std::string(CORRQEC_SOURCE_DIR) + "/configs")) {
        if (entry.path().extension() == ".json") {
            EXPECT_NO_THROW(load_config(entry.path().string())) << entry.path();
            loaded++;
        }
    }
    EXPECT_GE(loaded, 5);
}

TEST(NoiseSpecFromConfig, QubitCountMustMatchCode) {
    ExperimentConfig cfg;
    cfg.noise.num_qubits = 3;
    EXPECT_THROW(build_noise_spec(cfg), ConfigError);
    cfg.noise.num_qubits = 5;
    EXPECT_EQ(noise_num_qubits(cfg), 5);
    cfg.code = "steane";
    EXPECT_THROW(noise_num_qubits(cfg), ConfigError);
}

TEST(NoiseSpecFromConfig, NormalizedToUnitMaxRate) {
    EXPECT_NEAR(build_noise_spec(default_config()).max_rate(), 1.0, 1e-12);
    ExperimentConfig cfg = collective_config();
    NoiseSpec spec = build_noise_spec(cfg);
    EXPECT_NEAR(spec.max_rate(), 1.0, 1e-12);
    EXPECT_NEAR(spec.a().trace().real(), 1.0, 1e-12);
    cfg.noise.normalize_rates = false;
    EXPECT_NEAR(build_noise_spec(cfg).max_rate(), 0.2 * 5 * 0.02, 1e-12);
}

TEST(FitLogLog, RecoversPowerLaw) {
    std::vector<double> x{1, 2, 4, 8, 16, 32};
    std::vector<double> y;
    for (double v : x) {
        y.push_back(3.0 * std::pow(v, -1.5));
    }
    FitResult fit = fit_log_log(x, y);
    ASSERT_TRUE(fit.valid);
    EXPECT_NEAR(fit.slope, -1.5, 1e-12);
    EXPECT_NEAR(std::exp(fit.intercept), 3.0, 1e-10);
    EXPECT_NEAR(fit.slope_stderr, 0.0, 1e-10);
    EXPECT_EQ(fit.points, 6u);
}

TEST(FitLogLog, StandardErrorMatchesClosedForm) {
    std::vector<double> x{1, 2, 3, 4, 5};
    std::vector<double> y{1.0, 2.2, 2.9, 4.3, 4.8};
    FitResult fit = fit_log_log(x, y);
    ASSERT_TRUE(fit.valid);
    // Independent OLS on the logs.
    double n = 5, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int k = 0; k < 5; k++) {
        double lx = std::log(x[k]), ly = std::log(y[k]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double intercept = (sy - slope * sx) / n;
    double rss = 0;
    for (int k = 0; k < 5; k++) {
        double r = std::log(y[k]) - intercept - slope * std::log(x[k]);
        rss += r * r;
    }
    double se = std::sqrt(rss / (n - 2) / (sxx - sx * sx / n));
    EXPECT_NEAR(fit.slope, slope, 1e-12);
    EXPECT_NEAR(fit.slope_stderr, se, 1e-12);
}

TEST(FitLogLog, NeedsFivePositivePoints) {
    FitResult fit = fit_log_log({1, 2, 3, 4, 5}, {1, 2, 0, 4, 5});
    EXPECT_FALSE(fit.valid);
    EXPECT_EQ(fit.points, 4u);
    EXPECT_FALSE(fit.note.empty());
    EXPECT_FALSE(fit_log_log({1, 2, 3, 4}, {1, 2, 3, 4}).valid);
    EXPECT_TRUE(fit_log_log({1, 2, 3, 4, 5, 6}, {1, 2, 0, 4, 5, 6}).valid);
}

TEST(CycleFidelity, NoiselessIsPerfect) {
    ExperimentConfig cfg;
    cfg.noise.kind = "direct";
    cfg.noise.a = ComplexMatrix::Zero(15, 15);
    FidelityResult r = run_cycle_fidelity(cfg);
    for (const CycleRow &row : r.cycle_rows) {
        EXPECT_NEAR(row.infidelity, 0.0, 1e-12);
    }
    EXPECT_FALSE(r.fit.valid);
}

TEST(CycleFidelity, CorrectedSlopeIsTwo) {
    FidelityResult r = run_cycle_fidelity(default_config());
    ASSERT_TRUE(r.fit.valid);
    EXPECT_GE(r.fit.slope, 1.8);
    EXPECT_LE(r.fit.slope, 2.2);
    for (const CycleRow &row : r.cycle_rows) {
        EXPECT_GE(row.fidelity, 0.0);
        EXPECT_LE(row.fidelity, 1.0 + 1e-9);
    }
}

TEST(CycleFidelity, UncorrectedSlopeIsOneAndMatchesEvolution) {
    ExperimentConfig cfg = default_config();
    cfg.correction = false;
    FidelityResult r = run_cycle_fidelity(cfg);
    ASSERT_TRUE(r.fit.valid);
    EXPECT_GE(r.fit.slope, 0.8);
    EXPECT_LE(r.fit.slope, 1.2);

    JumpChannelSet ch = build_channels(build_noise_spec(cfg));
    StateVector psi = encode(cfg.alpha, cfg.beta, five_qubit_code());
    double dt = cfg.delta_t_values.back();
    double direct = evolve_for(DensityMatrix(psi), ch, dt).fidelity(psi);
    EXPECT_NEAR(r.cycle_rows.back().fidelity, direct, 1e-12);
}

TEST(RepetitionScaling, SingleRepetitionEqualsOneCycle) {
    ExperimentConfig cfg = collective_config();
    cfg.n_values = {1};
    cfg.delta_t_values = {cfg.t0};
    FidelityResult scaling = run_repetition_scaling(cfg);
    FidelityResult cycle = run_cycle_fidelity(cfg);
    EXPECT_EQ(scaling.scaling_rows[0].final_fidelity, cycle.cycle_rows[0].fidelity);
    EXPECT_EQ(scaling.scaling_rows[0].delta_t, cfg.t0);
}

TEST(RepetitionScaling, CollectiveMonotoneAndInverseN) {
    FidelityResult r = run_repetition_scaling(collective_config());
    ASSERT_EQ(r.scaling_rows.size(), 5u);
    for (size_t k = 1; k < r.scaling_rows.size(); k++) {
        EXPECT_LE(r.scaling_rows[k].final_infidelity, r.scaling_rows[k - 1].final_infidelity + 1e-12);
        EXPECT_NEAR(r.scaling_rows[k].delta_t * r.scaling_rows[k].n, 0.5, 1e-15);
    }
    ASSERT_TRUE(r.fit.valid);
    EXPECT_GE(r.fit.slope, -1.2);
    EXPECT_LE(r.fit.slope, -0.8);
}

TEST(TrajectoryEngine, AgreesWithDensityEngine) {
    ExperimentConfig cfg = collective_config();
    cfg.delta_t_values = {0.01, 0.03, 0.05};
    cfg.trajectories = 3000;
    FidelityResult dens = run_cycle_fidelity(cfg);
    cfg.engine = Engine::Trajectory;
    FidelityResult traj = run_cycle_fidelity(cfg);
    EXPECT_EQ(traj.trajectories, 3000u);
    EXPECT_EQ(dens.trajectories, 0u);
    for (size_t k = 0; k < cfg.delta_t_values.size(); k++) {
        double f = dens.cycle_rows[k].fidelity;
        double binomial_se = std::sqrt(f * (1 - f) / 3000.0);
        EXPECT_NEAR(traj.cycle_rows[k].fidelity, f, 3 * binomial_se + 1e-12) << "delta_t " << cfg.delta_t_values[k];
        // Per-trajectory fidelities lie in [0, 1], so the sample variance is bounded by Fhat (1 - Fhat).
        double fhat = traj.cycle_rows[k].fidelity;
        EXPECT_LE(traj.cycle_rows[k].std_error, std::sqrt(fhat * (1 - fhat) / 2999.0) + 1e-12);
    }

    cfg.n_values = {5, 10};
    cfg.trajectories = 2000;
    FidelityResult traj_n = run_repetition_scaling(cfg);
    cfg.engine = Engine::Density;
    FidelityResult dens_n = run_repetition_scaling(cfg);
    for (size_t k = 0; k < 2; k++) {
        double f = dens_n.scaling_rows[k].final_fidelity;
        EXPECT_NEAR(traj_n.scaling_rows[k].final_fidelity, f, 3 * std::sqrt(f * (1 - f) / 2000.0) + 1e-12);
    }
}

TEST(TrajectoryEngine, GateViolationNamesInterval) {
    ExperimentConfig cfg = default_config();
    cfg.engine = Engine::Trajectory;
    cfg.trajectories = 10;
    cfg.trajectory_substeps = 1;
    cfg.delta_t_values = {0.2};
    try {
        run_cycle_fidelity(cfg);
        FAIL() << "expected a StepSizeError";
    } catch (const StepSizeError &e) {
        EXPECT_NE(std::string(e.what()).find("delta_t = 0.2"), std::string::npos) << e.what();
    }
    cfg.trajectories = 0;
    cfg.delta_t_values = {0.01};
    EXPECT_THROW(run_cycle_fidelity(cfg), ConfigError);
}

TEST(Csv, CycleLayout) {
    ExperimentConfig cfg = collective_config();
    std::ostringstream out;
    write_cycle_csv(out, run_cycle_fidelity(cfg));
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "delta_t,fidelity,infidelity,engine,M,seed");
    std::getline(in, line);
    EXPECT_EQ(line.substr(0, 6), "0.002,");
    EXPECT_NE(line.find(",density,0,20260101"), std::string::npos);
    std::string text = out.str();
    EXPECT_NE(text.find("\n# slope,"), std::string::npos);
    EXPECT_NE(text.find("\n# slope_stderr,"), std::string::npos);
    EXPECT_NE(text.find("\n# fit_points,8"), std::string::npos);
}

TEST(Csv, ScalingLayoutAndSkippedFit) {
    ExperimentConfig cfg = collective_config();
    cfg.n_values = {1, 2};
    std::ostringstream out;
    write_scaling_csv(out, run_repetition_scaling(cfg));
    std::string text = out.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), "N,delta_t,final_fidelity,final_infidelity,engine,M,seed");
    EXPECT_NE(text.find("\n1,0.5,"), std::string::npos);
    EXPECT_NE(text.find("# fit_skipped,"), std::string::npos);
}

TEST(Csv, SnapshotLayout) {
    std::ostringstream out;
    write_snapshot_csv(out, {{0.0, 1.0, 1.0, 1.0}, {0.5, 0.9, 1.0, 0.8}});
    EXPECT_EQ(out.str(), "time,fidelity_to_initial,trace,purity\n0,1,1,1\n0.5,0.90000000000000002,1,0.80000000000000004\n");
}

TEST(Reproducibility, TrajectoryCsvIsBitIdentical) {
    ExperimentConfig cfg = collective_config();
    cfg.engine = Engine::Trajectory;
    cfg.trajectories = 300;
    cfg.delta_t_values = {0.02, 0.04};
    std::ostringstream a;
    std::ostringstream b;
    write_cycle_csv(a, run_cycle_fidelity(cfg));
    write_cycle_csv(b, run_cycle_fidelity(cfg));
    EXPECT_EQ(a.str(), b.str());
    cfg.base_seed++;
    std::ostringstream c;
    write_cycle_csv(c, run_cycle_fidelity(cfg));
    EXPECT_NE(a.str(), c.str());
}

TEST(Trajectories, JumpLogs) {
    ExperimentConfig cfg = default_config();
    cfg.trajectories = 20;
    std::vector<TrajectoryRecord> recs = run_trajectories(cfg);
    ASSERT_EQ(recs.size(), 20u);
    size_t jumps = 0;
    for (size_t k = 0; k < recs.size(); k++) {
        EXPECT_EQ(recs[k].index, k);
        EXPECT_NEAR(recs[k].state.t, cfg.t0, 1e-12);
        jumps += recs[k].state.jump_log.size();
    }
    EXPECT_GT(jumps, 0u);
    std::ostringstream a;
    std::ostringstream b;
    write_jump_log_csv(a, recs);
    write_jump_log_csv(b, run_trajectories(cfg));
    EXPECT_EQ(a.str(), b.str());
    EXPECT_EQ(a.str().substr(0, a.str().find('\n')), "trajectory_index,t,channel_n");
}

TEST(Validation, DefaultConfigPasses) {
    ValidationReport report = run_validation_suite(default_config());
    EXPECT_TRUE(report.all_passed());
    std::set<std::string> names;
    for (const ValidationCheck &c : report.checks) {
        EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
        names.insert(c.name);
    }
    for (const char *expected : {"code_gram_orthonormal", "recovery_exhaustive", "noise_spec_valid",
                                 "channel_invariants", "first_order_gate", "first_order_channel_order",
                                 "unraveling_consistency"}) {
        EXPECT_TRUE(names.count(expected)) << expected;
    }
    std::ostringstream out;
    write_validation_csv(out, report);
    EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "check,status,measured,threshold,detail");
}

TEST(Validation, NonPsdNoiseFails) {
    ValidationReport report = run_validation_suite(load_config(config_path("bad_not_psd.json")));
    EXPECT_FALSE(report.all_passed());
    bool found = false;
    for (const ValidationCheck &c : report.checks) {
        if (c.name == "noise_spec_valid") {
            found = true;
            EXPECT_FALSE(c.passed);
            EXPECT_NE(c.detail.find("positive semidefinite"), std::string::npos);
        }
    }
    EXPECT_TRUE(found);
}

TEST(Validation, GateViolationFails) {
    ExperimentConfig cfg = load_config(config_path("bad_gate.json"));
    ValidationReport report = run_validation_suite(cfg);
    EXPECT_FALSE(report.all_passed());
    for (const ValidationCheck &c : report.checks) {
        if (c.name == "first_order_gate") {
            EXPECT_FALSE(c.passed);
            EXPECT_GT(c.measured, kFirstOrderGate);
        }
    }
}

TEST(Validation, DirectLambShiftConfigPasses) {
    ValidationReport report = run_validation_suite(load_config(config_path("direct_lamb_shift.json")));
    for (const ValidationCheck &c : report.checks) {
        EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
    }
}

TEST(EngineName, RoundTrip) {
    EXPECT_EQ(parse_engine(engine_name(Engine::Trajectory)), Engine::Trajectory);
    EXPECT_EQ(parse_engine(engine_name(Engine::Density)), Engine::Density);
    EXPECT_THROW(parse_engine("quantum"), ConfigError);
}

}  // namespace
}  // namespace corrqec
