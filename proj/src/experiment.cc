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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"

namespace corrqec {

using json = nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Config parsing helpers.

void reject_unknown_keys(const json &obj, const std::set<std::string> &allowed, const std::string &where) {
    if (!obj.is_object()) {
        throw ConfigError(where + " must be an object");
    }
    for (const auto &item : obj.items()) {
        if (!allowed.count(item.key())) {
            throw ConfigError("unknown key '" + item.key() + "' in " + where);
        }
    }
}

Complex parse_complex(const json &j, const std::string &where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ConfigError(where + " must be a [re, im] pair");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

json complex_to_json(Complex z) {
    return json::array({z.real(), z.imag()});
}

ComplexMatrix parse_matrix(const json &j, const std::string &where) {
    if (!j.is_array() || j.empty()) {
        throw ConfigError(where + " must be a non-empty array of rows");
    }
    auto rows = static_cast<Eigen::Index>(j.size());
    if (!j[0].is_array()) {
        throw ConfigError(where + " rows must be arrays of [re, im] pairs");
    }
    auto cols = static_cast<Eigen::Index>(j[0].size());
    ComplexMatrix out(rows, cols);
    for (Eigen::Index r = 0; r < rows; r++) {
        const json &row = j[static_cast<size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw ConfigError(where + " is not rectangular");
        }
        for (Eigen::Index c = 0; c < cols; c++) {
            out(r, c) = parse_complex(row[static_cast<size_t>(c)], where);
        }
    }
    return out;
}

json matrix_to_json(const ComplexMatrix &m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); r++) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); c++) {
            row.push_back(complex_to_json(m(r, c)));
        }
        rows.push_back(row);
    }
    return rows;
}

Axis parse_axis(const std::string &s) {
    if (s == "x" || s == "X") {
        return Axis::X;
    }
    if (s == "y" || s == "Y") {
        return Axis::Y;
    }
    if (s == "z" || s == "Z") {
        return Axis::Z;
    }
    throw ConfigError("axis must be one of x, y, z; got '" + s + "'");
}

const std::set<std::string> kNoiseKinds{"independent", "collective", "exponential", "cross_axis", "table", "direct"};

NoiseConfig parse_noise(const json &j) {
    reject_unknown_keys(
        j,
        {"kind", "num_qubits", "amplitude", "correlation_length", "axis", "tau_c", "coupling", "axis_block", "table",
         "A", "B", "normalize_rates"},
        "noise");
    NoiseConfig n;
    n.kind = j.at("kind").get<std::string>();
    if (!kNoiseKinds.count(n.kind)) {
        throw ConfigError("unknown noise kind '" + n.kind + "'");
    }
    n.num_qubits = j.value("num_qubits", 0);
    n.amplitude = j.value("amplitude", n.amplitude);
    n.correlation_length = j.value("correlation_length", n.correlation_length);
    if (j.contains("axis")) {
        n.axis = parse_axis(j["axis"].get<std::string>());
    }
    n.tau_c = j.value("tau_c", n.tau_c);
    n.coupling = j.value("coupling", n.coupling);
    if (j.contains("axis_block")) {
        n.axis_block = parse_matrix(j["axis_block"], "noise.axis_block");
    }
    if (j.contains("table")) {
        n.table = parse_matrix(j["table"], "noise.table");
    }
    if (j.contains("A")) {
        n.a = parse_matrix(j["A"], "noise.A");
    }
    if (j.contains("B")) {
        n.b = parse_matrix(j["B"], "noise.B");
    }
    n.normalize_rates = j.value("normalize_rates", n.normalize_rates);

    if (n.kind == "cross_axis" && n.axis_block.size() == 0) {
        throw ConfigError("noise kind cross_axis requires axis_block");
    }
    if (n.kind == "table" && n.table.size() == 0) {
        throw ConfigError("noise kind table requires table");
    }
    if (n.kind == "direct" && n.a.size() == 0) {
        throw ConfigError("noise kind direct requires A");
    }
    if (n.kind != "direct" && n.b.size() != 0) {
        throw ConfigError("B may only be given with noise kind direct");
    }
    return n;
}

json noise_to_json(const NoiseConfig &n) {
    json j;
    j["kind"] = n.kind;
    if (n.num_qubits != 0) {
        j["num_qubits"] = n.num_qubits;
    }
    j["normalize_rates"] = n.normalize_rates;
    if (n.kind == "direct") {
        j["A"] = matrix_to_json(n.a);
        if (n.b.size() != 0) {
            j["B"] = matrix_to_json(n.b);
        }
        return j;
    }
    j["tau_c"] = n.tau_c;
    j["coupling"] = n.coupling;
    if (n.kind == "independent" || n.kind == "collective" || n.kind == "exponential") {
        j["amplitude"] = n.amplitude;
    }
    if (n.kind == "collective") {
        j["axis"] = std::string(1, static_cast<char>(axis_char(n.axis) - 'A' + 'a'));
    }
    if (n.kind == "exponential") {
        j["correlation_length"] = n.correlation_length;
    }
    if (n.kind == "cross_axis") {
        j["axis_block"] = matrix_to_json(n.axis_block);
    }
    if (n.kind == "table") {
        j["table"] = matrix_to_json(n.table);
    }
    return j;
}

// ---------------------------------------------------------------------------
// Shared experiment machinery.

struct Setup {
    const StabilizerCode *code;
    StateVector psi;
    JumpChannelSet channels;
};

Setup make_setup(const ExperimentConfig &cfg) {
    const StabilizerCode *code = nullptr;
    try {
        code = &code_by_name(cfg.code);
    } catch (const DomainError &e) {
        throw ConfigError(e.what());
    }
    StateVector psi = encode(cfg.alpha, cfg.beta, *code);
    return Setup{code, std::move(psi), build_channels(build_noise_spec(cfg))};
}

struct MeanEstimate {
    double mean;
    double std_error;
};

void add_interval_context(const StepSizeError &e, double interval) {
    std::ostringstream msg;
    msg << "correction interval delta_t = " << interval << ": " << e.what();
    throw StepSizeError(msg.str());
}

/// Mean fidelity over M trajectories of `cycles` noisy intervals, each followed by
/// syndrome measurement and recovery when correction is on.
MeanEstimate trajectory_fidelity(const Setup &setup, const ExperimentConfig &cfg, double interval, int cycles,
                                 uint64_t stream_seed) {
    if (cfg.trajectories == 0) {
        throw ConfigError("trajectory engine needs M >= 1");
    }
    int substeps = std::max(1, cfg.trajectory_substeps);
    TrajectoryStepper stepper(setup.channels, interval / substeps, cfg.no_jump_mode);
    constexpr size_t kChunk = 64;
    size_t num_chunks = (cfg.trajectories + kChunk - 1) / kChunk;
    std::vector<std::pair<double, double>> partial(num_chunks, {0.0, 0.0});
    try {
        parallel_for(num_chunks, [&](size_t chunk) {
            size_t begin = chunk * kChunk;
            size_t end = std::min(cfg.trajectories, begin + kChunk);
            for (size_t k = begin; k < end; k++) {
                RngStream rng(stream_seed, k);
                TrajectoryState state{setup.psi, 0.0, {}};
                for (int c = 0; c < cycles; c++) {
                    stepper.advance(state, substeps, rng);
                    if (cfg.correction) {
                        SyndromeOutcome outcome = measure_syndrome(state.psi, *setup.code, rng);
                        state.psi = recover(outcome, *setup.code);
                    }
                }
                // Accumulate the infidelity: it is small, so its sums keep full precision.
                double q = 1.0 - setup.psi.fidelity(state.psi);
                partial[chunk].first += q;
                partial[chunk].second += q * q;
            }
        });
    } catch (const StepSizeError &e) {
        add_interval_context(e, interval);
    }
    double sum = 0;
    double sum_sq = 0;
    for (const auto &p : partial) {
        sum += p.first;
        sum_sq += p.second;
    }
    double m = static_cast<double>(cfg.trajectories);
    double mean_q = sum / m;
    double var = m > 1 ? std::max(0.0, (sum_sq - m * mean_q * mean_q) / (m - 1)) : 0.0;
    return MeanEstimate{1.0 - mean_q, std::sqrt(var / m)};
}

double density_fidelity(const Setup &setup, const ExperimentConfig &cfg, double interval, int cycles) {
    DensityMatrix rho(setup.psi);
    for (int c = 0; c < cycles; c++) {
        rho = evolve_for(rho, setup.channels, interval, cfg.dt_integrator);
        if (cfg.correction) {
            rho = correction_channel(rho, *setup.code);
        }
    }
    return rho.fidelity(setup.psi);
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void check_interval(double dt) {
    if (!(dt > 0) || !std::isfinite(dt)) {
        throw ConfigError("correction intervals must be positive");
    }
}

std::vector<StateVector> random_logical_states(const StabilizerCode &code, uint64_t seed, size_t count) {
    RngStream rng(derive_seed(seed, 17), 0);
    std::vector<StateVector> out;
    for (size_t k = 0; k < count; k++) {
        double theta = std::numbers::pi * rng.uniform();
        double phi = 2 * std::numbers::pi * rng.uniform();
        out.push_back(encode(std::cos(theta / 2), std::polar(std::sin(theta / 2), phi), code));
    }
    return out;
}

std::optional<CorrelationKernel> kernel_for(const NoiseConfig &n, int num_qubits) {
    if (n.kind == "independent") {
        return CorrelationKernel::independent(num_qubits, n.amplitude, n.tau_c, n.coupling);
    }
    if (n.kind == "collective") {
        return CorrelationKernel::collective(num_qubits, n.amplitude, n.axis, n.tau_c, n.coupling);
    }
    if (n.kind == "exponential") {
        return CorrelationKernel::exponential(num_qubits, n.amplitude, n.correlation_length, n.tau_c, n.coupling);
    }
    if (n.kind == "cross_axis") {
        if (n.axis_block.rows() != 3 || n.axis_block.cols() != 3) {
            throw ConfigError("noise.axis_block must be 3x3");
        }
        return CorrelationKernel::cross_axis(num_qubits, n.axis_block, n.tau_c, n.coupling);
    }
    if (n.kind == "table") {
        return CorrelationKernel::from_table(num_qubits, n.table, n.tau_c, n.coupling);
    }
    return std::nullopt;
}

NoiseSpec normalized(const NoiseSpec &spec, bool normalize) {
    if (!normalize) {
        return spec;
    }
    double top = spec.max_rate();
    return top > 0 ? spec.scaled(1.0 / top) : spec;
}

}  // namespace

std::string engine_name(Engine engine) {
    return engine == Engine::Density ? "density" : "trajectory";
}

Engine parse_engine(const std::string &name) {
    if (name == "density") {
        return Engine::Density;
    }
    if (name == "trajectory") {
        return Engine::Trajectory;
    }
    throw ConfigError("engine must be 'density' or 'trajectory'; got '" + name + "'");
}

ExperimentConfig default_config() {
    return ExperimentConfig{};
}

ExperimentConfig parse_config(const std::string &json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error &e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    ExperimentConfig cfg;
    try {
        reject_unknown_keys(
            j,
            {"noise", "code", "logical_state", "T0", "N_values", "delta_t_values", "M", "base_seed", "engine",
             "dt_integrator", "trajectory_substeps", "no_jump_mode", "correction"},
            "config");
        if (j.contains("noise")) {
            cfg.noise = parse_noise(j["noise"]);
        }
        cfg.code = j.value("code", cfg.code);
        if (j.contains("logical_state")) {
            const json &ls = j["logical_state"];
            if (!ls.is_array() || ls.size() != 2) {
                throw ConfigError("logical_state must be [[re, im], [re, im]]");
            }
            cfg.alpha = parse_complex(ls[0], "logical_state[0]");
            cfg.beta = parse_complex(ls[1], "logical_state[1]");
        }
        cfg.t0 = j.value("T0", cfg.t0);
        if (j.contains("N_values")) {
            cfg.n_values = j["N_values"].get<std::vector<int>>();
        }
        if (j.contains("delta_t_values")) {
            cfg.delta_t_values = j["delta_t_values"].get<std::vector<double>>();
        }
        if (j.contains("M")) {
            auto m = j["M"].get<int64_t>();
            if (m < 0) {
                throw ConfigError("M must be nonnegative");
            }
            cfg.trajectories = static_cast<size_t>(m);
        }
        cfg.base_seed = j.value("base_seed", cfg.base_seed);
        if (j.contains("engine")) {
            cfg.engine = parse_engine(j["engine"].get<std::string>());
        }
        cfg.dt_integrator = j.value("dt_integrator", cfg.dt_integrator);
        cfg.trajectory_substeps = j.value("trajectory_substeps", cfg.trajectory_substeps);
        if (j.contains("no_jump_mode")) {
            std::string mode = j["no_jump_mode"].get<std::string>();
            if (mode == "first_order") {
                cfg.no_jump_mode = NoJumpMode::FirstOrder;
            } else if (mode == "exact") {
                cfg.no_jump_mode = NoJumpMode::Exact;
            } else {
                throw ConfigError("no_jump_mode must be 'first_order' or 'exact'");
            }
        }
        cfg.correction = j.value("correction", cfg.correction);
    } catch (const json::exception &e) {
        throw ConfigError(std::string("config has a wrongly typed value: ") + e.what());
    }

    if (!(cfg.t0 > 0)) {
        throw ConfigError("T0 must be positive");
    }
    for (int n : cfg.n_values) {
        if (n < 1) {
            throw ConfigError("N_values must be positive integers");
        }
    }
    for (double dt : cfg.delta_t_values) {
        check_interval(dt);
    }
    if (cfg.trajectory_substeps < 1) {
        throw ConfigError("trajectory_substeps must be at least 1");
    }
    return cfg;
}

ExperimentConfig load_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string config_to_json(const ExperimentConfig &cfg) {
    json j;
    j["noise"] = noise_to_json(cfg.noise);
    j["code"] = cfg.code;
    j["logical_state"] = json::array({complex_to_json(cfg.alpha), complex_to_json(cfg.beta)});
    j["T0"] = cfg.t0;
    j["N_values"] = cfg.n_values;
    j["delta_t_values"] = cfg.delta_t_values;
    j["M"] = cfg.trajectories;
    j["base_seed"] = cfg.base_seed;
    j["engine"] = engine_name(cfg.engine);
    j["dt_integrator"] = cfg.dt_integrator;
    j["trajectory_substeps"] = cfg.trajectory_substeps;
    j["no_jump_mode"] = cfg.no_jump_mode == NoJumpMode::Exact ? "exact" : "first_order";
    j["correction"] = cfg.correction;
    return j.dump(2);
}

int noise_num_qubits(const ExperimentConfig &cfg) {
    int code_qubits = 0;
    try {
        code_qubits = code_by_name(cfg.code).num_physical();
    } catch (const DomainError &e) {
        throw ConfigError(e.what());
    }
    int declared = cfg.noise.num_qubits;
    if (cfg.noise.kind == "direct" && cfg.noise.a.rows() > 0) {
        int from_matrix = static_cast<int>(cfg.noise.a.rows() / 3);
        if (declared != 0 && declared != from_matrix) {
            throw ConfigError("noise.num_qubits disagrees with the size of noise.A");
        }
        declared = from_matrix;
    }
    if (declared != 0 && declared != code_qubits) {
        throw ConfigError(
            "noise acts on " + std::to_string(declared) + " qubits but code '" + cfg.code + "' has " +
            std::to_string(code_qubits));
    }
    return code_qubits;
}

NoiseSpec build_noise_spec(const NoiseConfig &noise, int num_qubits) {
    if (noise.kind == "direct") {
        ComplexMatrix b = noise.b.size() != 0 ? noise.b : ComplexMatrix::Zero(noise.a.rows(), noise.a.cols());
        return NoiseSpec::direct(noise.a, b, num_qubits);
    }
    std::optional<CorrelationKernel> kernel = kernel_for(noise, num_qubits);
    if (!kernel) {
        throw ConfigError("unknown noise kind '" + noise.kind + "'");
    }
    return integrate_kernel(*kernel);
}

NoiseSpec build_noise_spec(const ExperimentConfig &cfg) {
    return normalized(build_noise_spec(cfg.noise, noise_num_qubits(cfg)), cfg.noise.normalize_rates);
}

FitResult fit_log_log(const std::vector<double> &x, const std::vector<double> &y) {
    FitResult fit;
    std::vector<double> lx;
    std::vector<double> ly;
    for (size_t k = 0; k < std::min(x.size(), y.size()); k++) {
        if (x[k] > 0 && y[k] > 0 && std::isfinite(y[k])) {
            lx.push_back(std::log(x[k]));
            ly.push_back(std::log(y[k]));
        }
    }
    fit.points = lx.size();
    if (lx.size() < 5) {
        fit.note = "fewer than 5 points with positive infidelity";
        return fit;
    }
    double n = static_cast<double>(lx.size());
    double mx = 0;
    double my = 0;
    for (size_t k = 0; k < lx.size(); k++) {
        mx += lx[k];
        my += ly[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0;
    double sxy = 0;
    for (size_t k = 0; k < lx.size(); k++) {
        sxx += (lx[k] - mx) * (lx[k] - mx);
        sxy += (lx[k] - mx) * (ly[k] - my);
    }
    if (sxx == 0) {
        fit.note = "all abscissae are equal";
        return fit;
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double rss = 0;
    for (size_t k = 0; k < lx.size(); k++) {
        double r = ly[k] - (fit.intercept + fit.slope * lx[k]);
        rss += r * r;
    }
    fit.slope_stderr = std::sqrt(rss / (n - 2) / sxx);
    fit.valid = true;
    return fit;
}

FidelityResult run_cycle_fidelity(const ExperimentConfig &cfg) {
    auto start = std::chrono::steady_clock::now();
    if (cfg.delta_t_values.empty()) {
        throw ConfigError("delta_t_values is empty");
    }
    Setup setup = make_setup(cfg);
    FidelityResult result;
    result.engine = cfg.engine;
    result.trajectories = cfg.engine == Engine::Trajectory ? cfg.trajectories : 0;
    result.seed = cfg.base_seed;
    result.correction = cfg.correction;
    std::vector<double> xs;
    std::vector<double> ys;
    for (size_t k = 0; k < cfg.delta_t_values.size(); k++) {
        double dt = cfg.delta_t_values[k];
        check_interval(dt);
        CycleRow row{dt, 0, 0, 0};
        if (cfg.engine == Engine::Density) {
            row.fidelity = density_fidelity(setup, cfg, dt, 1);
        } else {
            MeanEstimate est = trajectory_fidelity(setup, cfg, dt, 1, derive_seed(cfg.base_seed, k));
            row.fidelity = est.mean;
            row.std_error = est.std_error;
        }
        row.infidelity = 1.0 - row.fidelity;
        result.cycle_rows.push_back(row);
        xs.push_back(dt);
        ys.push_back(row.infidelity);
    }
    result.fit = fit_log_log(xs, ys);
    result.wall_seconds = elapsed_seconds(start);
    return result;
}

FidelityResult run_repetition_scaling(const ExperimentConfig &cfg) {
    auto start = std::chrono::steady_clock::now();
    if (cfg.n_values.empty()) {
        throw ConfigError("N_values is empty");
    }
    Setup setup = make_setup(cfg);
    FidelityResult result;
    result.engine = cfg.engine;
    result.trajectories = cfg.engine == Engine::Trajectory ? cfg.trajectories : 0;
    result.seed = cfg.base_seed;
    result.correction = cfg.correction;
    std::vector<double> xs;
    std::vector<double> ys;
    for (size_t k = 0; k < cfg.n_values.size(); k++) {
        int n = cfg.n_values[k];
        if (n < 1) {
            throw ConfigError("N_values must be positive integers");
        }
        double dt = cfg.t0 / n;
        ScalingRow row{n, dt, 0, 0, 0};
        if (cfg.engine == Engine::Density) {
            row.final_fidelity = density_fidelity(setup, cfg, dt, n);
        } else {
            MeanEstimate est = trajectory_fidelity(setup, cfg, dt, n, derive_seed(cfg.base_seed, 1000 + k));
            row.final_fidelity = est.mean;
            row.std_error = est.std_error;
        }
        row.final_infidelity = 1.0 - row.final_fidelity;
        result.scaling_rows.push_back(row);
        xs.push_back(n);
        ys.push_back(row.final_infidelity);
    }
    result.fit = fit_log_log(xs, ys);
    result.wall_seconds = elapsed_seconds(start);
    return result;
}

std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

namespace {

void write_fit_trailer(std::ostream &out, const FidelityResult &r, const char *x_name, const char *y_name) {
    out << "# correction," << (r.correction ? "on" : "off") << "\n";
    out << "# fit,log(" << y_name << ") vs log(" << x_name << ")\n";
    if (r.fit.valid) {
        out << "# slope," << format_double(r.fit.slope) << "\n";
        out << "# slope_stderr," << format_double(r.fit.slope_stderr) << "\n";
        out << "# fit_points," << r.fit.points << "\n";
    } else {
        out << "# fit_skipped," << r.fit.note << "\n";
    }
}

}  // namespace

void write_cycle_csv(std::ostream &out, const FidelityResult &result) {
    out << "delta_t,fidelity,infidelity,engine,M,seed\n";
    for (const CycleRow &row : result.cycle_rows) {
        out << format_double(row.delta_t) << "," << format_double(row.fidelity) << ","
            << format_double(row.infidelity) << "," << engine_name(result.engine) << "," << result.trajectories
            << "," << result.seed << "\n";
    }
    write_fit_trailer(out, result, "delta_t", "infidelity");
}

void write_scaling_csv(std::ostream &out, const FidelityResult &result) {
    out << "N,delta_t,final_fidelity,final_infidelity,engine,M,seed\n";
    for (const ScalingRow &row : result.scaling_rows) {
        out << row.n << "," << format_double(row.delta_t) << "," << format_double(row.final_fidelity) << ","
            << format_double(row.final_infidelity) << "," << engine_name(result.engine) << "," << result.trajectories
            << "," << result.seed << "\n";
    }
    write_fit_trailer(out, result, "N", "final_infidelity");
}

void write_snapshot_csv(std::ostream &out, const std::vector<Snapshot> &snapshots) {
    out << "time,fidelity_to_initial,trace,purity\n";
    for (const Snapshot &s : snapshots) {
        out << format_double(s.time) << "," << format_double(s.fidelity_to_initial) << "," << format_double(s.trace)
            << "," << format_double(s.purity) << "\n";
    }
}

std::vector<TrajectoryRecord> run_trajectories(const ExperimentConfig &cfg) {
    if (cfg.delta_t_values.empty()) {
        throw ConfigError("delta_t_values is empty");
    }
    Setup setup = make_setup(cfg);
    double step = cfg.delta_t_values.front() / std::max(1, cfg.trajectory_substeps);
    TrajectoryStepper stepper(setup.channels, step, cfg.no_jump_mode);
    int steps = 0;
    try {
        steps = whole_steps(cfg.t0, step);
    } catch (const DomainError &e) {
        throw ConfigError(e.what());
    }
    std::vector<std::optional<TrajectoryRecord>> slots(cfg.trajectories);
    parallel_for(cfg.trajectories, [&](size_t k) {
        RngStream rng(cfg.base_seed, k);
        TrajectoryState state{setup.psi, 0.0, {}};
        stepper.advance(state, steps, rng);
        slots[k] = TrajectoryRecord{k, std::move(state)};
    });
    std::vector<TrajectoryRecord> out;
    out.reserve(slots.size());
    for (auto &slot : slots) {
        out.push_back(std::move(*slot));
    }
    return out;
}

void write_jump_log_csv(std::ostream &out, const std::vector<TrajectoryRecord> &records) {
    out << "trajectory_index,t,channel_n\n";
    for (const TrajectoryRecord &rec : records) {
        for (const JumpEvent &ev : rec.state.jump_log) {
            out << rec.index << "," << format_double(ev.time) << "," << ev.channel << "\n";
        }
    }
}

bool ValidationReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck &c) { return c.passed; });
}

ValidationReport run_validation_suite(const ExperimentConfig &cfg) {
    ValidationReport report;
    auto add = [&](std::string name, bool passed, double measured, double threshold, std::string detail) {
        report.checks.push_back(ValidationCheck{std::move(name), passed, measured, threshold, std::move(detail)});
    };

    const StabilizerCode &code = code_by_name(cfg.code);
    std::vector<StateVector> states{
        code.logical_zero(), code.logical_one(),
        StateVector(code.num_physical(), code.logical_zero().amplitudes() + code.logical_one().amplitudes())};
    for (StateVector &s : random_logical_states(code, cfg.base_seed, 10)) {
        states.push_back(std::move(s));
    }

    // Orthonormality of the single-qubit error images on the code space.
    double gram_dev = 0;
    for (const StateVector &psi : states) {
        ComplexMatrix g = error_gram_matrix(psi, code);
        gram_dev = std::max(gram_dev, max_abs(g - ComplexMatrix::Identity(g.rows(), g.cols())));
    }
    add("code_gram_orthonormal", gram_dev <= 1e-10, gram_dev, 1e-10, "13 logical states");

    // Every single-qubit error on every test state is undone by one correction cycle.
    double worst = 0;
    RngStream rng(derive_seed(cfg.base_seed, 23), 0);
    for (size_t s = 3; s < states.size(); s++) {
        for (size_t n = 1; n < code.num_errors(); n++) {
            StateVector damaged(code.num_physical(), code.error_basis()[n] * states[s].amplitudes());
            StateVector fixed = recover(measure_syndrome(damaged, code, rng), code);
            worst = std::max(worst, 1.0 - states[s].fidelity(fixed));
        }
    }
    add("recovery_exhaustive", worst <= 1e-9, worst, 1e-9, "15 errors x 10 random logical states");

    std::optional<NoiseSpec> spec;
    try {
        spec = build_noise_spec(cfg);
        add("noise_spec_valid", true, 0, 0, "A Hermitian PSD, B Hermitian");
    } catch (const DomainError &e) {
        add("noise_spec_valid", false, 0, 0, e.what());
        return report;
    }
    JumpChannelSet channels = build_channels(*spec);

    {
        Eigen::Index n = spec->a().rows();
        Eigen::VectorXd xi(n);
        for (Eigen::Index k = 0; k < n; k++) {
            xi[k] = channels.rates[static_cast<size_t>(k)];
        }
        double recon = max_abs(channels.mixing.adjoint() * xi.asDiagonal() * channels.mixing - spec->a());
        double row_norm = 0;
        for (Eigen::Index k = 0; k < n; k++) {
            row_norm = std::max(row_norm, std::abs(channels.mixing.row(k).squaredNorm() - 1.0));
        }
        ComplexMatrix anti = (channels.h_eff - channels.h_eff.adjoint()) / Complex(0, 2);
        ComplexMatrix sum = ComplexMatrix::Zero(channels.h_eff.rows(), channels.h_eff.cols());
        for (size_t c = 0; c < channels.num_channels(); c++) {
            sum += channels.rates[c] * (channels.jump_ops[c].adjoint() * channels.jump_ops[c]);
        }
        double damping = max_abs(-2.0 * anti - sum);
        double worst_inv = std::max({recon, row_norm, damping});
        add("channel_invariants", worst_inv <= 1e-9, worst_inv, 1e-9,
            "A = U^dag diag(xi) U; unit rows of U; -2 Im H_eff = sum xi s^dag s");
    }

    StateVector psi = encode(cfg.alpha, cfg.beta, code);
    {
        int substeps = std::max(1, cfg.trajectory_substeps);
        std::vector<double> steps;
        for (double dt : cfg.delta_t_values) {
            steps.push_back(dt / substeps);
        }
        for (int n : cfg.n_values) {
            steps.push_back(cfg.t0 / n / substeps);
        }
        double worst_total = 0;
        double worst_step = 0;
        for (double step : steps) {
            double total = step * psi.amplitudes().dot(channels.damping * psi.amplitudes()).real();
            if (total > worst_total) {
                worst_total = total;
                worst_step = step;
            }
        }
        std::ostringstream detail;
        detail << "largest total jump probability at trajectory step " << worst_step;
        add("first_order_gate", worst_total <= kFirstOrderGate, worst_total, kFirstOrderGate, detail.str());
    }

    double top = channels.max_rate();
    if (top == 0) {
        add("first_order_channel_order", true, 4, 4, "noiseless spec, channel is exact");
        add("unraveling_consistency", true, 0, 0.02, "noiseless spec, trivially exact");
        return report;
    }

    {
        DensityMatrix rho0(psi);
        double dt = 0.01 / top;
        double errs[2];
        for (int k = 0; k < 2; k++) {
            double step = dt / (1 << k);
            DensityMatrix approx = apply_first_order_channel(rho0, build_first_order_channel(psi, channels, step));
            DensityMatrix exact = evolve_for(rho0, channels, step, cfg.dt_integrator);
            errs[k] = (approx.matrix() - exact.matrix()).norm();
        }
        double ratio = errs[0] / errs[1];
        bool ok = ratio >= 3.5 && ratio <= 4.5;
        add("first_order_channel_order", ok, ratio, 4.0, "Frobenius error ratio under dt halving, expected 4 +/- 0.5");
    }

    {
        std::optional<CorrelationKernel> kernel;
        int small_l = 2;
        std::optional<NoiseSpec> small_spec;
        if (cfg.noise.kind != "direct" && cfg.noise.kind != "table") {
            kernel = kernel_for(cfg.noise, small_l);
            small_spec = normalized(integrate_kernel(*kernel), true);
        } else if (spec->num_qubits() <= 3) {
            small_spec = normalized(*spec, true);
            small_l = spec->num_qubits();
        }
        if (!small_spec) {
            add("unraveling_consistency", true, 0, 0.02, "skipped: explicit spec on more than 3 qubits");
        } else {
            JumpChannelSet small = build_channels(*small_spec);
            auto dim = static_cast<Eigen::Index>(hilbert_dim(small_l));
            ComplexVector amps(dim);
            RngStream state_rng(derive_seed(cfg.base_seed, 29), 0);
            for (Eigen::Index k = 0; k < dim; k++) {
                amps[k] = std::polar(0.5 + state_rng.uniform(), 2 * std::numbers::pi * state_rng.uniform());
            }
            StateVector psi0(small_l, amps);
            double t = 1.0;
            double step = 1e-3;
            size_t m = std::max<size_t>(cfg.trajectories, 10000);
            DensityMatrix mc = simulate_ensemble(psi0, small, t, step, m, derive_seed(cfg.base_seed, 31));
            DensityMatrix exact = evolve_for(DensityMatrix(psi0), small, t);
            double td = trace_distance(mc, exact);
            std::ostringstream detail;
            detail << small_l << "-qubit " << cfg.noise.kind << " spec, M = " << m << ", xi_max t = 1";
            add("unraveling_consistency", td <= 0.02, td, 0.02, detail.str());
        }
    }
    return report;
}

void write_validation_csv(std::ostream &out, const ValidationReport &report) {
    out << "check,status,measured,threshold,detail\n";
    for (const ValidationCheck &c : report.checks) {
        std::string detail = c.detail;
        std::replace(detail.begin(), detail.end(), ',', ';');
        out << c.name << "," << (c.passed ? "pass" : "fail") << "," << format_double(c.measured) << ","
            << format_double(c.threshold) << "," << detail << "\n";
    }
}

}  // namespace corrqec
