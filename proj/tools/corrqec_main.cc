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

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "corrqec/experiment.h"

namespace {

enum ExitCode { kOk = 0, kConfigFailure = 1, kNumericalFailure = 2, kValidationFailure = 3 };

struct Options {
    std::string config_path;
    std::string out_path;
    std::optional<uint64_t> seed;
    std::optional<std::string> engine;
    std::optional<size_t> trajectories;
    bool no_correction = false;
    double evolve_time = 0;
    int record_every = 100;
};

corrqec::ExperimentConfig resolve_config(const Options &opt) {
    corrqec::ExperimentConfig cfg =
        opt.config_path.empty() ? corrqec::default_config() : corrqec::load_config(opt.config_path);
    if (opt.seed) {
        cfg.base_seed = *opt.seed;
    }
    if (opt.engine) {
        cfg.engine = corrqec::parse_engine(*opt.engine);
    }
    if (opt.trajectories) {
        cfg.trajectories = *opt.trajectories;
    }
    if (opt.no_correction) {
        cfg.correction = false;
    }
    return cfg;
}

// Output is assembled in memory so a failed run never leaves a truncated file behind.
void emit(const Options &opt, const std::string &text) {
    if (opt.out_path.empty() || opt.out_path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(opt.out_path, std::ios::binary);
    if (!out) {
        throw corrqec::ConfigError("cannot write output file '" + opt.out_path + "'");
    }
    out << text;
}

void report_fit(const char *label, const corrqec::FidelityResult &r) {
    std::cerr << label << ": engine=" << corrqec::engine_name(r.engine) << " M=" << r.trajectories;
    if (r.fit.valid) {
        std::cerr << " slope=" << r.fit.slope << " +/- " << r.fit.slope_stderr;
    } else {
        std::cerr << " fit skipped (" << r.fit.note << ")";
    }
    std::cerr << " wall=" << r.wall_seconds << "s\n";
}

int run_command(const std::string &command, const Options &opt) {
    corrqec::ExperimentConfig cfg = resolve_config(opt);
    std::ostringstream out;
    if (command == "cycle") {
        corrqec::FidelityResult r = corrqec::run_cycle_fidelity(cfg);
        corrqec::write_cycle_csv(out, r);
        emit(opt, out.str());
        report_fit("cycle", r);
    } else if (command == "scaling") {
        corrqec::FidelityResult r = corrqec::run_repetition_scaling(cfg);
        corrqec::write_scaling_csv(out, r);
        emit(opt, out.str());
        report_fit("scaling", r);
    } else if (command == "validate") {
        corrqec::ValidationReport report = corrqec::run_validation_suite(cfg);
        corrqec::write_validation_csv(out, report);
        emit(opt, out.str());
        for (const auto &c : report.checks) {
            if (!c.passed) {
                std::cerr << "validation check failed: " << c.name << " (measured " << c.measured << ", threshold "
                          << c.threshold << "): " << c.detail << "\n";
            }
        }
        return report.all_passed() ? kOk : kValidationFailure;
    } else if (command == "trajectories") {
        corrqec::write_jump_log_csv(out, corrqec::run_trajectories(cfg));
        emit(opt, out.str());
    } else if (command == "evolve") {
        corrqec::JumpChannelSet channels = corrqec::build_channels(corrqec::build_noise_spec(cfg));
        const corrqec::StabilizerCode &code = corrqec::code_by_name(cfg.code);
        corrqec::DensityMatrix rho0(corrqec::encode(cfg.alpha, cfg.beta, code));
        corrqec::EvolutionConfig ec;
        ec.dt_integrator = cfg.dt_integrator;
        ec.t_final = opt.evolve_time > 0 ? opt.evolve_time : cfg.t0;
        ec.record_every = opt.record_every;
        corrqec::write_snapshot_csv(out, corrqec::evolve_exact(rho0, channels, ec).snapshots);
        emit(opt, out.str());
    }
    return kOk;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Correlated-decoherence simulator with stabilizer error correction"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--config", opt.config_path, "JSON experiment config (defaults are used when omitted)");
        sub->add_option("--out", opt.out_path, "Output CSV path, '-' or omitted for stdout");
        sub->add_option("--seed", opt.seed, "Override base_seed");
        sub->add_option("--engine", opt.engine, "density or trajectory")
            ->check(CLI::IsMember({"density", "trajectory"}));
        sub->add_option("-M,--trajectories", opt.trajectories, "Override the trajectory count M");
        sub->add_flag("--no-correction", opt.no_correction, "Skip the correction step (control runs)");
    };

    std::vector<std::pair<const char *, const char *>> commands{
        {"cycle", "Per-cycle fidelity over delta_t_values"},
        {"scaling", "Final fidelity after N cycles over T0, for each N in N_values"},
        {"validate", "Run the invariant suite; exit 3 if any check fails"},
        {"trajectories", "Raw jump logs of M uncorrected trajectories over T0"},
        {"evolve", "Exact density-matrix evolution of the encoded state, as snapshots"},
    };
    for (const auto &[name, help] : commands) {
        CLI::App *sub = app.add_subcommand(name, help);
        add_common(sub);
        if (std::string(name) == "evolve") {
            sub->add_option("--time", opt.evolve_time, "Evolution time (default T0)");
            sub->add_option("--record-every", opt.record_every, "RK4 steps between snapshots");
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kConfigFailure;
    }

    std::string command = app.get_subcommands().front()->get_name();
    try {
        return run_command(command, opt);
    } catch (const corrqec::ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigFailure;
    } catch (const corrqec::DomainError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigFailure;
    } catch (const corrqec::StepSizeError &e) {
        std::cerr << "first-order gate violated: " << e.what() << "\n";
        return kNumericalFailure;
    } catch (const corrqec::NumericalError &e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumericalFailure;
    } catch (const corrqec::ResourceError &e) {
        std::cerr << "resource limit: " << e.what() << "\n";
        return kConfigFailure;
    }
}
