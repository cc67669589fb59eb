// Experiment configuration and the spectrum / evolve /
// criticality commands behind the stirap executable.

#pragma once

#include "stirap/errors.hpp"
#include "stirap/model.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace stirap::runner {

class ConfigError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

struct Tolerances {
    double refine_tol_us = 1e-4;
    int scan_points = 2000;
    double max_substep_us = 2e-3;
    double local_tol = 1e-11;
    double gap_floor = 1e-3;
    double epsilon_scale_us = 0.01;  // susceptibility eps = epsilon_scale_us / N
    double work_rel_tol = 1e-3;
    double susceptibility_rel_tol = 0.01;
};

struct CollapseSettings {
    std::vector<int> atom_numbers{50, 100, 150};
    double half_window = 4.0;  // x = N (t - t_N) range is [-half_window, half_window]
    int points = 401;
};

struct ExperimentConfig {
    PulseSchedule schedule = PulseSchedule::fast_default();
    std::vector<int> atom_numbers{10};
    double dt_us = 0.01;
    double tau_us = 4.1;
    Tolerances tolerances;
    CollapseSettings collapse;
    std::string output_dir = "out";
    std::uint64_t seed = 1;
    bool plots = true;
    bool counterdiabatic = false;
    int identity_samples = 100;
};

// JSON text to config; unknown keys and malformed values raise ConfigError.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string dump_config(const ExperimentConfig& config);

// All module preconditions that can be checked before any computation.
void validate(const ExperimentConfig& config);

// Uniform grid over the pulse support with spacing at most dt_us.
std::vector<double> time_grid(const ExperimentConfig& config);

struct Artifact {
    std::string name;
    std::string sha256;
    std::uintmax_t bytes = 0;
};

struct StageTiming {
    std::string stage;
    double seconds = 0.0;
};

struct RunResult {
    std::filesystem::path manifest;
    bool skipped = false;  // a complete manifest already existed
    std::vector<Artifact> artifacts;
    std::vector<StageTiming> timings;
};

RunResult run_spectrum(const ExperimentConfig& config, bool force);
RunResult run_evolve(const ExperimentConfig& config, bool force);
RunResult run_criticality(const ExperimentConfig& config, bool force);

std::string library_version();

}  // namespace stirap::runner
