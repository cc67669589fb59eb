#include "stirap/runner.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <iostream>
#include <optional>

using namespace stirap;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfigError = 2, kNumericalError = 3 };

struct Overrides {
    std::string config_path;
    std::vector<int> n_atoms;
    std::optional<double> sigma_us;
    std::optional<double> dt_us;
    std::optional<double> tau_us;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> cd;
    bool force = false;
};

runner::ExperimentConfig resolve(const Overrides& o) {
    runner::ExperimentConfig c = o.config_path.empty() ? runner::ExperimentConfig{} : runner::load_config(o.config_path);
    if (!o.n_atoms.empty()) c.atom_numbers = o.n_atoms;
    if (o.sigma_us) c.schedule.sigma = *o.sigma_us;
    if (o.dt_us) c.dt_us = *o.dt_us;
    if (o.tau_us) c.tau_us = *o.tau_us;
    if (o.out) c.output_dir = *o.out;
    if (o.seed) c.seed = *o.seed;
    if (o.cd) c.counterdiabatic = *o.cd == "on";
    return c;
}

void add_common(CLI::App* sub, Overrides& o) {
    sub->add_option("--config", o.config_path, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--n-atoms", o.n_atoms, "atom numbers (overrides atom_numbers)")->delimiter(',');
    sub->add_option("--sigma-us", o.sigma_us, "pulse half-duration sigma in us");
    sub->add_option("--dt-us", o.dt_us, "output grid spacing in us");
    sub->add_option("--tau-us", o.tau_us, "integration window for the work scaling in us");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--seed", o.seed, "seed for randomized self-checks");
    sub->add_flag("--force", o.force, "rerun even if a complete manifest exists");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Collective Rydberg STIRAP: spectra, dynamics and criticality diagnostics"};
    app.set_version_flag("--version", runner::library_version());
    app.require_subcommand(1);

    Overrides o;
    CLI::App* spectrum = app.add_subcommand("spectrum", "instantaneous spectrum, dark-state gap and its N scaling");
    CLI::App* evolve = app.add_subcommand("evolve", "Schroedinger evolution, dark-state fidelity and spin variances");
    CLI::App* criticality =
        app.add_subcommand("criticality", "rate of change, work fluctuations, susceptibility and its collapse");
    for (CLI::App* sub : {spectrum, evolve, criticality}) {
        add_common(sub, o);
    }
    evolve->add_option("--cd", o.cd, "counterdiabatic run alongside the plain one")
        ->check(CLI::IsMember({"on", "off"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        const runner::ExperimentConfig config = resolve(o);
        runner::RunResult result;
        if (spectrum->parsed()) {
            result = runner::run_spectrum(config, o.force);
        } else if (evolve->parsed()) {
            result = runner::run_evolve(config, o.force);
        } else {
            result = runner::run_criticality(config, o.force);
        }
        if (result.skipped) {
            std::cout << "complete run found at " << result.manifest.string() << "; use --force to rerun\n";
            return kOk;
        }
        for (const auto& a : result.artifacts) {
            std::cout << a.name << "  " << a.bytes << " bytes\n";
        }
        for (const auto& t : result.timings) {
            std::printf("stage %-20s %8.2f s\n", t.stage.c_str(), t.seconds);
        }
        std::cout << "manifest " << result.manifest.string() << '\n';
        return kOk;
    } catch (const InvalidArgument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumericalError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
}
