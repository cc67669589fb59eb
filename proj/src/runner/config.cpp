#include "stirap/runner.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace stirap::runner {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) {
        throw ConfigError(where + " must be an object");
    }
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.contains(key)) {
            throw ConfigError("unknown config key: " + where + "." + key);
        }
    }
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
    if (!obj.contains(key)) {
        return;
    }
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

void read_atoms(const json& obj, const char* key, std::vector<int>& out, const std::string& where) {
    if (!obj.contains(key)) {
        return;
    }
    const json& v = obj.at(key);
    if (v.is_number_integer()) {
        out = {v.get<int>()};
        return;
    }
    read(obj, key, out, where);
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    reject_unknown(root,
                   {"schedule", "atom_numbers", "grid", "tau_us", "tolerances", "collapse", "output_dir", "seed",
                    "plots", "counterdiabatic", "identity_samples"},
                   "config");

    ExperimentConfig c;
    if (root.contains("schedule")) {
        const json& s = root.at("schedule");
        reject_unknown(s, {"omega_max_1", "omega_max_r", "sigma_us", "t_start_r_us", "t_start_1_us"}, "schedule");
        read(s, "omega_max_1", c.schedule.omega_max_1, "schedule");
        read(s, "omega_max_r", c.schedule.omega_max_r, "schedule");
        read(s, "sigma_us", c.schedule.sigma, "schedule");
        read(s, "t_start_r_us", c.schedule.t_start_r, "schedule");
        read(s, "t_start_1_us", c.schedule.t_start_1, "schedule");
    }
    read_atoms(root, "atom_numbers", c.atom_numbers, "config");
    if (root.contains("grid")) {
        const json& g = root.at("grid");
        reject_unknown(g, {"dt_us"}, "grid");
        read(g, "dt_us", c.dt_us, "grid");
    }
    read(root, "tau_us", c.tau_us, "config");
    if (root.contains("tolerances")) {
        const json& t = root.at("tolerances");
        reject_unknown(t,
                       {"refine_tol_us", "scan_points", "max_substep_us", "local_tol", "gap_floor", "epsilon_scale_us",
                        "work_rel_tol", "susceptibility_rel_tol"},
                       "tolerances");
        Tolerances& tol = c.tolerances;
        read(t, "refine_tol_us", tol.refine_tol_us, "tolerances");
        read(t, "scan_points", tol.scan_points, "tolerances");
        read(t, "max_substep_us", tol.max_substep_us, "tolerances");
        read(t, "local_tol", tol.local_tol, "tolerances");
        read(t, "gap_floor", tol.gap_floor, "tolerances");
        read(t, "epsilon_scale_us", tol.epsilon_scale_us, "tolerances");
        read(t, "work_rel_tol", tol.work_rel_tol, "tolerances");
        read(t, "susceptibility_rel_tol", tol.susceptibility_rel_tol, "tolerances");
    }
    if (root.contains("collapse")) {
        const json& k = root.at("collapse");
        reject_unknown(k, {"atom_numbers", "half_window", "points"}, "collapse");
        read_atoms(k, "atom_numbers", c.collapse.atom_numbers, "collapse");
        read(k, "half_window", c.collapse.half_window, "collapse");
        read(k, "points", c.collapse.points, "collapse");
    }
    read(root, "output_dir", c.output_dir, "config");
    read(root, "seed", c.seed, "config");
    read(root, "plots", c.plots, "config");
    read(root, "counterdiabatic", c.counterdiabatic, "config");
    read(root, "identity_samples", c.identity_samples, "config");
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string dump_config(const ExperimentConfig& c) {
    const Tolerances& t = c.tolerances;
    json j = {
        {"schedule",
         {{"omega_max_1", c.schedule.omega_max_1},
          {"omega_max_r", c.schedule.omega_max_r},
          {"sigma_us", c.schedule.sigma},
          {"t_start_r_us", c.schedule.t_start_r},
          {"t_start_1_us", c.schedule.t_start_1}}},
        {"atom_numbers", c.atom_numbers},
        {"grid", {{"dt_us", c.dt_us}}},
        {"tau_us", c.tau_us},
        {"tolerances",
         {{"refine_tol_us", t.refine_tol_us},
          {"scan_points", t.scan_points},
          {"max_substep_us", t.max_substep_us},
          {"local_tol", t.local_tol},
          {"gap_floor", t.gap_floor},
          {"epsilon_scale_us", t.epsilon_scale_us},
          {"work_rel_tol", t.work_rel_tol},
          {"susceptibility_rel_tol", t.susceptibility_rel_tol}}},
        {"collapse",
         {{"atom_numbers", c.collapse.atom_numbers},
          {"half_window", c.collapse.half_window},
          {"points", c.collapse.points}}},
        {"output_dir", c.output_dir},
        {"seed", c.seed},
        {"plots", c.plots},
        {"counterdiabatic", c.counterdiabatic},
        {"identity_samples", c.identity_samples},
    };
    return j.dump(2);
}

void validate(const ExperimentConfig& c) {
    try {
        c.schedule.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    auto check_atoms = [](const std::vector<int>& ns, const char* what) {
        if (ns.empty()) {
            throw ConfigError(std::string(what) + " must not be empty");
        }
        for (int n : ns) {
            if (n < 1) {
                throw ConfigError(std::string(what) + " entries must be >= 1");
            }
        }
        std::vector<int> sorted = ns;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw ConfigError(std::string(what) + " entries must be distinct");
        }
    };
    check_atoms(c.atom_numbers, "atom_numbers");
    check_atoms(c.collapse.atom_numbers, "collapse.atom_numbers");
    if (c.collapse.atom_numbers.size() < 3) {
        throw ConfigError("collapse.atom_numbers needs at least three entries");
    }
    if (!(c.dt_us > 0.0) || !std::isfinite(c.dt_us)) {
        throw ConfigError("grid.dt_us must be positive");
    }
    if (c.dt_us > c.schedule.duration()) {
        throw ConfigError("grid.dt_us exceeds the pulse duration");
    }
    if (!(c.tau_us > 0.0) || !std::isfinite(c.tau_us)) {
        throw ConfigError("tau_us must be positive");
    }
    if (c.tau_us < c.schedule.duration() - 1e-9) {
        throw ConfigError("tau_us must cover both pulses (>= duration of the schedule)");
    }
    const Tolerances& t = c.tolerances;
    if (!(t.refine_tol_us > 0.0) || t.scan_points < 3 || !(t.max_substep_us > 0.0) || !(t.local_tol > 0.0) ||
        !(t.gap_floor > 0.0) || !(t.epsilon_scale_us > 0.0) || !(t.work_rel_tol > 0.0) ||
        !(t.susceptibility_rel_tol > 0.0)) {
        throw ConfigError("tolerances must be positive (scan_points >= 3)");
    }
    if (!(c.collapse.half_window > 0.0) || c.collapse.points < 3) {
        throw ConfigError("collapse.half_window must be positive and collapse.points >= 3");
    }
    if (c.output_dir.empty()) {
        throw ConfigError("output_dir must not be empty");
    }
    if (c.identity_samples < 1) {
        throw ConfigError("identity_samples must be >= 1");
    }
}

std::vector<double> time_grid(const ExperimentConfig& c) {
    const double a = c.schedule.begin();
    const double span = c.schedule.duration();
    const auto n = static_cast<std::size_t>(std::ceil(span / c.dt_us - 1e-9));
    std::vector<double> times(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        times[i] = a + span * static_cast<double>(i) / static_cast<double>(n);
    }
    return times;
}

}  // namespace stirap::runner
