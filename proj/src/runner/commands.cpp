#include "artifacts.hpp"

#include "stirap/criticality.hpp"
#include "stirap/dynamics.hpp"
#include "stirap/observables.hpp"
#include "stirap/parallel.hpp"
#include "stirap/spectral.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <random>

#ifndef STIRAP_VERSION
#define STIRAP_VERSION "0.0.0"
#endif

namespace stirap::runner {

namespace {

using clock = std::chrono::steady_clock;
using cd = std::complex<double>;

std::string tag(int n) { return "_N" + std::to_string(n); }

// Returns a result if a complete run with the same config is already on
// disk and force is off.
// With force, the stale manifest goes first so an interrupted rerun never
// looks complete.
std::optional<RunResult> previous_run(const ExperimentConfig& config, const std::string& command, bool force) {
    const auto manifest = std::filesystem::path(config.output_dir) / ("manifest_" + command + ".json");
    if (!std::filesystem::exists(manifest)) {
        return std::nullopt;
    }
    if (!force) {
        std::ifstream in(manifest);
        nlohmann::json previous;
        try {
            previous = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception&) {
            throw ConfigError(manifest.string() + " is unreadable; use --force to rerun");
        }
        if (previous.value("config", nlohmann::json()) != nlohmann::json::parse(dump_config(config))) {
            throw ConfigError(manifest.string() + " records a different config; use --force to rerun");
        }
        RunResult r;
        r.manifest = manifest;
        r.skipped = true;
        return r;
    }
    std::filesystem::remove(manifest);
    return std::nullopt;
}

std::string footer(const std::string& key, double v) { return key + "," + format_number(v); }

}  // namespace

std::string library_version() { return STIRAP_VERSION; }

RunResult run_spectrum(const ExperimentConfig& config, bool force) {
    validate(config);
    if (auto done = previous_run(config, "spectrum", force)) {
        return *done;
    }
    OutputSession session(config.output_dir, "spectrum");
    const std::vector<double> times = time_grid(config);
    const std::vector<int>& ns = config.atom_numbers;
    const GapSearchOptions search{config.tolerances.scan_points, config.tolerances.refine_tol_us};
    std::vector<GapProfile> profiles(ns.size());

    const auto started = clock::now();
    parallel_for(ns.size(), [&](std::size_t k) {
        const int n = ns[k];
        const HamiltonianOperator op(CollectiveBasis(n), config.schedule);

        CsvTable spectrum;
        spectrum.header.push_back("t_us");
        for (int i = 0; i <= 2 * n; ++i) {
            spectrum.header.push_back("eig_" + std::to_string(i) + "_rad_per_us");
        }
        CsvTable gap{{"t_us", "gap_rad_per_us"}, {}, {}};
        std::vector<PlotSeries> levels(static_cast<std::size_t>(2 * n + 1));
        PlotSeries gap_series{"N=" + std::to_string(n), {}, {}};
        for (double t : times) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.at(t), Eigen::EigenvaluesOnly);
            std::vector<double> row{t};
            for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
                row.push_back(es.eigenvalues()(i));
                levels[static_cast<std::size_t>(i)].x.push_back(t);
                levels[static_cast<std::size_t>(i)].y.push_back(es.eigenvalues()(i));
            }
            spectrum.rows.push_back(std::move(row));
            const double g = dark_gap(op, t);
            gap.rows.push_back({t, g});
            gap_series.x.push_back(t);
            gap_series.y.push_back(g);
        }
        profiles[k] = find_critical_time(op, overlap_window(config.schedule), search);
        gap.footer.push_back(footer("t_c_us", profiles[k].t_c));
        gap.footer.push_back(footer("gap_min_rad_per_us", profiles[k].gap_min));

        session.write("spectrum" + tag(n) + ".csv", spectrum.render());
        session.write("gap" + tag(n) + ".csv", gap.render());
        if (config.plots) {
            session.write("spectrum" + tag(n) + ".svg",
                          svg_line_plot("Spectrum, N=" + std::to_string(n), "t (us)", "E (rad/us)", levels));
            session.write("gap" + tag(n) + ".svg", svg_line_plot("Dark-state gap, N=" + std::to_string(n), "t (us)",
                                                                 "gap (rad/us)", {gap_series}));
        }
    });
    session.stage_done("spectra_and_gaps", started);

    const auto fit_started = clock::now();
    CsvTable scaling{{"N", "t_c_us", "gap_min_rad_per_us"}, {}, {}};
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k < ns.size(); ++k) {
        scaling.rows.push_back({static_cast<double>(ns[k]), profiles[k].t_c, profiles[k].gap_min});
        xs.push_back(ns[k]);
        ys.push_back(profiles[k].gap_min);
    }
    if (ns.size() >= 4) {
        const ScalingFit fit = fit_power_law(xs, ys);
        scaling.footer.push_back(footer("fit_exponent", fit.exponent));
        scaling.footer.push_back(footer("fit_prefactor", fit.prefactor));
        scaling.footer.push_back(footer("fit_log_residual", fit.residual));
        if (config.plots) {
            PlotSeries data{"gap_min", {}, {}}, line{"fit", {}, {}};
            for (std::size_t k = 0; k < xs.size(); ++k) {
                data.x.push_back(std::log(xs[k]));
                data.y.push_back(std::log(ys[k]));
                line.x.push_back(std::log(xs[k]));
                line.y.push_back(std::log(fit.prefactor) + fit.exponent * std::log(xs[k]));
            }
            session.write("gap_scaling.svg", svg_line_plot("Minimum gap scaling", "ln N", "ln gap_min", {data, line}));
        }
    } else {
        scaling.footer.push_back(footer("fit_exponent", std::numeric_limits<double>::quiet_NaN()));
        scaling.footer.push_back("fit_note,needs at least four atom numbers");
    }
    session.write("gap_scaling.csv", scaling.render());
    session.stage_done("gap_scaling", fit_started);
    return session.commit(config);
}

RunResult run_evolve(const ExperimentConfig& config, bool force) {
    validate(config);
    if (auto done = previous_run(config, "evolve", force)) {
        return *done;
    }
    OutputSession session(config.output_dir, "evolve");
    const std::vector<double> times = time_grid(config);
    PropagationControls controls;
    controls.max_substep = config.tolerances.max_substep_us;
    controls.local_tol = config.tolerances.local_tol;

    const auto started = clock::now();
    parallel_for(config.atom_numbers.size(), [&](std::size_t k) {
        const int n = config.atom_numbers[k];
        const HamiltonianOperator op(CollectiveBasis(n), config.schedule);
        const auto path = track_dark_state(op, times);
        const auto init = QuantumState::from_real(path.front().dark_vector(), times.front());
        const Trajectory traj = propagate(op, init, times, controls);
        const std::vector<double> f = overlap_fidelity(traj, path);

        std::vector<double> f_cd;
        if (config.counterdiabatic) {
            const CounterdiabaticDrive drive(op, config.tolerances.gap_floor);
            f_cd = overlap_fidelity(propagate_counterdiabatic(drive, init, times, controls), path);
        }

        const SpinOperatorSet ops = build_spin_operators(op.basis());
        const VarianceSeries dynamic = variance_series(traj, ops);
        const VarianceSeries adiabatic = variance_series(path, ops);

        CsvTable fid{{"t_us", "F"}, {}, {}};
        if (config.counterdiabatic) {
            fid.header.push_back("F_cd");
        }
        for (std::size_t i = 0; i < times.size(); ++i) {
            std::vector<double> row{times[i], f[i]};
            if (config.counterdiabatic) {
                row.push_back(f_cd[i]);
            }
            fid.rows.push_back(std::move(row));
        }
        fid.footer.push_back(footer("final_F", f.back()));
        fid.footer.push_back(footer("min_F", *std::min_element(f.begin(), f.end())));
        if (config.counterdiabatic) {
            fid.footer.push_back(footer("min_F_cd", *std::min_element(f_cd.begin(), f_cd.end())));
        }
        fid.footer.push_back(footer("norm_drift", traj.norm_drift()));

        CsvTable var{{"t_us", "var_jx_dynamic", "var_jx_adiabatic", "mean_nr", "n_eff"}, {}, {}};
        for (std::size_t i = 0; i < times.size(); ++i) {
            var.rows.push_back(
                {times[i], dynamic.var_jx[i], adiabatic.var_jx[i], dynamic.mean_nr[i], dynamic.n_eff[i]});
        }
        const auto sectors = sector_sum_rules(path.back().dark_vector().cast<cd>(), ops);
        for (const auto& s : sectors) {
            if (!s) continue;
            const std::string p = "final_adiabatic_nr" + std::to_string(s->n_r) + "_";
            var.footer.push_back(footer(p + "weight", s->weight));
            var.footer.push_back(footer(p + "spin_j", s->spin_j));
            var.footer.push_back(footer(p + "jy2_plus_jz2", s->jy2_plus_jz2));
            var.footer.push_back(footer(p + "casimir_residual", s->casimir_residual));
        }

        session.write("fidelity" + tag(n) + ".csv", fid.render());
        session.write("variances" + tag(n) + ".csv", var.render());
        if (config.plots) {
            std::vector<PlotSeries> fs{{"F", times, f}};
            if (config.counterdiabatic) {
                fs.push_back({"F with CD", times, f_cd});
            }
            session.write("fidelity" + tag(n) + ".svg",
                          svg_line_plot("Dark-state fidelity, N=" + std::to_string(n), "t (us)", "F", fs));
            session.write("variances" + tag(n) + ".svg",
                          svg_line_plot("Var(J_x), N=" + std::to_string(n), "t (us)", "Var(J_x)",
                                        {{"dynamic", times, dynamic.var_jx},
                                         {"adiabatic", times, adiabatic.var_jx}}));
        }
    });
    session.stage_done("propagation", started);
    return session.commit(config);
}

RunResult run_criticality(const ExperimentConfig& config, bool force) {
    validate(config);
    if (auto done = previous_run(config, "criticality", force)) {
        return *done;
    }
    OutputSession session(config.output_dir, "criticality");
    const std::vector<double> times = time_grid(config);
    const std::vector<int>& ns = config.atom_numbers;
    const Tolerances& tol = config.tolerances;

    auto started = clock::now();
    std::vector<WorkIntegral> integrals(ns.size());
    WorkIntegralOptions work_options;
    work_options.rel_tol = tol.work_rel_tol;
    work_options.gap_floor = tol.gap_floor;
    parallel_for(ns.size(), [&](std::size_t k) {
        const int n = ns[k];
        const HamiltonianOperator op(CollectiveBasis(n), config.schedule);
        const RateProfile prof = rate_profile(op, times, tol.gap_floor);
        CsvTable rate{{"t_us", "R_per_us", "work_fluct_per_us"}, {}, {}};
        double worst = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i) {
            rate.rows.push_back({times[i], prof.rate[i], prof.work_fluct[i]});
            if (prof.rate[i] > 0.0) {
                worst = std::max(worst, std::abs(prof.rate[i] - prof.work_fluct[i]) / prof.rate[i]);
            }
        }
        rate.footer.push_back(footer("max_rel_identity_deviation", worst));
        session.write("rate" + tag(n) + ".csv", rate.render());
        if (config.plots) {
            session.write("rate" + tag(n) + ".svg", svg_line_plot("Rate of change, N=" + std::to_string(n), "t (us)",
                                                                  "R (1/us)", {{"R", times, prof.rate}}));
        }
        integrals[k] = integrate_work_fluctuation(op, config.tau_us, work_options);
    });
    session.stage_done("rates_and_work", started);

    CsvTable work{{"N", "integrated_work"}, {}, {}};
    std::vector<double> xs, ys;
    for (const auto& w : integrals) {
        work.rows.push_back({static_cast<double>(w.n_atoms), w.integral});
        xs.push_back(w.n_atoms);
        ys.push_back(w.integral);
    }
    work.footer.push_back(footer("tau_us", config.tau_us));
    if (ns.size() >= 2 && std::all_of(ys.begin(), ys.end(), [](double y) { return y > 0.0; })) {
        const ScalingFit fit = fit_power_law(xs, ys);
        work.footer.push_back(footer("alpha", fit.exponent));
        work.footer.push_back(footer("fit_log_residual", fit.residual));
    } else {
        work.footer.push_back(footer("alpha", std::numeric_limits<double>::quiet_NaN()));
    }
    session.write("work_scaling.csv", work.render());

    // seeded spot check of Var_0(H_CD) = R^2
    started = clock::now();
    {
        std::mt19937_64 rng(config.seed);
        std::uniform_int_distribution<std::size_t> pick(0, ns.size() - 1);
        const TimeWindow w = overlap_window(config.schedule);
        std::uniform_real_distribution<double> when(w.begin, w.end);
        CsvTable check{{"N", "t_us", "R_squared", "var_h_cd", "rel_deviation"}, {}, {}};
        double worst = 0.0;
        for (int s = 0; s < config.identity_samples; ++s) {
            const int n = ns[pick(rng)];
            double t = when(rng);
            while (!(t > w.begin && t < w.end)) {
                t = when(rng);
            }
            const HamiltonianOperator op(CollectiveBasis(n), config.schedule);
            const SpectralSnapshot snap = diagonalize(op, t);
            const Eigen::MatrixXd dh = op.derivative_at(t);
            const double r = dark_state_rate(snap, dh, tol.gap_floor);
            const double v = cd_variance(snap, dh, tol.gap_floor);
            const double rel = r > 0.0 ? std::abs(v - r * r) / (r * r) : std::abs(v);
            worst = std::max(worst, rel);
            check.rows.push_back({static_cast<double>(n), t, r * r, v, rel});
        }
        check.footer.push_back(footer("seed", static_cast<double>(config.seed)));
        check.footer.push_back(footer("max_rel_deviation", worst));
        session.write("identity_check.csv", check.render());
    }
    session.stage_done("identity_check", started);

    started = clock::now();
    const std::vector<int>& cn = config.collapse.atom_numbers;
    std::vector<SusceptibilityProfile> profiles(cn.size());
    parallel_for(cn.size(), [&](std::size_t k) {
        const int n = cn[k];
        const HamiltonianOperator op(CollectiveBasis(n), config.schedule);
        MinimumScanOptions scan;
        scan.half_window = config.collapse.half_window;
        scan.points = config.collapse.points;
        scan.susceptibility.epsilon = tol.epsilon_scale_us / n;
        scan.susceptibility.rel_tol = tol.susceptibility_rel_tol;
        profiles[k] = susceptibility_near_minimum(op, scan);
        const auto& p = profiles[k];
        CsvTable table{{"t_us", "S_per_us2", "S_half_eps_per_us2"}, {}, {}};
        for (std::size_t i = 0; i < p.times.size(); ++i) {
            table.rows.push_back({p.times[i], p.s[i], p.s_half[i]});
        }
        table.footer.push_back(footer("epsilon_us", p.epsilon));
        table.footer.push_back(footer("t_N_us", p.t_n));
        table.footer.push_back(footer("S_min_per_us2", p.s_min));
        session.write("susceptibility" + tag(n) + ".csv", table.render());
    });
    session.stage_done("susceptibility", started);

    started = clock::now();
    CollapseOptions collapse;
    collapse.half_window = config.collapse.half_window;
    collapse.grid_points = config.collapse.points;
    const CollapseReport report = scaling_collapse(profiles, collapse);
    CollapseOptions control = collapse;
    control.amplitude_exponent = 1.0;
    const CollapseReport wrong = scaling_collapse(profiles, control);

    CsvTable table{{"x"}, {}, {}};
    for (int n : report.n_atoms) {
        table.header.push_back("y_N" + std::to_string(n));
    }
    for (std::size_t j = 0; j < report.x.size(); ++j) {
        std::vector<double> row{report.x[j]};
        for (const auto& c : report.curves) {
            row.push_back(c[j]);
        }
        table.rows.push_back(std::move(row));
    }
    for (const auto& p : report.pairs) {
        table.footer.push_back(footer("rms_N" + std::to_string(p.n_a) + "_N" + std::to_string(p.n_b), p.rms));
    }
    table.footer.push_back(footer("max_rms", report.max_rms));
    table.footer.push_back(footer("control_exponent_1_max_rms", wrong.max_rms));
    session.write("collapse.csv", table.render());
    if (config.plots) {
        std::vector<PlotSeries> curves;
        std::vector<PlotSeries> raw;
        for (std::size_t k = 0; k < report.curves.size(); ++k) {
            curves.push_back({"N=" + std::to_string(report.n_atoms[k]), report.x, report.curves[k]});
            raw.push_back({"N=" + std::to_string(cn[k]), profiles[k].times, profiles[k].s});
        }
        session.write("collapse.svg", svg_line_plot("Susceptibility collapse", "N (t - t_N)", "N^-2 (S - S_min)", curves));
        session.write("susceptibility.svg", svg_line_plot("Fidelity susceptibility", "t (us)", "S (1/us^2)", raw));
    }
    session.stage_done("collapse", started);
    return session.commit(config);
}

}  // namespace stirap::runner
