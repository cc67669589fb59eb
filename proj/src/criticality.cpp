#include "stirap/criticality.hpp"

#include "stirap/errors.hpp"
#include "stirap/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace stirap {

namespace {

using cd = std::complex<double>;

bool is_zero(const Eigen::MatrixXd& m) { return (m.array() == 0.0).all(); }

// Pulse j is identically zero on [a, b].
bool pulse_off_on(const PulseSchedule& pulses, Pulse which, double a, double b) {
    const double ts = pulses.start_of(which);
    return pulses.amplitude_of(which) == 0.0 || b <= ts || a >= ts + 2.0 * pulses.sigma;
}

// Coefficients <n|d_t 0> in the eigenbasis.
Eigen::VectorXd derivative_coefficients(const SpectralSnapshot& s, const Eigen::MatrixXd& dH, double gap_floor) {
    const Eigen::Index dim = s.eigenvalues.size();
    Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(dim);
    if (is_zero(dH)) {
        return coeffs;
    }
    if (!(s.gap > gap_floor)) {
        throw GapFloorViolation(s.t, s.gap, gap_floor);
    }
    const Eigen::VectorXd coupling = s.eigenvectors.transpose() * (dH * s.dark_vector());
    const double e0 = s.dark_energy();
    for (Eigen::Index n = 0; n < dim; ++n) {
        if (n != s.dark_index) {
            coeffs(n) = coupling(n) / (e0 - s.eigenvalues(n));
        }
    }
    return coeffs;
}

double quadratic_vertex(double x0, double x1, double x2, double y0, double y1, double y2, double* y_vertex) {
    const double denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
    const double a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
    const double b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
    const double c = (x1 * x2 * (x1 - x2) * y0 + x2 * x0 * (x2 - x0) * y1 + x0 * x1 * (x0 - x1) * y2) / denom;
    const double xv = -b / (2.0 * a);
    *y_vertex = c - b * b / (4.0 * a);
    return xv;
}

double susceptibility_estimate(const HamiltonianOperator& op, double t, double eps) {
    const PulseSchedule& p = op.pulses();
    const double a = t - eps;
    const double b = t + eps;
    if (pulse_off_on(p, Pulse::Pump, a, b) || pulse_off_on(p, Pulse::Rydberg, a, b)) {
        return 0.0;
    }
    const Eigen::VectorXd left = dark_state_at(op, a);
    const Eigen::VectorXd right = dark_state_at(op, b, &left);
    // 1 - |<l|r>| = ||l - r||^2 / 2 for unit real vectors with <l|r> >= 0.
    return -(left - right).squaredNorm() / (eps * eps);
}

}  // namespace

Eigen::VectorXd dark_state_derivative(const SpectralSnapshot& snapshot, const Eigen::MatrixXd& dH,
                                      double gap_floor) {
    return snapshot.eigenvectors * derivative_coefficients(snapshot, dH, gap_floor);
}

double dark_state_rate(const SpectralSnapshot& snapshot, const Eigen::MatrixXd& dH, double gap_floor) {
    return derivative_coefficients(snapshot, dH, gap_floor).norm();
}

CDHamiltonian build_cd_hamiltonian(const SpectralSnapshot& snapshot, const Eigen::MatrixXd& dH, double gap_floor) {
    const Eigen::Index dim = snapshot.eigenvalues.size();
    CDHamiltonian cdh;
    cdh.t = snapshot.t;
    cdh.gap_floor = gap_floor;
    if (is_zero(dH)) {
        cdh.matrix = Eigen::MatrixXcd::Zero(dim, dim);
        return cdh;
    }
    const Eigen::MatrixXd& v = snapshot.eigenvectors;
    const Eigen::VectorXd& e = snapshot.eigenvalues;
    const Eigen::MatrixXd coupling = v.transpose() * dH * v;
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index n = 0; n < dim; ++n) {
        for (Eigen::Index m = 0; m < dim; ++m) {
            if (m == n) {
                continue;
            }
            const double spacing = e(n) - e(m);
            if (std::abs(spacing) < gap_floor) {
                throw DegeneracyEncountered(snapshot.t, static_cast<std::size_t>(std::min(m, n)),
                                            static_cast<std::size_t>(std::max(m, n)), std::abs(spacing));
            }
            k(m, n) = coupling(m, n) / spacing;
        }
    }
    cdh.matrix = cd(0.0, 1.0) * (v * k * v.transpose()).cast<cd>();
    return cdh;
}

double cd_variance(const SpectralSnapshot& snapshot, const Eigen::MatrixXd& dH, double gap_floor) {
    const CDHamiltonian h1 = build_cd_hamiltonian(snapshot, dH, gap_floor);
    const Eigen::MatrixXd& v = snapshot.eigenvectors;
    const Eigen::MatrixXd h0 = v * snapshot.eigenvalues.asDiagonal() * v.transpose();
    const Eigen::MatrixXcd h_cd = h0.cast<cd>() + h1.matrix;
    const Eigen::VectorXcd dark = snapshot.dark_vector().cast<cd>();
    const Eigen::VectorXcd w = h_cd * dark;
    const cd mean = dark.dot(w);
    return std::max(0.0, w.squaredNorm() - std::norm(mean));
}

double work_fluctuation(const SpectralSnapshot& snapshot, const Eigen::MatrixXd& dH, double gap_floor) {
    if (is_zero(dH)) {
        return 0.0;
    }
    if (!(snapshot.gap > gap_floor)) {
        throw GapFloorViolation(snapshot.t, snapshot.gap, gap_floor);
    }
    const Eigen::MatrixXd& v = snapshot.eigenvectors;
    const Eigen::MatrixXd h0 = v * snapshot.eigenvalues.asDiagonal() * v.transpose();
    const Eigen::VectorXd h0_dark = h0 * snapshot.dark_vector();
    const double mean0 = snapshot.dark_vector().dot(h0_dark);
    const double var_adiabatic = std::max(0.0, h0_dark.squaredNorm() - mean0 * mean0);
    return std::sqrt(std::max(0.0, cd_variance(snapshot, dH, gap_floor) - var_adiabatic));
}

RateProfile rate_profile(const HamiltonianOperator& op, std::span<const double> times, double gap_floor) {
    RateProfile profile;
    profile.times.assign(times.begin(), times.end());
    profile.rate.assign(times.size(), 0.0);
    profile.work_fluct.assign(times.size(), 0.0);
    parallel_for(times.size(), [&](std::size_t i) {
        const double t = times[i];
        if (!op.both_pulses_on(t)) {
            return;
        }
        const SpectralSnapshot s = diagonalize(op, t);
        const Eigen::MatrixXd dH = op.derivative_at(t);
        profile.rate[i] = dark_state_rate(s, dH, gap_floor);
        profile.work_fluct[i] = work_fluctuation(s, dH, gap_floor);
    });
    return profile;
}

WorkIntegral integrate_work_fluctuation(const HamiltonianOperator& op, double tau, const WorkIntegralOptions& options) {
    if (!(tau > 0.0)) {
        throw InvalidArgument("work integral needs tau > 0");
    }
    if (options.initial_points < 3 || options.max_points < options.initial_points) {
        throw InvalidArgument("work integral: bad point counts");
    }
    const PulseSchedule& p = op.pulses();
    WorkIntegral result;
    result.n_atoms = op.basis().n_atoms();
    const double a = std::max(p.begin(), p.overlap_begin());
    const double b = std::min(p.begin() + tau, p.overlap_end());
    if (!(b > a)) {
        return result;
    }

    auto sample = [&](double t) {
        if (!op.both_pulses_on(t)) {
            return 0.0;
        }
        return work_fluctuation(diagonalize(op, t), op.derivative_at(t), options.gap_floor);
    };

    auto m = static_cast<std::size_t>(options.initial_points);
    std::vector<double> values(m);
    parallel_for(m, [&](std::size_t i) { values[i] = sample(a + (b - a) * static_cast<double>(i) / (m - 1)); });
    auto trapezoid = [&] {
        double sum = 0.5 * (values.front() + values.back());
        for (std::size_t i = 1; i + 1 < values.size(); ++i) {
            sum += values[i];
        }
        return sum * (b - a) / static_cast<double>(values.size() - 1);
    };
    double estimate = trapezoid();
    while (true) {
        const std::size_t m_new = 2 * m - 1;
        if (m_new > static_cast<std::size_t>(options.max_points)) {
            throw NumericalError("work integral did not converge for N=" + std::to_string(result.n_atoms));
        }
        std::vector<double> mids(m - 1);
        parallel_for(m - 1, [&](std::size_t i) {
            mids[i] = sample(a + (b - a) * (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(m_new - 1));
        });
        std::vector<double> merged(m_new);
        for (std::size_t i = 0; i < m; ++i) {
            merged[2 * i] = values[i];
        }
        for (std::size_t i = 0; i + 1 < m; ++i) {
            merged[2 * i + 1] = mids[i];
        }
        values = std::move(merged);
        m = m_new;
        const double refined = trapezoid();
        const bool done = std::abs(refined - estimate) <= options.rel_tol * std::abs(refined);
        estimate = refined;
        if (done) {
            break;
        }
    }
    result.integral = estimate;
    result.points = static_cast<int>(m);
    return result;
}

WorkScaling integrated_work_scaling(std::span<const int> atom_numbers, const PulseSchedule& pulses, double tau,
                                    const WorkIntegralOptions& options) {
    if (atom_numbers.size() < 2) {
        throw InvalidArgument("work scaling needs at least two atom numbers");
    }
    WorkScaling result;
    std::vector<double> ns, values;
    for (int n : atom_numbers) {
        const HamiltonianOperator op(build_basis(n), pulses);
        result.integrals.push_back(integrate_work_fluctuation(op, tau, options));
        ns.push_back(n);
        values.push_back(result.integrals.back().integral);
    }
    result.fit = fit_power_law(ns, values);
    return result;
}

SusceptibilityProfile fidelity_susceptibility(const HamiltonianOperator& op, std::span<const double> times,
                                              const SusceptibilityOptions& options) {
    if (times.empty()) {
        throw InvalidArgument("susceptibility needs a nonempty time grid");
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) {
            throw InvalidArgument("susceptibility needs a strictly increasing time grid");
        }
    }
    SusceptibilityProfile profile;
    profile.n_atoms = op.basis().n_atoms();
    profile.epsilon = options.epsilon > 0.0 ? options.epsilon : 0.01 / profile.n_atoms;
    profile.times.assign(times.begin(), times.end());
    profile.s.resize(times.size());
    profile.s_half.resize(times.size());

    const double eps = profile.epsilon;
    parallel_for(times.size(), [&](std::size_t i) {
        const double full = susceptibility_estimate(op, times[i], eps);
        const double half = susceptibility_estimate(op, times[i], 0.5 * eps);
        const double scale = std::max(std::abs(full), std::abs(half));
        if (std::abs(full - half) > options.rel_tol * scale + options.abs_floor) {
            throw NotConverged(times[i], full, half);
        }
        profile.s[i] = full;
        profile.s_half[i] = half;
    });

    const auto it = std::min_element(profile.s.begin(), profile.s.end());
    const auto k = static_cast<std::size_t>(it - profile.s.begin());
    profile.t_n = times[k];
    profile.s_min = *it;
    if (k > 0 && k + 1 < times.size()) {
        double y = 0.0;
        const double x = quadratic_vertex(times[k - 1], times[k], times[k + 1], profile.s[k - 1], profile.s[k],
                                          profile.s[k + 1], &y);
        if (std::isfinite(x) && x >= times[k - 1] && x <= times[k + 1] && y <= profile.s_min) {
            profile.t_n = x;
            profile.s_min = y;
        }
    }
    return profile;
}

SusceptibilityProfile susceptibility_near_minimum(const HamiltonianOperator& op, const MinimumScanOptions& options) {
    if (!(options.coarse_step > 0.0) || !(options.half_window > 0.0) || options.points < 3) {
        throw InvalidArgument("susceptibility scan: bad window options");
    }
    const double n = op.basis().n_atoms();
    const TimeWindow w = overlap_window(op.pulses());
    const double step = options.coarse_step / n;
    const auto m = static_cast<std::size_t>(std::floor((w.end - w.begin) / step));
    if (m < 3) {
        throw InvalidArgument("susceptibility scan: overlap shorter than the coarse step");
    }
    std::vector<double> coarse;
    for (std::size_t i = 1; i < m; ++i) {
        coarse.push_back(w.begin + step * static_cast<double>(i));
    }
    const SusceptibilityProfile rough = fidelity_susceptibility(op, coarse, options.susceptibility);

    const double reach = (options.half_window + options.coarse_step) / n;
    const double lo = std::max(rough.t_n - reach, w.begin + 0.5 * step);
    const double hi = std::min(rough.t_n + reach, w.end - 0.5 * step);
    std::vector<double> fine(static_cast<std::size_t>(options.points));
    for (std::size_t i = 0; i < fine.size(); ++i) {
        fine[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(fine.size() - 1);
    }
    return fidelity_susceptibility(op, fine, options.susceptibility);
}

CollapseReport scaling_collapse(std::span<const SusceptibilityProfile> profiles, const CollapseOptions& options) {
    if (profiles.size() < 2) {
        throw InvalidArgument("scaling collapse needs at least two profiles");
    }
    if (options.grid_points < 2) {
        throw InvalidArgument("scaling collapse needs at least two grid points");
    }
    const double p = options.amplitude_exponent;

    std::vector<std::vector<double>> xs(profiles.size()), ys(profiles.size());
    double lo = -options.half_window;
    double hi = options.half_window;
    for (std::size_t k = 0; k < profiles.size(); ++k) {
        const auto& prof = profiles[k];
        if (prof.times.size() < 2 || prof.times.size() != prof.s.size()) {
            throw InvalidArgument("scaling collapse: malformed profile");
        }
        const double n = prof.n_atoms;
        const double scale = std::pow(n, -p);
        for (std::size_t i = 0; i < prof.times.size(); ++i) {
            xs[k].push_back(n * (prof.times[i] - prof.t_n));
            ys[k].push_back(scale * (prof.s[i] - prof.s_min));
        }
        lo = std::max(lo, xs[k].front());
        hi = std::min(hi, xs[k].back());
    }
    if (!(hi > lo)) {
        throw InsufficientOverlap("rescaled profiles share no common N(t - t_N) interval");
    }

    CollapseReport report;
    report.amplitude_exponent = p;
    const auto m = static_cast<std::size_t>(options.grid_points);
    for (std::size_t j = 0; j < m; ++j) {
        report.x.push_back(lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(m - 1));
    }
    double y_min = std::numeric_limits<double>::infinity();
    double y_max = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < profiles.size(); ++k) {
        report.n_atoms.push_back(profiles[k].n_atoms);
        std::vector<double> curve(m);
        std::size_t seg = 0;
        for (std::size_t j = 0; j < m; ++j) {
            const double x = report.x[j];
            while (seg + 2 < xs[k].size() && xs[k][seg + 1] < x) {
                ++seg;
            }
            const double x0 = xs[k][seg], x1 = xs[k][seg + 1];
            const double w = std::clamp((x - x0) / (x1 - x0), 0.0, 1.0);
            curve[j] = (1.0 - w) * ys[k][seg] + w * ys[k][seg + 1];
            y_min = std::min(y_min, curve[j]);
            y_max = std::max(y_max, curve[j]);
        }
        report.curves.push_back(std::move(curve));
    }
    report.y_range = y_max - y_min;

    for (std::size_t a = 0; a < profiles.size(); ++a) {
        for (std::size_t b = a + 1; b < profiles.size(); ++b) {
            double ss = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                const double d = report.curves[a][j] - report.curves[b][j];
                ss += d * d;
            }
            const double rms = std::sqrt(ss / static_cast<double>(m));
            const double normalized = report.y_range > 0.0 ? rms / report.y_range : 0.0;
            report.pairs.push_back({profiles[a].n_atoms, profiles[b].n_atoms, normalized});
            report.max_rms = std::max(report.max_rms, normalized);
        }
    }
    return report;
}

CounterdiabaticDrive::CounterdiabaticDrive(HamiltonianOperator op, double gap_floor)
    : op_(std::move(op)), gap_floor_(gap_floor) {
    if (!(gap_floor > 0.0)) {
        throw InvalidArgument("counterdiabatic gap floor must be positive");
    }
}

Eigen::MatrixXcd CounterdiabaticDrive::correction_at(double t) const {
    const Eigen::Index dim = op_.dimension();
    if (!op_.both_pulses_on(t)) {
        return Eigen::MatrixXcd::Zero(dim, dim);
    }
    const SpectralSnapshot s = diagonalize(op_, t);
    if (!(s.gap > gap_floor_)) {
        throw GapFloorViolation(t, s.gap, gap_floor_);
    }
    return build_cd_hamiltonian(s, op_.derivative_at(t), gap_floor_).matrix;
}

Eigen::MatrixXcd CounterdiabaticDrive::total_at(double t) const {
    return op_.at(t).cast<std::complex<double>>() + correction_at(t);
}

}  // namespace stirap
