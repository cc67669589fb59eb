#include "stirap/spectral.hpp"

#include "stirap/errors.hpp"
#include "stirap/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

namespace stirap {

namespace {

constexpr double kDarkZeroTol = 1e-9;
constexpr double kTrackingOverlapMin = 0.5;

void fix_sign_by_largest_entry(Eigen::Ref<Eigen::VectorXd> v) {
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v(imax) < 0.0) {
        v = -v;
    }
}

Eigen::Index nearest_zero(const Eigen::VectorXd& values) {
    Eigen::Index k = 0;
    values.cwiseAbs().minCoeff(&k);
    return k;
}

double gap_from_eigenvalues(const Eigen::VectorXd& values, Eigen::Index dark) {
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < values.size(); ++k) {
        if (k != dark) {
            gap = std::min(gap, std::abs(values(k) - values(dark)));
        }
    }
    return gap;
}

// Zero-energy snapshot for H = 0 whose dark column is the given unit vector.
SpectralSnapshot null_snapshot(double t, const Eigen::VectorXd& dark) {
    const Eigen::Index dim = dark.size();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(dark);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(dim, dim);
    if (q.col(0).dot(dark) < 0.0) {
        q.col(0) = -q.col(0);
    }
    q.col(0) = dark;

    SpectralSnapshot s;
    s.t = t;
    s.eigenvalues = Eigen::VectorXd::Zero(dim);
    s.eigenvectors = std::move(q);
    s.dark_index = 0;
    s.gap = 0.0;
    s.norm = 0.0;
    return s;
}

bool hamiltonian_vanishes(const HamiltonianOperator& op, double t) {
    return pulse_is_off(op.pulses(), Pulse::Pump, t) && pulse_is_off(op.pulses(), Pulse::Rydberg, t);
}

}  // namespace

SpectralSnapshot diagonalize_matrix(const Eigen::MatrixXd& h, double t, const SpectralSnapshot* prev) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("eigen-decomposition failed at t=" + std::to_string(t));
    }

    SpectralSnapshot s;
    s.t = t;
    s.eigenvalues = solver.eigenvalues();
    s.eigenvectors = solver.eigenvectors();
    s.norm = std::max(std::abs(s.eigenvalues(0)), std::abs(s.eigenvalues(s.eigenvalues.size() - 1)));

    const double tol = kDarkZeroTol * s.norm;
    const auto near_zero = static_cast<std::size_t>((s.eigenvalues.array().abs() <= tol).count());
    if (near_zero > 1) {
        throw DegenerateDarkState(t, near_zero);
    }
    s.dark_index = nearest_zero(s.eigenvalues);
    s.gap = gap_from_eigenvalues(s.eigenvalues, s.dark_index);

    for (Eigen::Index k = 0; k < s.eigenvectors.cols(); ++k) {
        fix_sign_by_largest_entry(s.eigenvectors.col(k));
    }
    if (prev != nullptr) {
        if (prev->eigenvectors.rows() != s.eigenvectors.rows()) {
            throw InvalidArgument("previous snapshot has a different dimension");
        }
        if (prev->dark_vector().dot(s.dark_vector()) < 0.0) {
            s.eigenvectors.col(s.dark_index) *= -1.0;
        }
    }
    return s;
}

SpectralSnapshot diagonalize(const HamiltonianOperator& op, double t, const SpectralSnapshot* prev) {
    return diagonalize_matrix(op.at(t), t, prev);
}

std::vector<SpectralSnapshot> track_dark_state(const HamiltonianOperator& op, std::span<const double> times) {
    if (times.empty()) {
        throw InvalidArgument("dark-state tracking needs a nonempty time grid");
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) {
            throw InvalidArgument("dark-state tracking needs a strictly increasing time grid");
        }
    }
    if (pulse_value(op.pulses(), Pulse::Pump, times.front()) != 0.0) {
        throw InvalidArgument("dark-state tracking must start while the pump pulse is off");
    }

    // Independent diagonalizations first, then the sequential gauge pass.
    std::vector<SpectralSnapshot> path(times.size());
    std::vector<char> vanishing(times.size(), 0);
    parallel_for(times.size(), [&](std::size_t i) {
        if (hamiltonian_vanishes(op, times[i])) {
            vanishing[i] = 1;
        } else {
            path[i] = diagonalize(op, times[i]);
        }
    });

    const Eigen::Index dim = op.dimension();
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (vanishing[i]) {
            Eigen::VectorXd dark;
            if (i == 0) {
                dark = Eigen::VectorXd::Unit(dim, op.basis().ground_index());
            } else {
                dark = path[i - 1].dark_vector();
            }
            path[i] = null_snapshot(times[i], dark);
        } else if (i > 0 && path[i - 1].dark_vector().dot(path[i].dark_vector()) < 0.0) {
            path[i].eigenvectors.col(path[i].dark_index) *= -1.0;
        }
        if (i > 0) {
            const double overlap = path[i - 1].dark_vector().dot(path[i].dark_vector());
            if (overlap < kTrackingOverlapMin) {
                throw TrackingLost(times[i - 1], times[i], overlap);
            }
        }
    }
    return path;
}

double dark_gap(const HamiltonianOperator& op, double t) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op.at(t), Eigen::EigenvaluesOnly);
    const Eigen::VectorXd& values = solver.eigenvalues();
    return gap_from_eigenvalues(values, nearest_zero(values));
}

TimeWindow overlap_window(const PulseSchedule& pulses) {
    return {pulses.overlap_begin(), pulses.overlap_end()};
}

GapProfile find_critical_time(const HamiltonianOperator& op, TimeWindow window, const GapSearchOptions& options) {
    if (!(window.end > window.begin)) {
        throw InvalidArgument("critical-time window must have end > begin");
    }
    if (options.scan_points < 3) {
        throw InvalidArgument("critical-time scan needs at least 3 points");
    }
    if (!(options.refine_tol > 0.0)) {
        throw InvalidArgument("critical-time refine_tol must be positive");
    }

    GapProfile profile;
    const auto m = static_cast<std::size_t>(options.scan_points);
    profile.times.resize(m);
    profile.gaps.resize(m);
    const double h = (window.end - window.begin) / static_cast<double>(m - 1);
    for (std::size_t i = 0; i < m; ++i) {
        profile.times[i] = window.begin + h * static_cast<double>(i);
    }
    profile.times.back() = window.end;
    parallel_for(m, [&](std::size_t i) { profile.gaps[i] = dark_gap(op, profile.times[i]); });

    std::size_t best = 0;
    for (std::size_t i = 1; i + 1 < m; ++i) {
        const double g = profile.gaps[i];
        if (g < profile.gaps[i - 1] && g <= profile.gaps[i + 1] && (best == 0 || g < profile.gaps[best])) {
            best = i;
        }
    }
    if (best == 0) {
        throw NoInteriorMinimum(window.begin, window.end);
    }

    // Golden-section search on the bracketing grid cells.
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = profile.times[best - 1];
    double b = profile.times[best + 1];
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = dark_gap(op, c);
    double fd = dark_gap(op, d);
    while (b - a > options.refine_tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = dark_gap(op, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = dark_gap(op, d);
        }
    }
    const double t_mid = 0.5 * (a + b);
    const double f_mid = dark_gap(op, t_mid);

    profile.t_c = profile.times[best];
    profile.gap_min = profile.gaps[best];
    for (auto [t, g] : {std::pair{c, fc}, std::pair{d, fd}, std::pair{t_mid, f_mid}}) {
        if (g < profile.gap_min) {
            profile.t_c = t;
            profile.gap_min = g;
        }
    }
    return profile;
}

GapScaling fit_gap_scaling(std::span<const int> atom_numbers, const PulseSchedule& pulses,
                           const GapSearchOptions& options) {
    const std::set<int> distinct(atom_numbers.begin(), atom_numbers.end());
    if (distinct.size() < 4) {
        throw InvalidArgument("gap scaling fit needs at least four distinct atom numbers");
    }
    GapScaling result;
    result.atom_numbers.assign(atom_numbers.begin(), atom_numbers.end());
    result.profiles.resize(atom_numbers.size());
    const TimeWindow window = overlap_window(pulses);
    for (std::size_t i = 0; i < atom_numbers.size(); ++i) {
        const HamiltonianOperator op(build_basis(atom_numbers[i]), pulses);
        result.profiles[i] = find_critical_time(op, window, options);
    }
    std::vector<double> ns, gaps;
    for (std::size_t i = 0; i < atom_numbers.size(); ++i) {
        ns.push_back(atom_numbers[i]);
        gaps.push_back(result.profiles[i].gap_min);
    }
    result.fit = fit_power_law(ns, gaps);
    return result;
}

Eigen::VectorXd dark_state_at(const HamiltonianOperator& op, double t, const Eigen::VectorXd* reference) {
    const CollectiveBasis& basis = op.basis();
    std::vector<Eigen::Index> even, odd;
    for (Eigen::Index i = 0; i < basis.dimension(); ++i) {
        (basis[i].n_e % 2 == 0 ? even : odd).push_back(i);
    }
    const Eigen::MatrixXd h = op.at(t);
    const Eigen::MatrixXd block = h(even, odd);  // (N+1) x N

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(block);
    if (qr.rank() < block.cols()) {
        throw DegenerateDarkState(t, static_cast<std::size_t>(block.rows() - qr.rank()));
    }
    // The last column of Q spans the orthogonal complement of range(block),
    // i.e. the kernel of block^T.
    const Eigen::Index p = block.rows();
    const Eigen::VectorXd kernel = qr.householderQ() * Eigen::VectorXd::Unit(p, p - 1);

    Eigen::VectorXd dark = Eigen::VectorXd::Zero(basis.dimension());
    for (std::size_t k = 0; k < even.size(); ++k) {
        dark(even[k]) = kernel(static_cast<Eigen::Index>(k));
    }
    dark.normalize();
    if (reference != nullptr) {
        if (reference->dot(dark) < 0.0) {
            dark = -dark;
        }
    } else {
        fix_sign_by_largest_entry(dark);
    }
    return dark;
}

}  // namespace stirap
