#include "stirap/dynamics.hpp"

#include "stirap/errors.hpp"

#include <algorithm>
#include <cmath>

namespace stirap {

namespace {

using cd = std::complex<double>;

constexpr double kNormTol = 1e-9;

void check_inputs(const QuantumState& initial, std::span<const double> times) {
    if (times.empty()) {
        throw InvalidArgument("propagation needs a nonempty time grid");
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) {
            throw InvalidArgument("propagation needs a strictly increasing time grid");
        }
    }
    if (std::abs(initial.t - times.front()) > 1e-12 * std::max(1.0, std::abs(times.front()))) {
        throw InvalidArgument("initial state time does not match the first grid point");
    }
    if (std::abs(initial.norm() - 1.0) > kNormTol) {
        throw InvalidArgument("initial state is not normalized");
    }
}

// exp(-i g) psi for Hermitian g.
Eigen::VectorXcd apply_exponential(const Eigen::MatrixXcd& g, const Eigen::VectorXcd& psi) {
    if ((g.array() == cd(0.0, 0.0)).all()) {
        return psi;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(g);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("propagator eigen-decomposition failed");
    }
    const Eigen::MatrixXcd& v = solver.eigenvectors();
    Eigen::VectorXcd phases(solver.eigenvalues().size());
    for (Eigen::Index k = 0; k < phases.size(); ++k) {
        phases(k) = std::polar(1.0, -solver.eigenvalues()(k));
    }
    return v * phases.cwiseProduct(v.adjoint() * psi);
}

}  // namespace

QuantumState QuantumState::basis_state(const CollectiveBasis& basis, const CollectiveState& s, double t) {
    QuantumState state;
    state.amplitudes = Eigen::VectorXcd::Zero(basis.dimension());
    state.amplitudes(basis.index_of(s)) = 1.0;
    state.t = t;
    return state;
}

QuantumState QuantumState::from_real(const Eigen::VectorXd& v, double t) {
    return {v.cast<cd>(), t};
}

double Trajectory::norm_drift() const {
    double drift = 0.0;
    for (const auto& s : states) {
        drift = std::max(drift, std::abs(s.norm() - 1.0));
    }
    return drift;
}

Eigen::VectorXcd magnus4_advance(const Generator& h, const Eigen::VectorXcd& psi, double t0, double t1, long long n) {
    // Omega = -i [ dt/2 (H1 + H2) - i sqrt(3) dt^2 / 12 [H2, H1] ] at the
    // Gauss nodes t + (1/2 -+ sqrt(3)/6) dt.
    static const double node = std::sqrt(3.0) / 6.0;
    const double dt = (t1 - t0) / static_cast<double>(n);
    Eigen::VectorXcd out = psi;
    for (long long k = 0; k < n; ++k) {
        const double t = t0 + dt * static_cast<double>(k);
        const Eigen::MatrixXcd h1 = h(t + (0.5 - node) * dt);
        const Eigen::MatrixXcd h2 = h(t + (0.5 + node) * dt);
        const Eigen::MatrixXcd comm = h2 * h1 - h1 * h2;
        const Eigen::MatrixXcd g = (0.5 * dt) * (h1 + h2) - cd(0.0, std::sqrt(3.0) * dt * dt / 12.0) * comm;
        out = apply_exponential(g, out);
    }
    return out;
}

Trajectory propagate_generator(const Generator& h, const QuantumState& initial, std::span<const double> times,
                               const PropagationControls& controls) {
    check_inputs(initial, times);
    if (!(controls.max_substep > 0.0) || !(controls.local_tol > 0.0) || controls.max_doublings < 0) {
        throw InvalidArgument("propagation controls must be positive");
    }

    Trajectory traj;
    traj.controls = controls;
    traj.times.assign(times.begin(), times.end());
    traj.states.reserve(times.size());
    traj.states.push_back({initial.amplitudes, times.front()});

    Eigen::VectorXcd psi = initial.amplitudes;
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double t0 = times[i - 1];
        const double t1 = times[i];
        auto n = static_cast<long long>(std::ceil((t1 - t0) / controls.max_substep));
        n = std::max(n, 1LL);
        Eigen::VectorXcd coarse = magnus4_advance(h, psi, t0, t1, n);
        traj.substeps += n;
        double err = 0.0;
        Eigen::VectorXcd fine;
        for (int doubling = 0;; ++doubling) {
            fine = magnus4_advance(h, psi, t0, t1, 2 * n);
            traj.substeps += 2 * n;
            err = (fine - coarse).norm();
            if (err <= controls.local_tol) {
                break;
            }
            if (doubling >= controls.max_doublings) {
                throw StepSizeUnderflow(t0, t1, std::max(err, traj.worst_local_error));
            }
            coarse = std::move(fine);
            n *= 2;
        }
        traj.worst_local_error = std::max(traj.worst_local_error, err);
        psi = std::move(fine);
        traj.states.push_back({psi, t1});
    }
    return traj;
}

Trajectory propagate(const HamiltonianOperator& op, const QuantumState& initial, std::span<const double> times,
                     const PropagationControls& controls) {
    if (initial.amplitudes.size() != op.dimension()) {
        throw InvalidArgument("initial state dimension does not match the basis");
    }
    const Generator h = [&op](double t) -> Eigen::MatrixXcd { return op.at(t).cast<cd>(); };
    return propagate_generator(h, initial, times, controls);
}

Trajectory propagate_counterdiabatic(const CounterdiabaticDrive& drive, const QuantumState& initial,
                                     std::span<const double> times, const PropagationControls& controls) {
    if (initial.amplitudes.size() != drive.hamiltonian().dimension()) {
        throw InvalidArgument("initial state dimension does not match the basis");
    }
    // Check the output grid first so a floor violation names a grid time.
    for (double t : times) {
        (void)drive.correction_at(t);
    }
    const Generator h = [&drive](double t) { return drive.total_at(t); };
    return propagate_generator(h, initial, times, controls);
}

std::vector<double> overlap_fidelity(const Trajectory& traj, std::span<const SpectralSnapshot> dark_path) {
    if (traj.times.size() != dark_path.size()) {
        throw GridMismatch("trajectory and dark path have different lengths");
    }
    std::vector<double> fidelity(traj.times.size());
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double t = traj.times[i];
        if (std::abs(dark_path[i].t - t) > 1e-12 * std::max(1.0, std::abs(t))) {
            throw GridMismatch("trajectory and dark path disagree at grid point " + std::to_string(i));
        }
        const Eigen::VectorXcd dark = dark_path[i].dark_vector().cast<cd>();
        fidelity[i] = std::norm(dark.dot(traj.states[i].amplitudes));
    }
    return fidelity;
}

}  // namespace stirap
