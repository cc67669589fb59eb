#include "stirap/model.hpp"

#include "stirap/errors.hpp"

#include <cmath>
#include <string>

namespace stirap {

void PulseSchedule::validate() const {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw InvalidArgument("pulse schedule: sigma must be positive, got " + std::to_string(sigma));
    }
    if (!(omega_max_1 >= 0.0) || !(omega_max_r >= 0.0) || !std::isfinite(omega_max_1) ||
        !std::isfinite(omega_max_r)) {
        throw InvalidArgument("pulse schedule: peak Rabi frequencies must be finite and >= 0");
    }
    if (!std::isfinite(t_start_r) || !std::isfinite(t_start_1)) {
        throw InvalidArgument("pulse schedule: start times must be finite");
    }
    if (t_start_r > t_start_1) {
        throw InvalidArgument("pulse schedule: Rydberg pulse must start no later than the pump pulse");
    }
}

double pulse_value(const PulseSchedule& pulses, Pulse which, double t) {
    const double ts = pulses.start_of(which);
    if (t <= ts || t >= ts + 2.0 * pulses.sigma) {
        return 0.0;
    }
    const double s = std::sin(std::numbers::pi * (t - ts) / (2.0 * pulses.sigma));
    return pulses.amplitude_of(which) * s * s;
}

double pulse_derivative(const PulseSchedule& pulses, Pulse which, double t) {
    const double ts = pulses.start_of(which);
    if (t <= ts || t >= ts + 2.0 * pulses.sigma) {
        return 0.0;
    }
    // d/dt sin^2(k (t - ts)) = k sin(2 k (t - ts)), k = pi / (2 sigma)
    const double k = std::numbers::pi / (2.0 * pulses.sigma);
    return pulses.amplitude_of(which) * k * std::sin(2.0 * k * (t - ts));
}

bool pulse_is_off(const PulseSchedule& pulses, Pulse which, double t) {
    const double ts = pulses.start_of(which);
    return pulses.amplitude_of(which) == 0.0 || t <= ts || t >= ts + 2.0 * pulses.sigma;
}

CollectiveBasis::CollectiveBasis(int n_atoms) : n_atoms_(n_atoms) {
    if (n_atoms < 1) {
        throw InvalidArgument("collective basis needs at least one atom, got " + std::to_string(n_atoms));
    }
    states_.reserve(static_cast<std::size_t>(2 * n_atoms + 1));
    for (int ne = 0; ne <= n_atoms; ++ne) {
        states_.push_back({n_atoms - ne, ne, 0});
    }
    for (int ne = 0; ne < n_atoms; ++ne) {
        states_.push_back({n_atoms - 1 - ne, ne, 1});
    }
}

std::optional<Eigen::Index> CollectiveBasis::find(const CollectiveState& s) const {
    if (s.n_g < 0 || s.n_e < 0 || (s.n_r != 0 && s.n_r != 1) || s.n_g + s.n_e + s.n_r != n_atoms_) {
        return std::nullopt;
    }
    return s.n_r == 0 ? s.n_e : n_atoms_ + 1 + s.n_e;
}

Eigen::Index CollectiveBasis::index_of(const CollectiveState& s) const {
    if (auto idx = find(s)) {
        return *idx;
    }
    throw InvalidArgument("state (" + std::to_string(s.n_g) + "," + std::to_string(s.n_e) + "," +
                          std::to_string(s.n_r) + ") is not in the basis");
}

CollectiveBasis build_basis(int n_atoms) { return CollectiveBasis(n_atoms); }

HamiltonianOperator::HamiltonianOperator(CollectiveBasis basis, PulseSchedule pulses)
    : basis_(std::move(basis)), pulses_(pulses) {
    pulses_.validate();
}

Eigen::MatrixXd HamiltonianOperator::assemble(const CollectiveBasis& basis, double omega_1, double omega_r) {
    const Eigen::Index dim = basis.dimension();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const auto [ng, ne, nr] = basis[i];
        if (ne == 0) {
            continue;
        }
        // -Omega_1/2 a_g^dag a_e : (ng, ne, nr) -> (ng+1, ne-1, nr)
        const Eigen::Index j = basis.index_of({ng + 1, ne - 1, nr});
        const double x = -0.5 * omega_1 * std::sqrt(static_cast<double>(ng + 1) * ne);
        h(j, i) = x;
        h(i, j) = x;
        if (nr == 0) {
            // -Omega_r/2 a_e sigma^+ : (ng, ne, 0) -> (ng, ne-1, 1)
            const Eigen::Index k = basis.index_of({ng, ne - 1, 1});
            const double y = -0.5 * omega_r * std::sqrt(static_cast<double>(ne));
            h(k, i) = y;
            h(i, k) = y;
        }
    }
    return h;
}

Eigen::MatrixXd HamiltonianOperator::at(double t) const {
    return assemble(basis_, pulse_value(pulses_, Pulse::Pump, t), pulse_value(pulses_, Pulse::Rydberg, t));
}

Eigen::MatrixXd HamiltonianOperator::derivative_at(double t) const {
    return assemble(basis_, pulse_derivative(pulses_, Pulse::Pump, t),
                    pulse_derivative(pulses_, Pulse::Rydberg, t));
}

bool HamiltonianOperator::both_pulses_on(double t) const {
    return !pulse_is_off(pulses_, Pulse::Pump, t) && !pulse_is_off(pulses_, Pulse::Rydberg, t);
}

Eigen::MatrixXd hamiltonian_at(const HamiltonianOperator& op, double t) { return op.at(t); }

Eigen::MatrixXd hamiltonian_derivative_at(const HamiltonianOperator& op, double t) { return op.derivative_at(t); }

}  // namespace stirap
