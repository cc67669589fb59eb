// Pulse schedules, the blockaded collective basis and H(t).
//
// Units: hbar = 1, time in microseconds, angular frequencies in rad/us.
// A Rabi frequency quoted as "2 pi x 10 MHz" is 20 pi rad/us.

#pragma once

#include <Eigen/Dense>

#include <compare>
#include <numbers>
#include <optional>
#include <vector>

namespace stirap {

inline constexpr double kTwoPiTenMHz = 2.0 * std::numbers::pi * 10.0;  // rad/us

// Pump couples g <-> e (Omega_1), Rydberg couples e <-> r (Omega_r).
enum class Pulse { Pump, Rydberg };

// Two sin^2 envelopes sharing one half-duration sigma. Each pulse is nonzero
// only on (t_start, t_start + 2 sigma).
struct PulseSchedule {
    double omega_max_1 = kTwoPiTenMHz;
    double omega_max_r = kTwoPiTenMHz;
    double sigma = 1.5;
    double t_start_r = 0.0;
    double t_start_1 = 1.1;

    // Spectrum parameters: sigma = 1.5 us, delay 1.1 us, window [0, 4.1] us.
    static PulseSchedule fast_default() { return {}; }
    // Slow passage: sigma = 45 us, delay 33 us.
    static PulseSchedule slow_default() { return {kTwoPiTenMHz, kTwoPiTenMHz, 45.0, 0.0, 33.0}; }

    // Throws InvalidArgument unless sigma > 0, amplitudes >= 0 and the
    // Rydberg pulse starts no later than the pump (counterintuitive order).
    void validate() const;

    double delay() const { return t_start_1 - t_start_r; }
    double begin() const { return t_start_r; }
    double end() const { return t_start_1 + 2.0 * sigma; }
    double duration() const { return end() - begin(); }
    // Interval on which both pulses are nonzero.
    double overlap_begin() const { return t_start_1; }
    double overlap_end() const { return t_start_r + 2.0 * sigma; }

    double start_of(Pulse which) const { return which == Pulse::Pump ? t_start_1 : t_start_r; }
    double amplitude_of(Pulse which) const { return which == Pulse::Pump ? omega_max_1 : omega_max_r; }
};

double pulse_value(const PulseSchedule& pulses, Pulse which, double t);
double pulse_derivative(const PulseSchedule& pulses, Pulse which, double t);

// True when the pulse is identically zero on a neighbourhood of t (outside
// its open support, endpoints included).
bool pulse_is_off(const PulseSchedule& pulses, Pulse which, double t);

struct CollectiveState {
    int n_g = 0;
    int n_e = 0;
    int n_r = 0;

    auto operator<=>(const CollectiveState&) const = default;
};

// Symmetric states |n_g, n_e, n_r> with n_r in {0, 1}. Ordering: the n_r = 0
// block with n_e = 0..N, then the n_r = 1 block with n_e = 0..N-1.
class CollectiveBasis {
public:
    explicit CollectiveBasis(int n_atoms);

    int n_atoms() const { return n_atoms_; }
    Eigen::Index dimension() const { return static_cast<Eigen::Index>(states_.size()); }
    const std::vector<CollectiveState>& states() const { return states_; }
    const CollectiveState& operator[](Eigen::Index i) const { return states_[static_cast<std::size_t>(i)]; }

    std::optional<Eigen::Index> find(const CollectiveState& s) const;
    // Throws InvalidArgument for triples outside the basis.
    Eigen::Index index_of(const CollectiveState& s) const;

    // |N, 0, 0>, the all-ground product state.
    Eigen::Index ground_index() const { return 0; }

private:
    int n_atoms_;
    std::vector<CollectiveState> states_;
};

CollectiveBasis build_basis(int n_atoms);

// H(t) = -Omega_1(t) J_x - Omega_r(t)/2 (a_e sigma^+ + a_e^dag sigma^-).
// Stateless: evaluation is a pure function of t.
class HamiltonianOperator {
public:
    HamiltonianOperator(CollectiveBasis basis, PulseSchedule pulses);

    const CollectiveBasis& basis() const { return basis_; }
    const PulseSchedule& pulses() const { return pulses_; }
    Eigen::Index dimension() const { return basis_.dimension(); }

    Eigen::MatrixXd at(double t) const;
    Eigen::MatrixXd derivative_at(double t) const;

    // Both pulses are nonzero around t.
    bool both_pulses_on(double t) const;

    // Coupling matrix for explicit Rabi frequencies.
    static Eigen::MatrixXd assemble(const CollectiveBasis& basis, double omega_1, double omega_r);

private:
    CollectiveBasis basis_;
    PulseSchedule pulses_;
};

Eigen::MatrixXd hamiltonian_at(const HamiltonianOperator& op, double t);
Eigen::MatrixXd hamiltonian_derivative_at(const HamiltonianOperator& op, double t);

}  // namespace stirap
