// Time-dependent Schroedinger propagation under H(t) and
// under the counterdiabatic H(t) + H_1(t).
//
// Each substep is the fourth-order Magnus propagator built from two
// Gauss-Legendre samples of the generator, exponentiated exactly through a
// Hermitian eigendecomposition, so every step is unitary to rounding.

#pragma once

#include "stirap/criticality.hpp"
#include "stirap/model.hpp"
#include "stirap/spectral.hpp"

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace stirap {

struct QuantumState {
    Eigen::VectorXcd amplitudes;
    double t = 0.0;

    static QuantumState basis_state(const CollectiveBasis& basis, const CollectiveState& s, double t);
    static QuantumState from_real(const Eigen::VectorXd& v, double t);
    double norm() const { return amplitudes.norm(); }
};

struct PropagationControls {
    double max_substep = 2e-3;  // us
    double local_tol = 1e-11;   // per output interval, in state norm
    int max_doublings = 14;     // substep halvings per interval before giving up
};

struct Trajectory {
    std::vector<double> times;
    std::vector<QuantumState> states;
    PropagationControls controls;
    double worst_local_error = 0.0;
    long long substeps = 0;

    // max_t | ||psi(t)|| - 1 |
    double norm_drift() const;
};

using Generator = std::function<Eigen::MatrixXcd(double)>;

inline constexpr int kMagnusOrder = 4;

// n equal fourth-order Magnus substeps of psi from t0 to t1.
Eigen::VectorXcd magnus4_advance(const Generator& h, const Eigen::VectorXcd& psi, double t0, double t1, long long n);

// Adaptive driver over an arbitrary Hermitian generator. Each output interval
// is split into n and 2n substeps, doubling n until the two results agree to
// local_tol; the finer result is kept. StepSizeUnderflow reports the worst
// local error when max_doublings is exhausted.
Trajectory propagate_generator(const Generator& h, const QuantumState& initial, std::span<const double> times,
                               const PropagationControls& controls = {});

// The grid must be strictly increasing and start at initial.t; the initial
// state must be normalized to 1e-9.
Trajectory propagate(const HamiltonianOperator& op, const QuantumState& initial, std::span<const double> times,
                     const PropagationControls& controls = {});

Trajectory propagate_counterdiabatic(const CounterdiabaticDrive& drive, const QuantumState& initial,
                                     std::span<const double> times, const PropagationControls& controls = {});

// F(t) = |<psi(t)|D(t)>|^2 per grid point; GridMismatch unless both series
// share the time grid.
std::vector<double> overlap_fidelity(const Trajectory& traj, std::span<const SpectralSnapshot> dark_path);

}  // namespace stirap
