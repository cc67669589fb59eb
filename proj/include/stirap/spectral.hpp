// Instantaneous spectrum, dark-state tracking and the
// minimum-gap search.
//
// The dark state is the eigenvector whose eigenvalue is nearest zero. H(t)
// anticommutes with (-1)^{n_e}, so the spectrum is symmetric about zero and,
// in odd dimension 2N+1, a zero eigenvalue always exists.

#pragma once

#include "stirap/fit.hpp"
#include "stirap/model.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace stirap {

struct SpectralSnapshot {
    double t = 0.0;
    Eigen::VectorXd eigenvalues;   // ascending, rad/us
    Eigen::MatrixXd eigenvectors;  // orthonormal columns, real
    Eigen::Index dark_index = 0;
    double gap = 0.0;              // distance from the dark level to its nearest neighbour
    double norm = 0.0;             // spectral norm of H(t)

    auto dark_vector() const { return eigenvectors.col(dark_index); }
    double dark_energy() const { return eigenvalues(dark_index); }
};

struct TimeWindow {
    double begin = 0.0;
    double end = 0.0;
};

struct GapSearchOptions {
    int scan_points = 2000;
    double refine_tol = 1e-4;  // us
};

struct GapProfile {
    std::vector<double> times;
    std::vector<double> gaps;
    double t_c = 0.0;
    double gap_min = 0.0;
};

struct GapScaling {
    ScalingFit fit;                   // gap_min vs N
    std::vector<int> atom_numbers;
    std::vector<GapProfile> profiles;  // one per entry of atom_numbers
};

// Eigen-decomposition of an explicit symmetric matrix. Column signs follow a
// fixed convention (largest-magnitude entry positive); if prev is given the
// dark column is instead signed to overlap nonnegatively with prev's.
// Throws DegenerateDarkState if two eigenvalues lie within 1e-9 ||H|| of zero.
SpectralSnapshot diagonalize_matrix(const Eigen::MatrixXd& h, double t, const SpectralSnapshot* prev = nullptr);

SpectralSnapshot diagonalize(const HamiltonianOperator& op, double t, const SpectralSnapshot* prev = nullptr);

// Continuity-gauged dark path. The grid must be strictly increasing and start
// where the pump is off. Points where H vanishes carry the dark state
// analytically (|N,0,0> before the pulses, the previous dark vector after).
// Throws TrackingLost when consecutive dark vectors overlap by less than 0.5.
std::vector<SpectralSnapshot> track_dark_state(const HamiltonianOperator& op, std::span<const double> times);

// Gap from eigenvalues only; 0 when H(t) vanishes.
double dark_gap(const HamiltonianOperator& op, double t);

// Deepest interior local minimum of the gap on the window: grid scan, then
// golden-section refinement to options.refine_tol.
GapProfile find_critical_time(const HamiltonianOperator& op, TimeWindow window, const GapSearchOptions& options = {});

// Pump/Rydberg overlap interval of the schedule.
TimeWindow overlap_window(const PulseSchedule& pulses);

// Power-law fit of gap_min(N) over at least four distinct atom numbers, each
// at its own t_c(N) inside the pulse overlap.
GapScaling fit_gap_scaling(std::span<const int> atom_numbers, const PulseSchedule& pulses,
                           const GapSearchOptions& options = {});

// Dark vector alone, from the null space of the (-1)^{n_e} = +1 -> -1 block
// of H(t). Signed to overlap nonnegatively with reference when given, else
// with the largest-magnitude entry positive.
Eigen::VectorXd dark_state_at(const HamiltonianOperator& op, double t, const Eigen::VectorXd* reference = nullptr);

}  // namespace stirap
