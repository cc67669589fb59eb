// Diagnostics of the dark-state passage that behave like
// quantum-critical indicators: the rate of change R(t) of the dark state,
// the counterdiabatic correction H_1(t), the work fluctuation it costs, the
// neighbouring-state fidelity susceptibility S(t) and its finite-size collapse.
//
// Eigenvectors are real, so <n|d_t n> = 0 and the first-order formula
//   d_t|0> = sum_{n != 0} |n> <n|d_t H|0> / (e_0 - e_n)
// gives the dark-state derivative without finite differences.

#pragma once

#include "stirap/fit.hpp"
#include "stirap/model.hpp"
#include "stirap/spectral.hpp"

#include <Eigen/Dense>

#include <limits>
#include <span>
#include <vector>

namespace stirap {

inline constexpr double kDefaultGapFloor = 1e-3;  // rad/us

// d_t|0(t)>. Zero when dH vanishes; GapFloorViolation if the dark gap is at
// or below gap_floor otherwise.
Eigen::VectorXd dark_state_derivative(const SpectralSnapshot& snapshot, const Eigen::MatrixXd& dH,
                                      double gap_floor = kDefaultGapFloor);

// R(t) = || d_t|0(t)> ||, in 1/us.
double dark_state_rate(const SpectralSnapshot& snapshot, const Eigen::MatrixXd& dH,
                       double gap_floor = kDefaultGapFloor);

struct CDHamiltonian {
    double t = 0.0;
    double gap_floor = kDefaultGapFloor;
    Eigen::MatrixXcd matrix;  // purely imaginary, Hermitian
};

// H_1 = i sum_{m != n} |m> <m|d_t H|n> / (e_n - e_m) <n|. Throws
// DegeneracyEncountered (naming the level pair) when two levels are closer
// than gap_floor and dH is nonzero.
CDHamiltonian build_cd_hamiltonian(const SpectralSnapshot& snapshot, const Eigen::MatrixXd& dH,
                                   double gap_floor = kDefaultGapFloor);

// Var of H_CD = H_0 + H_1 in the dark state, from the assembled matrices.
double cd_variance(const SpectralSnapshot& snapshot, const Eigen::MatrixXd& dH, double gap_floor = kDefaultGapFloor);

// delta Delta W(t) = sqrt(Var_0(H_CD) - Var_0(H_0)).
double work_fluctuation(const SpectralSnapshot& snapshot, const Eigen::MatrixXd& dH,
                        double gap_floor = kDefaultGapFloor);

struct RateProfile {
    std::vector<double> times;
    std::vector<double> rate;        // R(t), 1/us
    std::vector<double> work_fluct;  // delta Delta W(t), 1/us
};

// R and delta Delta W on a grid. Both vanish exactly wherever one pulse is
// off, because H(t) is then a scalar multiple of a fixed matrix.
RateProfile rate_profile(const HamiltonianOperator& op, std::span<const double> times,
                         double gap_floor = kDefaultGapFloor);

struct WorkIntegralOptions {
    int initial_points = 257;
    int max_points = 65537;
    double rel_tol = 1e-3;
    double gap_floor = kDefaultGapFloor;
};

struct WorkIntegral {
    int n_atoms = 0;
    double integral = 0.0;  // int_{begin}^{begin+tau} delta Delta W dt, dimensionless
    int points = 0;
};

// Trapezoid rule with grid doubling until successive estimates agree to
// rel_tol. Only the pulse overlap contributes.
WorkIntegral integrate_work_fluctuation(const HamiltonianOperator& op, double tau,
                                        const WorkIntegralOptions& options = {});

struct WorkScaling {
    ScalingFit fit;  // integral vs N, exponent alpha
    std::vector<WorkIntegral> integrals;
};

WorkScaling integrated_work_scaling(std::span<const int> atom_numbers, const PulseSchedule& pulses, double tau,
                                    const WorkIntegralOptions& options = {});

struct SusceptibilityOptions {
    double epsilon = 0.0;  // us; <= 0 selects 0.01 / N
    double rel_tol = 0.01;
    double abs_floor = 1e-8;  // 1/us^2
};

struct SusceptibilityProfile {
    int n_atoms = 0;
    double epsilon = 0.0;
    std::vector<double> times;
    std::vector<double> s;       // 2 (F(t, eps) - 1) / eps^2, 1/us^2
    std::vector<double> s_half;  // same with eps / 2
    double t_n = 0.0;
    double s_min = 0.0;
};

// S(t) from F(t, eps) = |<0(t - eps)|0(t + eps)>| on the adiabatic dark
// states. NotConverged if the eps and eps/2 estimates disagree by more than
// rel_tol (plus abs_floor). t_N is refined by a parabola through the three
// deepest grid points.
SusceptibilityProfile fidelity_susceptibility(const HamiltonianOperator& op, std::span<const double> times,
                                              const SusceptibilityOptions& options = {});

struct MinimumScanOptions {
    double coarse_step = 0.25;  // in units of 1/N us
    double half_window = 4.0;   // in units of 1/N us, around t_N
    int points = 401;
    SusceptibilityOptions susceptibility;
};

// Coarse S scan over the pulse overlap, then a fine profile of `points`
// samples on t* +- (half_window + coarse_step) / N around the coarse minimum.
SusceptibilityProfile susceptibility_near_minimum(const HamiltonianOperator& op, const MinimumScanOptions& options = {});

struct CollapseOptions {
    double amplitude_exponent = 2.0;
    int grid_points = 401;
    double half_window = std::numeric_limits<double>::infinity();  // in units of N (t - t_N)
};

struct CollapsePair {
    int n_a = 0;
    int n_b = 0;
    double rms = 0.0;  // normalized by the common y-range
};

struct CollapseReport {
    double amplitude_exponent = 2.0;
    std::vector<int> n_atoms;
    std::vector<double> x;                    // N (t - t_N)
    std::vector<std::vector<double>> curves;  // N^-p (S - S(t_N)) on x, one per profile
    double y_range = 0.0;
    std::vector<CollapsePair> pairs;
    double max_rms = 0.0;
};

// Rescales each profile, interpolates onto the common x-range and reports
// pairwise RMS deviations. InsufficientOverlap if the x-ranges are disjoint.
CollapseReport scaling_collapse(std::span<const SusceptibilityProfile> profiles, const CollapseOptions& options = {});

// H(t) + H_1(t) for counterdiabatic propagation. H_1 vanishes wherever a
// single pulse drives the system; elsewhere the dark gap must exceed the floor.
class CounterdiabaticDrive {
public:
    explicit CounterdiabaticDrive(HamiltonianOperator op, double gap_floor = kDefaultGapFloor);

    const HamiltonianOperator& hamiltonian() const { return op_; }
    double gap_floor() const { return gap_floor_; }

    Eigen::MatrixXcd correction_at(double t) const;
    Eigen::MatrixXcd total_at(double t) const;

private:
    HamiltonianOperator op_;
    double gap_floor_;
};

}  // namespace stirap
