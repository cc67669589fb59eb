// Collective spin of the two lower levels, Rydberg number
// and the variance-based macroscopicity measures.
//
// J acts on the g-e manifold of each n_r sector separately (direct sum):
//   J_x = (a_g^dag a_e + a_g a_e^dag) / 2,  J_z = (n_e - n_g) / 2,
//   J_y = (J_+ - J_-) / (2i) with J_+ = a_e^dag a_g, so [J_x, J_y] = i J_z.

#pragma once

#include "stirap/dynamics.hpp"
#include "stirap/model.hpp"

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace stirap {

struct SpinOperatorSet {
    int n_atoms = 0;
    Eigen::MatrixXd jx;
    Eigen::MatrixXcd jy;
    Eigen::MatrixXd jz;
    Eigen::VectorXd rydberg_number;  // diagonal of n_r

    Eigen::MatrixXcd jx_c() const { return jx.cast<std::complex<double>>(); }
    Eigen::MatrixXcd jz_c() const { return jz.cast<std::complex<double>>(); }
};

SpinOperatorSet build_spin_operators(const CollectiveBasis& basis);

// <A^2> - <A>^2, clamped at zero against rounding.
double variance(const Eigen::VectorXcd& psi, const Eigen::MatrixXcd& a);
double variance(const QuantumState& state, const Eigen::MatrixXcd& a);

// 3x3 symmetrized covariance of (J_x, J_y, J_z).
Eigen::Matrix3d spin_covariance(const Eigen::VectorXcd& psi, const SpinOperatorSet& ops);

// max over unit n of Var(2 n.J) / N = 4 lambda_max(cov) / N. Restricted to
// collective spin directions, hence a lower bound on the maximum over all
// sums of single-particle +-1 observables.
double effective_size(const Eigen::VectorXcd& psi, const SpinOperatorSet& ops);
double effective_size(const QuantumState& state, const SpinOperatorSet& ops);

struct SectorSumRule {
    int n_r = 0;
    double weight = 0.0;             // probability in the sector
    double spin_j = 0.0;             // N/2 for n_r = 0, (N-1)/2 for n_r = 1
    double jx2 = 0.0;                // sector-normalized <J_x^2>
    double jy2_plus_jz2 = 0.0;       // sector-normalized <J_y^2> + <J_z^2>
    double sum_rule_residual = 0.0;  // <J_y^2> + <J_z^2> - J(J+1)
    double casimir_residual = 0.0;   // <J^2> - J(J+1)
};

// Per-sector report; entry n_r is empty when the sector weight is <= 1e-10.
std::array<std::optional<SectorSumRule>, 2> sector_sum_rules(const Eigen::VectorXcd& psi, const SpinOperatorSet& ops);

// Single-sector report; SectorMixed if both sectors carry weight > 1e-10.
SectorSumRule total_spin_sum_rule(const Eigen::VectorXcd& psi, const SpinOperatorSet& ops);
SectorSumRule total_spin_sum_rule(const QuantumState& state, const SpinOperatorSet& ops);

// <n_r>, in [0, 1].
double rydberg_parity(const Eigen::VectorXcd& psi, const SpinOperatorSet& ops);
double rydberg_parity(const QuantumState& state, const SpinOperatorSet& ops);

struct VarianceSeries {
    std::vector<double> times;
    std::vector<double> var_jx;
    std::vector<double> var_jy;
    std::vector<double> var_jz;
    std::vector<double> mean_nr;
    std::vector<double> n_eff;
};

VarianceSeries variance_series(const Trajectory& traj, const SpinOperatorSet& ops);
VarianceSeries variance_series(std::span<const SpectralSnapshot> dark_path, const SpinOperatorSet& ops);

}  // namespace stirap
