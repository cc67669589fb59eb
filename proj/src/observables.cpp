#include "stirap/observables.hpp"

#include "stirap/errors.hpp"

#include <algorithm>
#include <cmath>

namespace stirap {

namespace {

using cd = std::complex<double>;

constexpr double kSectorWeightTol = 1e-10;

}  // namespace

SpinOperatorSet build_spin_operators(const CollectiveBasis& basis) {
    const Eigen::Index dim = basis.dimension();
    SpinOperatorSet ops;
    ops.n_atoms = basis.n_atoms();
    Eigen::MatrixXd raise = Eigen::MatrixXd::Zero(dim, dim);  // J_+ = a_e^dag a_g
    ops.jz = Eigen::MatrixXd::Zero(dim, dim);
    ops.rydberg_number = Eigen::VectorXd::Zero(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const auto [ng, ne, nr] = basis[i];
        ops.jz(i, i) = 0.5 * (ne - ng);
        ops.rydberg_number(i) = nr;
        if (ng > 0) {
            const Eigen::Index j = basis.index_of({ng - 1, ne + 1, nr});
            raise(j, i) = std::sqrt(static_cast<double>(ng) * (ne + 1));
        }
    }
    const Eigen::MatrixXd lower = raise.transpose();
    ops.jx = 0.5 * (raise + lower);
    ops.jy = (raise - lower).cast<cd>() / cd(0.0, 2.0);
    return ops;
}

double variance(const Eigen::VectorXcd& psi, const Eigen::MatrixXcd& a) {
    const Eigen::VectorXcd a_psi = a * psi;
    const double mean = psi.dot(a_psi).real();
    return std::max(0.0, a_psi.squaredNorm() - mean * mean);
}

double variance(const QuantumState& state, const Eigen::MatrixXcd& a) { return variance(state.amplitudes, a); }

Eigen::Matrix3d spin_covariance(const Eigen::VectorXcd& psi, const SpinOperatorSet& ops) {
    const std::array<Eigen::MatrixXcd, 3> j = {ops.jx_c(), ops.jy, ops.jz_c()};
    std::array<Eigen::VectorXcd, 3> j_psi;
    std::array<double, 3> mean{};
    for (std::size_t a = 0; a < 3; ++a) {
        j_psi[a] = j[a] * psi;
        mean[a] = psi.dot(j_psi[a]).real();
    }
    Eigen::Matrix3d cov;
    for (std::size_t a = 0; a < 3; ++a) {
        for (std::size_t b = 0; b < 3; ++b) {
            // <{J_a, J_b}>/2 = Re <J_a psi | J_b psi>
            cov(a, b) = j_psi[a].dot(j_psi[b]).real() - mean[a] * mean[b];
        }
    }
    return cov;
}

double effective_size(const Eigen::VectorXcd& psi, const SpinOperatorSet& ops) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(spin_covariance(psi, ops), Eigen::EigenvaluesOnly);
    return std::max(0.0, 4.0 * solver.eigenvalues()(2) / ops.n_atoms);
}

double effective_size(const QuantumState& state, const SpinOperatorSet& ops) {
    return effective_size(state.amplitudes, ops);
}

std::array<std::optional<SectorSumRule>, 2> sector_sum_rules(const Eigen::VectorXcd& psi, const SpinOperatorSet& ops) {
    std::array<std::optional<SectorSumRule>, 2> out;
    const Eigen::MatrixXcd jx = ops.jx_c();
    const Eigen::MatrixXcd jz = ops.jz_c();
    for (int nr = 0; nr < 2; ++nr) {
        Eigen::VectorXcd part = psi;
        for (Eigen::Index i = 0; i < psi.size(); ++i) {
            if (static_cast<int>(ops.rydberg_number(i)) != nr) {
                part(i) = 0.0;
            }
        }
        const double weight = part.squaredNorm();
        if (weight <= kSectorWeightTol) {
            continue;
        }
        part /= std::sqrt(weight);
        SectorSumRule r;
        r.n_r = nr;
        r.weight = weight;
        r.spin_j = 0.5 * (ops.n_atoms - nr);
        const double casimir = r.spin_j * (r.spin_j + 1.0);
        r.jx2 = (jx * part).squaredNorm();
        r.jy2_plus_jz2 = (ops.jy * part).squaredNorm() + (jz * part).squaredNorm();
        r.sum_rule_residual = r.jy2_plus_jz2 - casimir;
        r.casimir_residual = r.jx2 + r.jy2_plus_jz2 - casimir;
        out[static_cast<std::size_t>(nr)] = r;
    }
    return out;
}

SectorSumRule total_spin_sum_rule(const Eigen::VectorXcd& psi, const SpinOperatorSet& ops) {
    const auto sectors = sector_sum_rules(psi, ops);
    if (sectors[0] && sectors[1]) {
        throw SectorMixed(sectors[0]->weight, sectors[1]->weight);
    }
    if (!sectors[0] && !sectors[1]) {
        throw InvalidArgument("sum rule needs a nonzero state");
    }
    return sectors[0] ? *sectors[0] : *sectors[1];
}

SectorSumRule total_spin_sum_rule(const QuantumState& state, const SpinOperatorSet& ops) {
    return total_spin_sum_rule(state.amplitudes, ops);
}

double rydberg_parity(const Eigen::VectorXcd& psi, const SpinOperatorSet& ops) {
    return (psi.cwiseAbs2().array() * ops.rydberg_number.array()).sum();
}

double rydberg_parity(const QuantumState& state, const SpinOperatorSet& ops) {
    return rydberg_parity(state.amplitudes, ops);
}

namespace {

void append_sample(VarianceSeries& series, double t, const Eigen::VectorXcd& psi, const SpinOperatorSet& ops,
                   const Eigen::MatrixXcd& jx, const Eigen::MatrixXcd& jz) {
    series.times.push_back(t);
    series.var_jx.push_back(variance(psi, jx));
    series.var_jy.push_back(variance(psi, ops.jy));
    series.var_jz.push_back(variance(psi, jz));
    series.mean_nr.push_back(rydberg_parity(psi, ops));
    series.n_eff.push_back(effective_size(psi, ops));
}

}  // namespace

VarianceSeries variance_series(const Trajectory& traj, const SpinOperatorSet& ops) {
    VarianceSeries series;
    const Eigen::MatrixXcd jx = ops.jx_c();
    const Eigen::MatrixXcd jz = ops.jz_c();
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        append_sample(series, traj.times[i], traj.states[i].amplitudes, ops, jx, jz);
    }
    return series;
}

VarianceSeries variance_series(std::span<const SpectralSnapshot> dark_path, const SpinOperatorSet& ops) {
    VarianceSeries series;
    const Eigen::MatrixXcd jx = ops.jx_c();
    const Eigen::MatrixXcd jz = ops.jz_c();
    for (const auto& s : dark_path) {
        append_sample(series, s.t, s.dark_vector().cast<cd>(), ops, jx, jz);
    }
    return series;
}

}  // namespace stirap
