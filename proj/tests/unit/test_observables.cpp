#include "doctest.h"
#include "oracles.hpp"

#include "stirap/errors.hpp"
#include "stirap/observables.hpp"
#include "stirap/spectral.hpp"

#include <cmath>
#include <numbers>

using namespace stirap;
using testing_support::Rng;

namespace {

using cd = std::complex<double>;

Eigen::MatrixXcd sector_block(const Eigen::MatrixXcd& m, int n, int n_r) {
    const Eigen::Index start = n_r == 0 ? 0 : n + 1;
    const Eigen::Index size = n_r == 0 ? n + 1 : n;
    return m.block(start, start, size, size);
}

// Brute-force max over a direction grid, then three zoomed grids.
double grid_effective_size(const Eigen::VectorXcd& psi, const SpinOperatorSet& ops) {
    const Eigen::MatrixXcd jx = ops.jx_c(), jy = ops.jy, jz = ops.jz_c();
    auto value = [&](double th, double ph) {
        const Eigen::MatrixXcd a =
            2.0 * (std::sin(th) * std::cos(ph) * jx + std::sin(th) * std::sin(ph) * jy + std::cos(th) * jz);
        return variance(psi, a) / ops.n_atoms;
    };
    double best = -1.0, bt = 0.0, bp = 0.0;
    double th_lo = 0.0, th_hi = std::numbers::pi, ph_lo = 0.0, ph_hi = 2 * std::numbers::pi;
    for (int level = 0; level < 4; ++level) {
        const int m = 60;
        for (int i = 0; i <= m; ++i) {
            for (int j = 0; j <= m; ++j) {
                const double th = th_lo + (th_hi - th_lo) * i / m;
                const double ph = ph_lo + (ph_hi - ph_lo) * j / m;
                const double v = value(th, ph);
                if (v > best) {
                    best = v;
                    bt = th;
                    bp = ph;
                }
            }
        }
        const double dth = 2 * (th_hi - th_lo) / m, dph = 2 * (ph_hi - ph_lo) / m;
        th_lo = bt - dth;
        th_hi = bt + dth;
        ph_lo = bp - dph;
        ph_hi = bp + dph;
    }
    return best;
}

Eigen::VectorXd final_dark_state(int n) {
    const HamiltonianOperator op(CollectiveBasis(n), PulseSchedule::fast_default());
    return dark_state_at(op, 3.5);
}

}  // namespace

TEST_CASE("spin operators for one and two atoms") {
    const SpinOperatorSet one = build_spin_operators(CollectiveBasis(1));
    Eigen::Matrix2cd sx, sy, sz;
    sx << 0, 1, 1, 0;
    sy << 0, cd(0, 1), cd(0, -1), 0;  // ordered (down, up)
    sz << -1, 0, 0, 1;  // |1,0,0> is spin down
    CHECK((sector_block(one.jx_c(), 1, 0) - sx / 2.0).norm() < 1e-15);
    CHECK((sector_block(one.jy, 1, 0) - sy / 2.0).norm() < 1e-15);
    CHECK((sector_block(one.jz_c(), 1, 0) - sz / 2.0).norm() < 1e-15);

    const SpinOperatorSet two = build_spin_operators(CollectiveBasis(2));
    const Eigen::MatrixXcd jx = sector_block(two.jx_c(), 2, 0);
    const Eigen::MatrixXcd jz = sector_block(two.jz_c(), 2, 0);
    const Eigen::MatrixXcd jy = sector_block(two.jy, 2, 0);
    const Eigen::MatrixXcd casimir = jx * jx + jy * jy + jz * jz;
    CHECK((casimir - 2.0 * Eigen::MatrixXcd::Identity(3, 3)).norm() < 1e-14);
    CHECK(jz(0, 0).real() == -1.0);
    CHECK(jx(0, 1).real() == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("spin algebra holds on every sector") {
    for (int n : {1, 2, 5, 10, 17}) {
        const SpinOperatorSet ops = build_spin_operators(CollectiveBasis(n));
        const Eigen::MatrixXcd jx = ops.jx_c(), jy = ops.jy, jz = ops.jz_c();
        const cd i(0, 1);
        CHECK((jx * jy - jy * jx - i * jz).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((jy * jz - jz * jy - i * jx).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((jz * jx - jx * jz - i * jy).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((ops.jx - ops.jx.transpose()).norm() == 0.0);
        CHECK((jy - jy.adjoint()).norm() == 0.0);
        CHECK(std::abs(sector_block(jz, n, 0).trace()) < 1e-12);
        for (Eigen::Index k = 0; k < ops.rydberg_number.size(); ++k) {
            const double v = ops.rydberg_number(k);
            CHECK((v == 0.0 || v == 1.0));
        }
        CHECK(ops.rydberg_number.sum() == n);
    }
}

TEST_CASE("variances of simple states") {
    for (int n : {1, 4, 9}) {
        const CollectiveBasis basis(n);
        const SpinOperatorSet ops = build_spin_operators(basis);
        const auto ground = QuantumState::basis_state(basis, {n, 0, 0}, 0.0);
        CHECK(variance(ground, ops.jx_c()) == doctest::Approx(n / 4.0));
        CHECK(variance(ground, ops.jz_c()) == 0.0);
        CHECK(effective_size(ground, ops) == doctest::Approx(1.0));
        CHECK(rydberg_parity(ground, ops) == 0.0);

        const SectorSumRule rule = total_spin_sum_rule(ground, ops);
        CHECK(rule.n_r == 0);
        CHECK(rule.jy2_plus_jz2 == doctest::Approx(n / 4.0 + n * n / 4.0));
        CHECK(std::abs(rule.casimir_residual) < 1e-12);
    }
}

TEST_CASE("effective size matches a direction-grid search") {
    Rng rng(61);
    for (int n : {2, 3, 4}) {
        const SpinOperatorSet ops = build_spin_operators(CollectiveBasis(n));
        for (int k = 0; k < 3; ++k) {
            const Eigen::VectorXcd psi = rng.state(2 * n + 1);
            CHECK(effective_size(psi, ops) == doctest::Approx(grid_effective_size(psi, ops)).epsilon(1e-6));
        }
    }
}

TEST_CASE("effective size is invariant under rotations about z") {
    Rng rng(62);
    for (int n = 1; n <= 6; ++n) {
        const SpinOperatorSet ops = build_spin_operators(CollectiveBasis(n));
        for (int k = 0; k < 5; ++k) {
            const Eigen::VectorXcd psi = rng.state(2 * n + 1);
            const double phi = rng.uniform(0.0, 2 * std::numbers::pi);
            Eigen::VectorXcd rotated(psi.size());
            for (Eigen::Index i = 0; i < psi.size(); ++i) rotated(i) = std::polar(1.0, -phi * ops.jz(i, i)) * psi(i);
            CHECK(effective_size(rotated, ops) == doctest::Approx(effective_size(psi, ops)).epsilon(1e-10));
            const Eigen::Matrix3d c = spin_covariance(psi, ops);
            CHECK((c - c.transpose()).norm() < 1e-12);
        }
    }
}

TEST_CASE("final dark state parity") {
    for (int n : {4, 5, 10, 11}) {
        const SpinOperatorSet ops = build_spin_operators(CollectiveBasis(n));
        const Eigen::VectorXcd d = final_dark_state(n).cast<cd>();
        CHECK(rydberg_parity(d, ops) == doctest::Approx(n % 2 == 0 ? 0.0 : 1.0).epsilon(1e-6).scale(1.0));
        CHECK(variance(d, ops.jx_c()) <= 1e-8);
    }
}

TEST_CASE("total spin sum rule in the final dark state") {
    const SpinOperatorSet even = build_spin_operators(CollectiveBasis(10));
    const SectorSumRule r10 = total_spin_sum_rule(final_dark_state(10).cast<cd>(), even);
    CHECK(r10.n_r == 0);
    CHECK(r10.spin_j == 5.0);
    CHECK(r10.jy2_plus_jz2 == doctest::Approx(30.0).epsilon(1e-8));
    CHECK(std::abs(r10.sum_rule_residual) < 1e-8);
    CHECK(r10.jx2 < 1e-8);

    const SpinOperatorSet odd = build_spin_operators(CollectiveBasis(11));
    const SectorSumRule r11 = total_spin_sum_rule(final_dark_state(11).cast<cd>(), odd);
    CHECK(r11.n_r == 1);
    CHECK(r11.spin_j == 5.0);
    CHECK(r11.jy2_plus_jz2 == doctest::Approx(30.0).epsilon(1e-8));
}

TEST_CASE("sum rule rejects states spread over both sectors") {
    const CollectiveBasis basis(3);
    const SpinOperatorSet ops = build_spin_operators(basis);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(basis.dimension());
    psi(basis.index_of({3, 0, 0})) = std::sqrt(0.5);
    psi(basis.index_of({2, 0, 1})) = std::sqrt(0.5);
    CHECK_THROWS_AS(total_spin_sum_rule(psi, ops), SectorMixed);
    const auto per_sector = sector_sum_rules(psi, ops);
    REQUIRE(per_sector[0].has_value());
    REQUIRE(per_sector[1].has_value());
    CHECK(per_sector[0]->weight == doctest::Approx(0.5));
    CHECK(per_sector[1]->spin_j == 1.0);
    CHECK(std::abs(per_sector[1]->casimir_residual) < 1e-12);
}

TEST_CASE("variance along the adiabatic path") {
    const int n = 10;
    const HamiltonianOperator op(CollectiveBasis(n), PulseSchedule::fast_default());
    std::vector<double> times;
    for (int i = 0; i <= 410; ++i) times.push_back(0.01 * i);
    const auto path = track_dark_state(op, times);
    const SpinOperatorSet ops = build_spin_operators(op.basis());
    const VarianceSeries series = variance_series(path, ops);
    REQUIRE(series.times.size() == times.size());
    CHECK(series.var_jx.front() == doctest::Approx(n / 4.0).epsilon(1e-10));
    CHECK(series.var_jx.back() <= 1e-8);
    double peak = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        CHECK(series.var_jx[i] >= 0.0);
        CHECK(series.n_eff[i] >= 0.0);
        peak = std::max(peak, series.var_jx[i]);
    }
    CHECK(series.n_eff.back() > 1.0);

    // the peak is sharp; resolve it on a fine local grid
    const Eigen::MatrixXcd jx = ops.jx_c();
    double fine_peak = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double t = 1.50 + 1e-4 * i;
        fine_peak = std::max(fine_peak, variance(dark_state_at(op, t).cast<cd>(), jx));
    }
    CHECK(fine_peak >= peak);
    CHECK(fine_peak <= 16.8360695 + 1e-6);
    CHECK(fine_peak == doctest::Approx(16.8360695).epsilon(5e-6));
}
