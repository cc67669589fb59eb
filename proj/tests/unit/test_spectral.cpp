#include "doctest.h"
#include "oracles.hpp"

#include "stirap/errors.hpp"
#include "stirap/spectral.hpp"

#include <cmath>
#include <vector>

using namespace stirap;
using testing_support::Rng;

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    return out;
}

}  // namespace

TEST_CASE("snapshot invariants") {
    Rng rng(21);
    for (int k = 0; k < 30; ++k) {
        const int n = rng.integer(1, 25);
        const HamiltonianOperator op(CollectiveBasis(n), PulseSchedule::fast_default());
        const double t = rng.uniform(0.05, 4.05);
        const SpectralSnapshot s = diagonalize(op, t);
        const Eigen::MatrixXd h = op.at(t);
        const Eigen::Index dim = op.dimension();

        CHECK((s.eigenvectors.transpose() * s.eigenvectors - Eigen::MatrixXd::Identity(dim, dim)).norm() < 1e-12);
        CHECK((h * s.eigenvectors - s.eigenvectors * s.eigenvalues.asDiagonal()).norm() < 1e-11 * s.norm);
        for (Eigen::Index i = 1; i < dim; ++i) CHECK(s.eigenvalues(i) >= s.eigenvalues(i - 1));
        CHECK(std::abs(s.dark_energy()) <= 1e-11 * s.norm);
        CHECK(s.gap > 0.0);
        Eigen::Index big = 0;
        s.dark_vector().cwiseAbs().maxCoeff(&big);
        CHECK(s.dark_vector()(big) > 0.0);
        CHECK(std::abs(s.gap - dark_gap(op, t)) <= 1e-10 * s.norm);

        // the dark state lives on the even-n_e sublattice
        for (Eigen::Index i = 0; i < dim; ++i) {
            if (op.basis()[i].n_e % 2 == 1) CHECK(std::abs(s.dark_vector()(i)) < 1e-10);
        }
    }
}

TEST_CASE("chiral null-space dark vector agrees with the eigensolver") {
    Rng rng(22);
    for (int k = 0; k < 20; ++k) {
        const int n = rng.integer(1, 40);
        const HamiltonianOperator op(CollectiveBasis(n), PulseSchedule::fast_default());
        const double t = rng.uniform(0.05, 4.05);
        const SpectralSnapshot s = diagonalize(op, t);
        const Eigen::VectorXd ref = s.dark_vector();
        const Eigen::VectorXd d = dark_state_at(op, t, &ref);
        CHECK((d - ref).norm() < 1e-9);
        CHECK((op.at(t) * d).norm() < 1e-10 * s.norm);
    }
}

TEST_CASE("degenerate zero level is rejected") {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(3, 3);
    h(0, 0) = 1.0;
    CHECK_THROWS_AS(diagonalize_matrix(h, 0.0), DegenerateDarkState);
}

TEST_CASE("gap is zero where H vanishes") {
    const HamiltonianOperator op(CollectiveBasis(5), PulseSchedule::fast_default());
    CHECK(dark_gap(op, -1.0) == 0.0);
    CHECK(dark_gap(op, 4.1) == 0.0);
}

TEST_CASE("tracked dark path") {
    const int n = 6;
    const HamiltonianOperator op(CollectiveBasis(n), PulseSchedule::fast_default());
    const auto times = linspace(0.0, 4.1, 411);
    const auto path = track_dark_state(op, times);
    REQUIRE(path.size() == times.size());

    // starts in |N,0,0> and moves continuously
    CHECK(path.front().dark_vector()(0) == doctest::Approx(1.0));
    for (std::size_t i = 1; i < path.size(); ++i) {
        CHECK(path[i].dark_vector().dot(path[i - 1].dark_vector()) > 0.9);
    }
    // even N ends with no Rydberg excitation
    double nr = 0.0;
    for (Eigen::Index i = 0; i < op.dimension(); ++i) {
        nr += op.basis()[i].n_r * std::pow(path.back().dark_vector()(i), 2);
    }
    CHECK(nr < 1e-12);

    CHECK_THROWS_AS(track_dark_state(op, std::vector<double>{0.0, 0.0}), InvalidArgument);
    CHECK_THROWS_AS(track_dark_state(op, std::vector<double>{2.0, 2.5}), InvalidArgument);
}

TEST_CASE("coarse grid loses track of the dark state") {
    const HamiltonianOperator op(CollectiveBasis(2), PulseSchedule::fast_default());
    const std::vector<double> times{0.5, 1.5, 2.0, 2.5, 3.0};
    try {
        (void)track_dark_state(op, times);
        FAIL("expected TrackingLost");
    } catch (const TrackingLost& e) {
        CHECK(e.t_prev == 1.5);
        CHECK(e.t == 2.0);
        CHECK(e.overlap == doctest::Approx(0.368).epsilon(2e-3));
    }
}

TEST_CASE("single atom critical time sits at the symmetry point") {
    const HamiltonianOperator op(CollectiveBasis(1), PulseSchedule::fast_default());
    const GapProfile g = find_critical_time(op, overlap_window(op.pulses()));
    CHECK(g.t_c == doctest::Approx(2.05).epsilon(2e-4 / 2.05));
    // the three-level problem is symmetric under t -> 4.1 - t with the pulses swapped
    Rng rng(23);
    for (int k = 0; k < 20; ++k) {
        const double t = rng.uniform(0.0, 4.1);
        CHECK(dark_gap(op, t) == doctest::Approx(dark_gap(op, 4.1 - t)).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("critical time and minimum gap for N = 10") {
    const HamiltonianOperator op(CollectiveBasis(10), PulseSchedule::fast_default());
    const GapProfile g = find_critical_time(op, overlap_window(op.pulses()));
    CHECK(g.t_c == doctest::Approx(1.5545932597).epsilon(2e-4 / 1.55));
    CHECK(g.gap_min == doctest::Approx(5.636726199).epsilon(1e-6));
    CHECK(g.times.size() == g.gaps.size());
    CHECK(g.t_c > 1.1);
    CHECK(g.t_c < 3.0);
}

TEST_CASE("gap minima over an atom-number ladder") {
    const std::vector<int> ns{2, 4, 8, 16};
    const std::vector<double> t_c{1.980212, 1.756885, 1.594523, 1.484596};
    const std::vector<double> gap{19.79343, 11.25363, 6.610762, 4.095682};
    const GapScaling scaling = fit_gap_scaling(ns, PulseSchedule::fast_default());
    REQUIRE(scaling.profiles.size() == ns.size());
    for (std::size_t i = 0; i < ns.size(); ++i) {
        CHECK(scaling.profiles[i].t_c == doctest::Approx(t_c[i]).epsilon(2e-4));
        CHECK(scaling.profiles[i].gap_min == doctest::Approx(gap[i]).epsilon(1e-6));
    }
    CHECK(scaling.fit.exponent < 0.0);
    CHECK_THROWS_AS(fit_gap_scaling(std::vector<int>{2, 4, 8}, PulseSchedule::fast_default()), InvalidArgument);
    CHECK_THROWS_AS(fit_gap_scaling(std::vector<int>{2, 4, 8, 8}, PulseSchedule::fast_default()), InvalidArgument);
}

TEST_CASE("monotone gap has no interior minimum") {
    const HamiltonianOperator op(CollectiveBasis(3), PulseSchedule::fast_default());
    CHECK_THROWS_AS(find_critical_time(op, {0.2, 0.9}), NoInteriorMinimum);
}
