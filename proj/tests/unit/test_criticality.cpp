#include "doctest.h"
#include "oracles.hpp"

#include "stirap/criticality.hpp"
#include "stirap/errors.hpp"

#include <cmath>
#include <complex>
#include <vector>

using namespace stirap;
using testing_support::Rng;

namespace {

using cd = std::complex<double>;

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    return out;
}

}  // namespace

TEST_CASE("rate of change agrees with finite differences of the dark vector") {
    Rng rng(31);
    const double h = 1e-5;
    for (int k = 0; k < 20; ++k) {
        const int n = rng.integer(1, 20);
        const HamiltonianOperator op(CollectiveBasis(n), PulseSchedule::fast_default());
        const double t = rng.uniform(1.15, 2.95);
        const SpectralSnapshot s = diagonalize(op, t);
        const Eigen::VectorXd ref = s.dark_vector();
        const Eigen::VectorXd plus = dark_state_at(op, t + h, &ref);
        const Eigen::VectorXd minus = dark_state_at(op, t - h, &ref);
        const double fd = ((plus - minus) / (2 * h)).norm();
        const double r = dark_state_rate(s, op.derivative_at(t));
        CHECK(r == doctest::Approx(fd).epsilon(1e-4));

        const Eigen::VectorXd d = dark_state_derivative(s, op.derivative_at(t));
        CHECK(std::abs(d.dot(ref)) < 1e-10 * std::max(1.0, r));
        CHECK((d - (plus - minus) / (2 * h)).norm() <= 1e-4 * std::max(1.0, r));
    }
}

TEST_CASE("rate vanishes with a single pulse or none") {
    const HamiltonianOperator op(CollectiveBasis(5), PulseSchedule::fast_default());
    for (double t : {0.5, 1.05, 3.0, 3.5}) {
        const SpectralSnapshot s = diagonalize(op, t);
        CHECK(dark_state_rate(s, op.derivative_at(t)) < 1e-12);
    }
    const auto prof = rate_profile(op, std::vector<double>{0.5, 2.0, 3.5});
    CHECK(prof.rate[0] == 0.0);
    CHECK(prof.rate[1] > 0.0);
    CHECK(prof.rate[2] == 0.0);
}

TEST_CASE("gap floor is enforced") {
    const HamiltonianOperator op(CollectiveBasis(4), PulseSchedule::fast_default());
    const SpectralSnapshot s = diagonalize(op, 2.0);
    CHECK_THROWS_AS(dark_state_rate(s, op.derivative_at(2.0), 1e6), GapFloorViolation);
    CHECK_THROWS_AS(build_cd_hamiltonian(s, op.derivative_at(2.0), 1e6), DegeneracyEncountered);
}

TEST_CASE("counterdiabatic term structure") {
    Rng rng(32);
    for (int k = 0; k < 20; ++k) {
        const int n = rng.integer(1, 25);
        const HamiltonianOperator op(CollectiveBasis(n), PulseSchedule::fast_default());
        const double t = rng.uniform(1.15, 2.95);
        const SpectralSnapshot s = diagonalize(op, t);
        const CDHamiltonian h1 = build_cd_hamiltonian(s, op.derivative_at(t));
        const double scale = std::max(1.0, h1.matrix.cwiseAbs().maxCoeff());

        CHECK((h1.matrix - h1.matrix.adjoint()).cwiseAbs().maxCoeff() <= 1e-10 * scale);
        CHECK(h1.matrix.real().cwiseAbs().maxCoeff() == 0.0);
        const Eigen::MatrixXcd v = s.eigenvectors.cast<cd>();
        const Eigen::MatrixXcd in_eigenbasis = v.adjoint() * h1.matrix * v;
        CHECK(in_eigenbasis.diagonal().cwiseAbs().maxCoeff() <= 1e-10 * scale);

        // <0|H_CD|0> = 0 and Var_0(H_0) = 0
        const Eigen::VectorXcd dark = s.dark_vector().cast<cd>();
        const Eigen::MatrixXcd hcd = op.at(t).cast<cd>() + h1.matrix;
        CHECK(std::abs(dark.dot(hcd * dark)) <= 1e-10 * std::max(1.0, hcd.cwiseAbs().maxCoeff()));
        CHECK((op.at(t) * s.dark_vector()).norm() <= 1e-10 * s.norm);

        // d_t|0> = -i H_1 |0>
        const Eigen::VectorXcd lhs = dark_state_derivative(s, op.derivative_at(t)).cast<cd>();
        const Eigen::VectorXcd rhs = cd(0.0, -1.0) * (h1.matrix * dark);
        CHECK((lhs - rhs).norm() <= 1e-10 * std::max(1.0, lhs.norm()));
    }
}

TEST_CASE("three-level counterdiabatic term in closed form") {
    const PulseSchedule p = PulseSchedule::fast_default();
    const HamiltonianOperator op(CollectiveBasis(1), p);
    for (double t : {1.3, 1.8, 2.05, 2.4, 2.9}) {
        const double w1 = pulse_value(p, Pulse::Pump, t);
        const double wr = pulse_value(p, Pulse::Rydberg, t);
        const double dw1 = pulse_derivative(p, Pulse::Pump, t);
        const double dwr = pulse_derivative(p, Pulse::Rydberg, t);
        const double theta_dot = (dw1 * wr - w1 * dwr) / (w1 * w1 + wr * wr);

        Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(3, 3);
        expect(0, 2) = cd(0.0, theta_dot);
        expect(2, 0) = cd(0.0, -theta_dot);

        const SpectralSnapshot s = diagonalize(op, t);
        const CDHamiltonian h1 = build_cd_hamiltonian(s, op.derivative_at(t));
        CHECK((h1.matrix - expect).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, std::abs(theta_dot)));
        CHECK(dark_state_rate(s, op.derivative_at(t)) == doctest::Approx(std::abs(theta_dot)).epsilon(1e-10));

        const double w0 = std::hypot(w1, wr);
        Eigen::Vector3d dark(wr / w0, 0.0, -w1 / w0);
        CHECK(std::abs(std::abs(dark.dot(s.dark_vector())) - 1.0) < 1e-12);
    }
}

TEST_CASE("counterdiabatic term vanishes while one pulse drives") {
    const HamiltonianOperator op(CollectiveBasis(6), PulseSchedule::fast_default());
    const CounterdiabaticDrive drive(op);
    for (double t : {-0.3, 0.2, 0.9, 3.05, 3.8, 4.5}) {
        CHECK(drive.correction_at(t).isZero(0.0));
        CHECK(drive.total_at(t).real().isApprox(op.at(t)));
    }
    CHECK_FALSE(drive.correction_at(2.0).isZero(1e-6));
    CHECK_THROWS_AS(CounterdiabaticDrive(op, 0.0), InvalidArgument);
}

TEST_CASE("work fluctuation equals the rate of change") {
    Rng rng(33);
    for (int k = 0; k < 50; ++k) {
        const int n = rng.integer(1, 30);
        const HamiltonianOperator op(CollectiveBasis(n), PulseSchedule::fast_default());
        const double t = rng.uniform(1.12, 2.98);
        const SpectralSnapshot s = diagonalize(op, t);
        const Eigen::MatrixXd dh = op.derivative_at(t);
        const double r = dark_state_rate(s, dh);
        CHECK(std::abs(cd_variance(s, dh) - r * r) <= 1e-8 * r * r);
        CHECK(work_fluctuation(s, dh) == doctest::Approx(r).epsilon(1e-8));
    }
    const HamiltonianOperator op(CollectiveBasis(10), PulseSchedule::fast_default());
    const auto prof = rate_profile(op, linspace(0.0, 4.1, 83));
    for (std::size_t i = 0; i < prof.times.size(); ++i) {
        CHECK(prof.rate[i] >= 0.0);
        CHECK(std::abs(prof.rate[i] - prof.work_fluct[i]) <= 1e-8 * prof.rate[i] + 1e-15);
    }
}

TEST_CASE("rate peaks inside the overlap and grows with N") {
    const PulseSchedule p = PulseSchedule::fast_default();
    const auto times = linspace(1.1, 3.0, 1901);
    double last_peak = 0.0;
    for (int n : {10, 20, 30}) {
        const HamiltonianOperator op(CollectiveBasis(n), p);
        const auto prof = rate_profile(op, times);
        std::size_t arg = 0;
        for (std::size_t i = 0; i < prof.rate.size(); ++i)
            if (prof.rate[i] > prof.rate[arg]) arg = i;
        const GapProfile g = find_critical_time(op, overlap_window(p));
        CHECK(prof.rate[arg] > last_peak);
        // the peak sits within the sharp rise that precedes the gap minimum
        CHECK(std::abs(prof.times[arg] - g.t_c) < 0.1);
        last_peak = prof.rate[arg];
    }
}

TEST_CASE("integrated work fluctuation") {
    const HamiltonianOperator op(CollectiveBasis(10), PulseSchedule::fast_default());
    const WorkIntegral w = integrate_work_fluctuation(op, 4.1);
    CHECK(w.n_atoms == 10);
    CHECK(w.integral == doctest::Approx(11.82).epsilon(2e-3));
    CHECK(w.points >= 257);
    // only the overlap contributes
    CHECK(integrate_work_fluctuation(op, 1.0).integral == 0.0);
    CHECK_THROWS_AS(integrate_work_fluctuation(op, -1.0), InvalidArgument);
}

TEST_CASE("fidelity susceptibility obeys the Taylor identity") {
    const int n = 20;
    const HamiltonianOperator op(CollectiveBasis(n), PulseSchedule::fast_default());
    const auto times = linspace(1.2, 2.9, 69);
    const SusceptibilityProfile prof = fidelity_susceptibility(op, times);
    CHECK(prof.epsilon == doctest::Approx(0.01 / n));
    const auto rates = rate_profile(op, times);
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double r2 = rates.rate[i] * rates.rate[i];
        CHECK(prof.s[i] <= 0.0);
        CHECK(std::abs(prof.s[i] + 4.0 * r2) <= 0.01 * 4.0 * r2 + 1e-8);
    }
    CHECK(prof.t_n >= times.front());
    CHECK(prof.t_n <= times.back());

    const auto flat = fidelity_susceptibility(op, std::vector<double>{0.3, 0.5, 3.5, 3.7});
    for (double v : flat.s) CHECK(v == 0.0);
}

TEST_CASE("collapse of exactly scaling synthetic profiles") {
    auto make = [](int n, double t_n) {
        SusceptibilityProfile p;
        p.n_atoms = n;
        p.t_n = t_n;
        for (int i = 0; i <= 4000; ++i) {
            const double t = t_n - 0.2 + 0.4 * i / 4000.0;
            const double x = n * (t - t_n);
            p.times.push_back(t);
            p.s.push_back(-double(n) * n / (1.0 + x * x));
        }
        p.s_min = -double(n) * n;
        return p;
    };
    const std::vector<SusceptibilityProfile> profiles{make(50, 1.3), make(100, 1.25), make(150, 1.2)};
    const CollapseReport good = scaling_collapse(profiles);
    CHECK(good.max_rms < 1e-4);
    CHECK(good.pairs.size() == 3);
    CHECK(good.x.front() == doctest::Approx(-10.0));
    CHECK(good.x.back() == doctest::Approx(10.0));

    CollapseOptions wrong;
    wrong.amplitude_exponent = 1.0;
    CHECK(scaling_collapse(profiles, wrong).max_rms > 0.1);

    const std::vector<SusceptibilityProfile> same{profiles[1], profiles[1]};
    CHECK(scaling_collapse(same).max_rms == 0.0);

    SusceptibilityProfile shifted = profiles[0];
    shifted.t_n = 10.0;
    const std::vector<SusceptibilityProfile> disjoint{shifted, profiles[1]};
    CHECK_THROWS_AS(scaling_collapse(disjoint), InsufficientOverlap);
    CHECK_THROWS_AS(scaling_collapse(std::span(profiles).first(1)), InvalidArgument);
}
