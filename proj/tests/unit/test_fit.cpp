#include "doctest.h"
#include "oracles.hpp"

#include "stirap/errors.hpp"
#include "stirap/fit.hpp"

#include <cmath>
#include <vector>

using namespace stirap;

TEST_CASE("power law recovers exponent and prefactor") {
    testing_support::Rng rng(51);
    for (int k = 0; k < 20; ++k) {
        const double a = rng.uniform(-3.0, 3.0);
        const double c = rng.uniform(0.1, 10.0);
        std::vector<double> xs, ys;
        for (double x : {10.0, 20.0, 30.0, 40.0, 50.0}) {
            xs.push_back(x);
            ys.push_back(c * std::pow(x, a));
        }
        const ScalingFit fit = fit_power_law(xs, ys);
        CHECK(fit.exponent == doctest::Approx(a).scale(1.0));
        CHECK(fit.prefactor == doctest::Approx(c));
        CHECK(fit.residual < 1e-12);

        // rescaling the data moves only the prefactor
        for (double& y : ys) y *= 2.0;
        const ScalingFit doubled = fit_power_law(xs, ys);
        CHECK(doubled.exponent == doctest::Approx(a).scale(1.0));
        CHECK(doubled.prefactor == doctest::Approx(2 * c));
    }
    const std::vector<double> xs{1, 2, 4, 8}, flat{3, 3, 3, 3};
    CHECK(fit_power_law(xs, flat).exponent == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("power law input checks") {
    const std::vector<double> two{1.0, 2.0}, three{1.0, 2.0, 3.0}, one{1.0};
    CHECK_THROWS_AS(fit_power_law(two, three), InvalidArgument);
    CHECK_THROWS_AS(fit_power_law(one, one), InvalidArgument);
    const std::vector<double> neg{-1.0, 2.0};
    CHECK_THROWS_AS(fit_power_law(neg, two), InvalidArgument);
    const std::vector<double> same{2.0, 2.0};
    CHECK_THROWS_AS(fit_power_law(same, two), InvalidArgument);
}
