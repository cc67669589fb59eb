#pragma once

#include <span>
#include <vector>

namespace stirap {

// y ~ prefactor * x^exponent, fitted by least squares in log-log space.
struct ScalingFit {
    double exponent = 0.0;
    double prefactor = 0.0;
    double residual = 0.0;  // RMS of the log-space residuals
    std::vector<double> xs;
    std::vector<double> ys;
};

// Requires at least two distinct positive x values and positive y values.
ScalingFit fit_power_law(std::span<const double> xs, std::span<const double> ys);

}  // namespace stirap
