#include "stirap/fit.hpp"

#include "stirap/errors.hpp"

#include <cmath>

namespace stirap {

ScalingFit fit_power_law(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) {
        throw InvalidArgument("power-law fit: x and y sizes differ");
    }
    if (xs.size() < 2) {
        throw InvalidArgument("power-law fit needs at least two points");
    }
    const auto n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) {
            throw InvalidArgument("power-law fit needs strictly positive data");
        }
        sx += std::log(xs[i]);
        sy += std::log(ys[i]);
    }
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = std::log(xs[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(ys[i]) - my);
    }
    if (sxx == 0.0) {
        throw InvalidArgument("power-law fit needs at least two distinct x values");
    }

    ScalingFit fit;
    fit.exponent = sxy / sxx;
    const double intercept = my - fit.exponent * mx;
    fit.prefactor = std::exp(intercept);
    double ss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = std::log(ys[i]) - (intercept + fit.exponent * std::log(xs[i]));
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / n);
    fit.xs.assign(xs.begin(), xs.end());
    fit.ys.assign(ys.begin(), ys.end());
    return fit;
}

}  // namespace stirap
