#include "stirap/errors.hpp"

#include <cstdio>

namespace stirap {

namespace {

std::string format(const char* fmt, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

}  // namespace

DegenerateDarkState::DegenerateDarkState(double t_, std::size_t count)
    : NumericalError(format("degenerate dark state at t=%.9g us: %zu eigenvalues at zero", t_, count)),
      t(t_),
      near_zero_count(count) {}

TrackingLost::TrackingLost(double t_prev_, double t_, double overlap_)
    : NumericalError(format("dark state tracking lost between t=%.9g and t=%.9g us (overlap %.6g < 0.5)",
                            t_prev_, t_, overlap_)),
      t_prev(t_prev_),
      t(t_),
      overlap(overlap_) {}

NoInteriorMinimum::NoInteriorMinimum(double begin_, double end_)
    : NumericalError(format("gap has no interior minimum on [%.9g, %.9g] us", begin_, end_)),
      begin(begin_),
      end(end_) {}

StepSizeUnderflow::StepSizeUnderflow(double t0_, double t1_, double worst)
    : NumericalError(format("step size underflow on [%.9g, %.9g] us, worst local error %.3e", t0_, t1_, worst)),
      t0(t0_),
      t1(t1_),
      worst_local_error(worst) {}

GapFloorViolation::GapFloorViolation(double t_, double gap_, double floor_)
    : NumericalError(format("gap %.6g below floor %.6g at t=%.9g us", gap_, floor_, t_)),
      t(t_),
      gap(gap_),
      gap_floor(floor_) {}

SectorMixed::SectorMixed(double w0, double w1)
    : NumericalError(format("state mixes n_r sectors (weights %.6g, %.6g)", w0, w1)),
      weight_nr0(w0),
      weight_nr1(w1) {}

DegeneracyEncountered::DegeneracyEncountered(double t_, std::size_t a, std::size_t b, double spacing_)
    : NumericalError(format("levels %zu and %zu are %.6g apart at t=%.9g us", a, b, spacing_, t_)),
      t(t_),
      level_a(a),
      level_b(b),
      spacing(spacing_) {}

NotConverged::NotConverged(double t_, double est, double est_half)
    : NumericalError(format("susceptibility not converged at t=%.9g us: S(eps)=%.9g, S(eps/2)=%.9g", t_, est,
                            est_half)),
      t(t_),
      estimate(est),
      estimate_half_step(est_half) {}

}  // namespace stirap
