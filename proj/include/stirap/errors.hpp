#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stirap {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller supplied something outside an operation's preconditions.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// The numerics could not deliver the requested quantity.
class NumericalError : public Error {
public:
    using Error::Error;
};

class DegenerateDarkState : public NumericalError {
public:
    DegenerateDarkState(double t, std::size_t near_zero_count);
    double t;
    std::size_t near_zero_count;
};

class TrackingLost : public NumericalError {
public:
    TrackingLost(double t_prev, double t, double overlap);
    double t_prev;
    double t;
    double overlap;
};

class NoInteriorMinimum : public NumericalError {
public:
    NoInteriorMinimum(double begin, double end);
    double begin;
    double end;
};

class StepSizeUnderflow : public NumericalError {
public:
    StepSizeUnderflow(double t0, double t1, double worst_local_error);
    double t0;
    double t1;
    double worst_local_error;
};

class GridMismatch : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class GapFloorViolation : public NumericalError {
public:
    GapFloorViolation(double t, double gap, double gap_floor);
    double t;
    double gap;
    double gap_floor;
};

class SectorMixed : public NumericalError {
public:
    SectorMixed(double weight_nr0, double weight_nr1);
    double weight_nr0;
    double weight_nr1;
};

class DegeneracyEncountered : public NumericalError {
public:
    DegeneracyEncountered(double t, std::size_t level_a, std::size_t level_b, double spacing);
    double t;
    std::size_t level_a;
    std::size_t level_b;
    double spacing;
};

class NotConverged : public NumericalError {
public:
    NotConverged(double t, double estimate, double estimate_half_step);
    double t;
    double estimate;
    double estimate_half_step;
};

class InsufficientOverlap : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace stirap
