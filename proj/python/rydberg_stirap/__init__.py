"""Collective Rydberg STIRAP: spectra, dynamics and criticality diagnostics."""

from ._core import (
    CollectiveBasis,
    CollapseReport,
    GapProfile,
    Hamiltonian,
    PulseSchedule,
    RateProfile,
    SpectralSnapshot,
    SpinOperators,
    SusceptibilityProfile,
    Trajectory,
    Error,
    InvalidArgument,
    NumericalError,
    TrackingLost,
    NoInteriorMinimum,
    GapFloorViolation,
    SectorMixed,
    NotConverged,
    __version__,
    dark_gap,
    dark_state_at,
    diagonalize,
    effective_size,
    find_critical_time,
    fit_gap_scaling,
    fit_power_law,
    fidelity_susceptibility,
    integrated_work_scaling,
    overlap_fidelity,
    propagate,
    pulse_derivative,
    pulse_value,
    rate_profile,
    rydberg_parity,
    scaling_collapse,
    spin_operators,
    susceptibility_near_minimum,
    total_spin_sum_rule,
    track_dark_state,
    variance,
)
