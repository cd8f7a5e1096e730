"""Analyticity diagnostics for equations with a time shift (C++ core)."""

from ._core import (
    PantographForm,
    ShiftlabError,
    TruncatedSeries,
    classify_point,
    closed_form_oracle_simple,
    compose,
    eigen_constant_delay,
    eigen_sine,
    koenigs,
    match_initial,
    omega_bound,
    pn,
    radius_estimate,
    revert,
    rotation_number,
    run_coexistence,
    taylor_coefficients,
    w_sequence,
    zeta_iteration,
)

__version__ = "0.1.0"
