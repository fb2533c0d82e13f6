"""Metric-space distances between many-body ground states and their densities,
with exact or variational solvers for three two- and few-electron models."""

from .metric import (
    BoundViolation,
    DensityProfile,
    ManyBodyState,
    OverlapValue,
    check_bounds,
    d_psi,
    d_psi_min,
    d_psi_tilde,
    d_rho,
    d_rho_min,
    distance_to_zero_state,
)

__all__ = [
    "BoundViolation",
    "DensityProfile",
    "ManyBodyState",
    "OverlapValue",
    "check_bounds",
    "d_psi",
    "d_psi_min",
    "d_psi_tilde",
    "d_rho",
    "d_rho_min",
    "distance_to_zero_state",
]
