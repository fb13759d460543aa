"""Spin-chain ground states and two-site entanglement."""

from ._spinent import (
    CapacityError,
    CertificateError,
    ConvergenceError,
    NumericalError,
    bell_basis,
    concurrence,
    ground_state,
    idmrg,
    ls_decompose,
    partial_transpose,
    ppt_check,
    reduced_density_matrix,
    sweep,
    werner_state,
    werner_values,
)

__all__ = [
    "CapacityError",
    "CertificateError",
    "ConvergenceError",
    "NumericalError",
    "bell_basis",
    "concurrence",
    "ground_state",
    "idmrg",
    "ls_decompose",
    "partial_transpose",
    "ppt_check",
    "reduced_density_matrix",
    "sweep",
    "werner_state",
    "werner_values",
]
