from quadlab.linearization.jacobian import LinearModel, linear_derivative, linearize_at, read_matrices, write_matrices
from quadlab.linearization.analysis import (
    PRINTED_A, PRINTED_B, classify, controllability, eigenvalues, errata_report, first_crossing, impulse_response,
)

__all__ = [
    "LinearModel", "linearize_at", "linear_derivative", "write_matrices", "read_matrices",
    "eigenvalues", "classify", "controllability", "impulse_response", "first_crossing",
    "errata_report", "PRINTED_A", "PRINTED_B",
]
