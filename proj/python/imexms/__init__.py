"""Implicit-explicit multistep schemes: construction, stability indicators and integration."""

from ._imexms import (
    DomainError,
    NumericalError,
    closed_forms,
    convergence_study,
    doc_kernels,
    indicators,
    make_scheme,
    poly_roots,
    sweep,
    toeplitz_verify,
    truncation,
)

__all__ = [
    "DomainError",
    "NumericalError",
    "closed_forms",
    "convergence_study",
    "doc_kernels",
    "indicators",
    "make_scheme",
    "poly_roots",
    "sweep",
    "toeplitz_verify",
    "truncation",
]
