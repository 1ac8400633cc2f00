"""Distinguishability measures between quantum and classical states."""

from .linalg import EigenDecomposition, ValidationError, eig_hermitian, is_psd
from .measures import (
    DivergenceResult,
    binary_rel_entropy,
    divergence_classical_bruteforce,
    divergence_classical_exact,
    divergence_observed,
    divergence_quantum,
    rel_entropy_classical,
    rel_entropy_quantum,
)
from .states import ProbVector, measure_in_eigenbasis, random_density, random_distribution, trace_distance

__version__ = "0.1.0"

__all__ = [
    "DivergenceResult",
    "EigenDecomposition",
    "ProbVector",
    "ValidationError",
    "binary_rel_entropy",
    "divergence_classical_bruteforce",
    "divergence_classical_exact",
    "divergence_observed",
    "divergence_quantum",
    "eig_hermitian",
    "is_psd",
    "measure_in_eigenbasis",
    "random_density",
    "random_distribution",
    "rel_entropy_classical",
    "rel_entropy_quantum",
    "trace_distance",
]
