"""Classical distributions, density matrices and random instances."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import ValidationError, as_hermitian, eig_hermitian
from .rng import SplitMix64

SUM_TOL = 1e-12
DENSITY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ProbVector:
    """A probability vector on ``[n]``.

    ``log2p`` is carried alongside the linear entries so that distributions
    with astronomically small masses (``2**-(64**7)``, say) keep their exact
    log-ratios even though ``p`` itself underflows to zero.
    """

    p: np.ndarray
    log2p: np.ndarray = field(repr=False)

    def __init__(self, entries, *, tol: float = SUM_TOL):
        p = np.asarray(entries, dtype=float).reshape(-1)
        if p.size == 0:
            raise ValidationError("distribution must have at least one entry")
        if np.any(~np.isfinite(p)) or np.any(p < 0):
            raise ValidationError("distribution entries must be finite and nonnegative")
        total = p.sum()
        if abs(total - 1.0) > tol:
            raise ValidationError(f"distribution sums to {total!r}, not 1")
        with np.errstate(divide="ignore"):
            log2p = np.log2(p)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "log2p", log2p)
        p.setflags(write=False)
        log2p.setflags(write=False)

    @classmethod
    def from_log2(cls, log2_entries, *, tol: float = SUM_TOL) -> "ProbVector":
        log2p = np.asarray(log2_entries, dtype=float).reshape(-1)
        if np.any(np.isnan(log2p)) or np.any(log2p > 1e-12):
            raise ValidationError("log2 entries must be <= 0")
        p = np.exp2(log2p)
        obj = cls(p, tol=tol)
        log2p = log2p.copy()
        log2p.setflags(write=False)
        object.__setattr__(obj, "log2p", log2p)
        return obj

    @property
    def dim(self) -> int:
        return self.p.size

    def __len__(self) -> int:
        return self.p.size

    def __eq__(self, other) -> bool:
        return isinstance(other, ProbVector) and np.array_equal(self.log2p, other.log2p)

    def __hash__(self):
        return hash(self.log2p.tobytes())

    def __repr__(self) -> str:
        return f"ProbVector({np.array2string(self.p, precision=6)})"

    def to_density(self) -> np.ndarray:
        return np.diag(self.p).astype(complex)


def as_density(rho, tol: float = DENSITY_TOL) -> np.ndarray:
    """Validate and return a density matrix as a complex array."""
    A = as_hermitian(rho)
    tr = np.trace(A).real
    if abs(tr - 1.0) > tol:
        raise ValidationError(f"density matrix has trace {tr!r}, not 1")
    lo = eig_hermitian(A).eigenvalues[0]
    if lo < -tol:
        raise ValidationError(f"density matrix has negative eigenvalue {lo:.3e}")
    return A


def _check_same_dim(a: int, b: int) -> None:
    if a != b:
        raise ValidationError(f"dimension mismatch: {a} vs {b}")


def trace_distance(A, B) -> float:
    """Trace norm of ``A - B``: sum of absolute eigenvalues, or l1 for vectors.

    Note this is the unnormalised norm, so disjoint distributions are at
    distance 2.
    """
    if isinstance(A, ProbVector) or isinstance(B, ProbVector):
        if not (isinstance(A, ProbVector) and isinstance(B, ProbVector)):
            raise ValidationError("cannot compare a distribution with a matrix")
        _check_same_dim(A.dim, B.dim)
        return float(np.sum(np.abs(A.p - B.p)))
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    if A.shape != B.shape:
        raise ValidationError(f"dimension mismatch: {A.shape} vs {B.shape}")
    w = eig_hermitian(A - B).eigenvalues
    return float(np.sum(np.abs(w)))


def random_density(n: int, seed: int) -> np.ndarray:
    """Ginibre-induced random state ``G G^dagger / Tr(G G^dagger)``.

    Entries of ``G`` are standard complex Gaussians drawn row-major from
    ``SplitMix64(seed)``, real part first.
    """
    if n < 1:
        raise ValidationError("dimension must be at least 1")
    gen = SplitMix64(seed)
    G = np.empty((n, n), dtype=complex)
    s = math.sqrt(0.5)
    for i in range(n):
        for j in range(n):
            G[i, j] = complex(s * gen.normal(), s * gen.normal())
    W = G @ G.conj().T
    W = 0.5 * (W + W.conj().T)
    return W / np.trace(W).real


def random_distribution(n: int, seed: int) -> ProbVector:
    """Uniform sample from the simplex (normalised i.i.d. exponentials)."""
    if n < 1:
        raise ValidationError("dimension must be at least 1")
    gen = SplitMix64(seed)
    e = np.array([gen.exponential() for _ in range(n)])
    p = e / e.sum()
    # keep the sum within one ulp-ish of 1
    p[np.argmax(p)] += 1.0 - p.sum()
    return ProbVector(p)


def measure_in_eigenbasis(rho, sigma) -> tuple[ProbVector, ProbVector]:
    """Outcome distributions of measuring ``rho`` and ``sigma`` in sigma's eigenbasis.

    Entry ``i`` of the second vector is the ``i``-th (ascending) eigenvalue of
    ``sigma``; degenerate eigenspaces get whatever orthonormal basis the
    eigensolver returns.
    """
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    _check_same_dim(rho.shape[0], sigma.shape[0])
    mu, V = eig_hermitian(sigma)
    p_rho = np.real(np.einsum("ji,jk,ki->i", V.conj(), rho, V))
    return _clean_prob(p_rho), _clean_prob(mu)


def _clean_prob(x: np.ndarray) -> ProbVector:
    # eigen-roundoff can leave -1e-17 entries and a sum off by ~1e-15
    x = np.clip(np.asarray(x, dtype=float), 0.0, None)
    return ProbVector(x / x.sum())

