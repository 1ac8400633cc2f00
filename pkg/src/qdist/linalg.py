"""Dense complex Hermitian linear algebra for small matrices.

Everything here works on plain ``numpy`` arrays.  The eigensolver is a cyclic
complex Jacobi iteration written out explicitly, vectorised over a leading
batch axis so that the divergence search can diagonalise hundreds of pencils
``rho - lam * sigma`` in one call.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

HERMITIAN_ATOL = 1e-12
OFFDIAG_TOL = 1e-12
MAX_SWEEPS = 100


class ValidationError(ValueError):
    """Raised when an input violates a documented invariant."""


class EigenDecomposition(NamedTuple):
    eigenvalues: np.ndarray  # ascending, real
    eigenvectors: np.ndarray  # columns, orthonormal


def as_hermitian(H, atol: float = HERMITIAN_ATOL) -> np.ndarray:
    """Return ``H`` as a complex square array, checking Hermiticity."""
    A = np.asarray(H, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise ValidationError(f"expected a non-empty square matrix, got shape {A.shape}")
    err = np.max(np.abs(A - A.conj().T))
    if err > atol * max(1.0, np.max(np.abs(A))):
        raise ValidationError(f"matrix is not Hermitian (max |H - H^dagger| = {err:.3e})")
    return 0.5 * (A + A.conj().T)


def _fix_phases(V: np.ndarray) -> np.ndarray:
    # Make the largest-magnitude component of every column real positive.
    idx = np.argmax(np.abs(V), axis=-2)
    lead = np.take_along_axis(V, idx[..., None, :], axis=-2)
    mag = np.abs(lead)
    phase = np.where(mag > 0, lead / np.where(mag > 0, mag, 1.0), 1.0)
    return V / phase


def eigh_batch(H: np.ndarray, tol: float = OFFDIAG_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi on a stack of Hermitian matrices of shape ``(..., n, n)``.

    Returns ``(w, V)`` with ``w`` ascending along the last axis and the columns
    of ``V`` orthonormal eigenvectors, phase-normalised.  Sweeps stop once the
    off-diagonal Frobenius mass of every matrix is below
    ``tol * max(1, ||H||_F)``.
    """
    A = np.array(H, dtype=complex, copy=True)
    batch_shape = A.shape[:-2]
    n = A.shape[-1]
    A = A.reshape((-1, n, n))
    A = 0.5 * (A + A.conj().transpose(0, 2, 1))
    V = np.broadcast_to(np.eye(n, dtype=complex), A.shape).copy()
    scale = np.maximum(1.0, np.linalg.norm(A, axis=(1, 2)))
    offmask = ~np.eye(n, dtype=bool)

    for _ in range(MAX_SWEEPS):
        off = np.sqrt(np.sum(np.abs(A[:, offmask]) ** 2, axis=1))
        if np.all(off < tol * scale):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[:, p, q]
                b = np.abs(apq)
                active = b > 1e-300
                if not active.any():
                    continue
                phase = np.where(active, apq / np.where(active, b, 1.0), 1.0)
                app = A[:, p, p].real
                aqq = A[:, q, q].real
                theta = np.where(active, 0.5 * np.arctan2(2.0 * b, app - aqq), 0.0)
                c = np.cos(theta)
                s = np.sin(theta)
                eph = np.conj(phase)
                # G = diag(1, e^{-i phi}) @ [[c, -s], [s, c]]
                g00, g01 = c, -s
                g10, g11 = s * eph, c * eph
                colp = A[:, :, p].copy()
                colq = A[:, :, q].copy()
                A[:, :, p] = colp * g00[:, None] + colq * g10[:, None]
                A[:, :, q] = colp * g01[:, None] + colq * g11[:, None]
                rowp = A[:, p, :].copy()
                rowq = A[:, q, :].copy()
                A[:, p, :] = np.conj(g00)[:, None] * rowp + np.conj(g10)[:, None] * rowq
                A[:, q, :] = np.conj(g01)[:, None] * rowp + np.conj(g11)[:, None] * rowq
                A[:, p, q] = 0.0
                A[:, q, p] = 0.0
                vp = V[:, :, p].copy()
                vq = V[:, :, q].copy()
                V[:, :, p] = vp * g00[:, None] + vq * g10[:, None]
                V[:, :, q] = vp * g01[:, None] + vq * g11[:, None]
    else:  # pragma: no cover - Jacobi converges quadratically for n <= 64
        raise RuntimeError("Jacobi iteration did not converge")

    w = np.real(np.diagonal(A, axis1=1, axis2=2)).copy()
    order = np.argsort(w, axis=1, kind="stable")
    w = np.take_along_axis(w, order, axis=1)
    V = np.take_along_axis(V, order[:, None, :], axis=2)
    V = _fix_phases(V)
    return w.reshape(batch_shape + (n,)), V.reshape(batch_shape + (n, n))


def eig_hermitian(H) -> EigenDecomposition:
    """Eigendecomposition of one Hermitian matrix (ascending eigenvalues)."""
    A = as_hermitian(H)
    w, V = eigh_batch(A)
    return EigenDecomposition(w, V)


def is_psd(H, tol: float = 1e-9) -> bool:
    """True iff the smallest eigenvalue is at least ``-tol * max(1, ||H||_2)``."""
    w = eig_hermitian(H).eigenvalues
    norm = np.max(np.abs(w))
    return bool(w[0] >= -tol * max(1.0, norm))


def spectral_norm(H) -> float:
    return float(np.max(np.abs(eig_hermitian(H).eigenvalues)))


def frobenius_offdiag(A: np.ndarray) -> float:
    mask = ~np.eye(A.shape[0], dtype=bool)
    return float(np.sqrt(np.sum(np.abs(A[mask]) ** 2)))
