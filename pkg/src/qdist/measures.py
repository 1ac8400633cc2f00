"""Relative entropy and observational divergence.

All logarithms are base 2.  The observational divergence of ``rho`` from
``sigma`` is

    D(rho | sigma) = sup_{0 <= M <= I}  p * log2(p / q),   p = Tr M rho, q = Tr M sigma.

``(p, q) -> p log2(p/q)`` is jointly convex (it is the perspective of
``-log2``), so the supremum over the convex set of tests is reached on the
Neyman-Pearson frontier of ``(p, q)`` pairs.  Classically that frontier is
traced by likelihood-ratio threshold sets and the maximum is computed exactly;
in the quantum case we scan spectral threshold tests and report what the
scan certifies, which is a lower bound.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .linalg import ValidationError, eig_hermitian, eigh_batch
from .states import ProbVector, as_density

INF = math.inf
NEG_CLAMP = 1e-9
NULL_EIG = 1e-12
NULL_WEIGHT = 1e-10
OPERATOR_TOL = 1e-10
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
FRACTIONS = (0.0, 0.25, 0.5, 0.75, 1.0)


@dataclass
class DivergenceResult:
    value: float
    witness: np.ndarray
    p: float
    q: float
    method: str = "exact"
    meta: dict = field(default_factory=dict)

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.value)


class RatioItem(NamedTuple):
    index: int
    x: float  # log2(p_i / q_i); +inf when q_i = 0 < p_i, -inf when p_i = 0
    p: float
    q: float


def _clamp(v: float) -> float:
    if -NEG_CLAMP < v < 0.0:
        return 0.0
    return v


def _objective(p: float, log2q: float) -> float:
    """``p * log2(p / q)`` with ``q`` given in log domain."""
    if p <= 0.0:
        return 0.0
    if log2q == -INF:
        return INF
    return p * (math.log2(p) - log2q)


def _check_pair(P: ProbVector, Q: ProbVector) -> None:
    if not isinstance(P, ProbVector) or not isinstance(Q, ProbVector):
        raise ValidationError("expected two ProbVector instances")
    if P.dim != Q.dim:
        raise ValidationError(f"dimension mismatch: {P.dim} vs {Q.dim}")


def _check_matrices(rho, sigma) -> tuple[np.ndarray, np.ndarray]:
    rho = as_density(rho)
    sigma = as_density(sigma)
    if rho.shape != sigma.shape:
        raise ValidationError(f"dimension mismatch: {rho.shape[0]} vs {sigma.shape[0]}")
    return rho, sigma


# -- relative entropy -------------------------------------------------------


def rel_entropy_classical(P: ProbVector, Q: ProbVector) -> float:
    _check_pair(P, Q)
    mask = P.p > 0
    if np.any(Q.log2p[mask] == -INF):
        return INF
    terms = P.p[mask] * (P.log2p[mask] - Q.log2p[mask])
    return _clamp(float(np.sum(terms)))


def rel_entropy_quantum(rho, sigma) -> float:
    """``Tr rho (log2 rho - log2 sigma)`` from the two eigendecompositions."""
    rho, sigma = _check_matrices(rho, sigma)
    lam, U = eig_hermitian(rho)
    mu, V = eig_hermitian(sigma)
    lam = np.clip(lam, 0.0, None)
    overlap = np.abs(U.conj().T @ V) ** 2  # overlap[i, j] = |<u_i|v_j>|^2
    null = mu < NULL_EIG
    if np.any(null):
        leak = float(lam @ overlap[:, null].sum(axis=1))
        if leak > NULL_WEIGHT:
            return INF
    pos = lam > 0
    neg_entropy = float(np.sum(lam[pos] * np.log2(lam[pos])))
    cross = float(lam[pos] @ overlap[np.ix_(pos, ~null)] @ np.log2(mu[~null]))
    return _clamp(neg_entropy - cross)


def binary_rel_entropy(p: float, q: float) -> float:
    """Relative entropy of ``(p, 1-p)`` from ``(q, 1-q)``."""
    for name, v in (("p", p), ("q", q)):
        if not (0.0 <= v <= 1.0) or math.isnan(v):
            raise ValidationError(f"{name}={v!r} is outside [0, 1]")
    total = 0.0
    for a, b in ((p, q), (1.0 - p, 1.0 - q)):
        if a > 0.0:
            if b <= 0.0:
                return INF
            total += a * math.log2(a / b)
    return _clamp(total)


# -- divergence: single tests ------------------------------------------------


def divergence_observed(rho, sigma, M) -> float:
    """Objective ``p log2(p/q)`` of one test ``M`` (weights or an operator)."""
    if isinstance(rho, ProbVector):
        _check_pair(rho, sigma)
        m = np.asarray(M, dtype=float)
        if m.shape != (rho.dim,):
            raise ValidationError(f"test weights must have shape ({rho.dim},)")
        if np.any(m < -OPERATOR_TOL) or np.any(m > 1 + OPERATOR_TOL):
            raise ValidationError("test weights must lie in [0, 1]")
        m = np.clip(m, 0.0, 1.0)
        p, log2q = _classical_pq(rho, sigma, m)
        return _objective(p, log2q)
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    M = np.asarray(M, dtype=complex)
    if M.shape != rho.shape or rho.shape != sigma.shape:
        raise ValidationError("test operator and states must share one dimension")
    w = eig_hermitian(M).eigenvalues
    if w[0] < -OPERATOR_TOL or w[-1] > 1 + OPERATOR_TOL:
        raise ValidationError("test operator must satisfy 0 <= M <= I")
    p, q = _quantum_pq(rho, sigma, M)
    return _quantum_objective(p, q)


def _classical_pq(P: ProbVector, Q: ProbVector, m: np.ndarray) -> tuple[float, float]:
    on = m > 0
    p = float(np.dot(m[on], P.p[on]))
    terms = np.log2(m[on]) + Q.log2p[on]
    log2q = float(np.logaddexp2.reduce(terms)) if terms.size else -INF
    return min(p, 1.0), min(log2q, 0.0)


def _quantum_pq(rho, sigma, M) -> tuple[float, float]:
    p = float(np.real(np.trace(M @ rho)))
    q = float(np.real(np.trace(M @ sigma)))
    return min(max(p, 0.0), 1.0), min(max(q, 0.0), 1.0)


def _quantum_objective(p: float, q: float) -> float:
    # q below the null-eigenvalue floor is roundoff of an exact zero
    if p <= 0.0:
        return 0.0
    if q < NULL_EIG:
        return INF if p > NULL_WEIGHT else 0.0
    return p * math.log2(p / q)


# -- divergence: classical ---------------------------------------------------


def ratio_items(P: ProbVector, Q: ProbVector) -> list[RatioItem]:
    """Per-outcome log-likelihood ratios, in index order."""
    _check_pair(P, Q)
    items = []
    for i in range(P.dim):
        if P.p[i] == 0.0 and P.log2p[i] == -INF:
            x = -INF
        elif Q.log2p[i] == -INF:
            x = INF
        else:
            x = float(P.log2p[i] - Q.log2p[i])
        items.append(RatioItem(i, x, float(P.p[i]), float(Q.p[i])))
    return items


def _ratio_groups(items: list[RatioItem]) -> list[list[int]]:
    """Indices sorted by decreasing ratio, equal ratios merged."""
    order = sorted(items, key=lambda it: (-it.x, it.index))
    groups: list[list[int]] = []
    last = None
    for it in order:
        if last is not None and (
            it.x == last or (math.isfinite(it.x) and abs(it.x - last) <= 1e-12 * max(1.0, abs(it.x)))
        ):
            groups[-1].append(it.index)
        else:
            groups.append([it.index])
            last = it.x
    return groups


def _golden_max(f, a: float, b: float, iters: int = 60) -> tuple[float, float]:
    x1 = b - GOLDEN * (b - a)
    x2 = a + GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + GOLDEN * (b - a)
            f2 = f(x2)
    return (x1, f1) if f1 >= f2 else (x2, f2)


def divergence_classical_exact(P: ProbVector, Q: ProbVector) -> DivergenceResult:
    """Exact classical divergence over all tests ``m in [0, 1]^n``.

    The optimum lies on the likelihood-ratio frontier: a prefix of outcomes
    sorted by ``p_i/q_i`` plus a fraction of the next ratio class.  Each
    frontier segment is a smooth one-parameter problem, maximised by
    golden-section search with its endpoints checked explicitly.
    """
    items = ratio_items(P, Q)
    n = P.dim
    for it in items:
        if it.x == INF:
            m = np.zeros(n)
            m[it.index] = 1.0
            return DivergenceResult(INF, m, it.p, 0.0, "exact", {"segments": 0})

    groups = _ratio_groups(items)
    gp = [float(P.p[g].sum()) for g in groups]
    glq = [float(np.logaddexp2.reduce(Q.log2p[g])) for g in groups]

    best_val, best_j, best_theta = 0.0, 0, 0.0
    cum_p, cum_lq = 0.0, -INF
    for j, (dp, dlq) in enumerate(zip(gp, glq)):
        if dp <= 0.0:
            break  # remaining classes have p_i = 0 and only add to q

        def seg(theta, cp=cum_p, clq=cum_lq, dp=dp, dlq=dlq):
            if theta <= 0.0:
                return _objective(cp, clq)
            return _objective(cp + theta * dp, np.logaddexp2(clq, math.log2(theta) + dlq))

        candidates = [(0.0, seg(0.0)), (1.0, seg(1.0)), _golden_max(seg, 0.0, 1.0)]
        for theta, val in candidates:
            if val > best_val:
                best_val, best_j, best_theta = val, j, theta
        cum_p += dp
        cum_lq = float(np.logaddexp2(cum_lq, dlq))

    m = np.zeros(n)
    for g in groups[:best_j]:
        m[g] = 1.0
    m[groups[best_j]] = best_theta
    p, log2q = _classical_pq(P, Q, m)
    value = divergence_observed(P, Q, m)
    return DivergenceResult(value, m, p, 2.0**log2q, "exact", {"segments": len(groups)})


def divergence_classical_bruteforce(P: ProbVector, Q: ProbVector, grid: int = 1000) -> float:
    """Exhaustive lower bound: all subsets plus one fractional extra index."""
    _check_pair(P, Q)
    n = P.dim
    if n > 12:
        raise ValidationError(f"brute force is limited to n <= 12 (got {n})")
    if grid < 1:
        raise ValidationError("grid must be positive")
    p, q = P.p, Q.p
    if np.any((p > 0) & (q == 0)):
        return INF
    theta = np.linspace(0.0, 1.0, grid + 1)
    best = 0.0
    for j in range(n):
        others = [i for i in range(n) if i != j]
        subsets = np.array(list(itertools.product((0.0, 1.0), repeat=n - 1)))
        ps = subsets @ p[others]
        qs = subsets @ q[others]
        pp = ps[:, None] + theta[None, :] * p[j]
        qq = qs[:, None] + theta[None, :] * q[j]
        with np.errstate(divide="ignore", invalid="ignore"):
            obj = np.where(pp > 0, pp * np.log2(pp / qq), 0.0)
        best = max(best, float(np.max(obj)))
    return best


# -- divergence: quantum -----------------------------------------------------


def _lambda_grid(lam_max: float, size: int) -> np.ndarray:
    half = max(size // 2, 1)
    linear = np.linspace(0.0, lam_max, half + 1)
    geometric = np.geomspace(lam_max * 1e-6, lam_max, max(size - half, 1))
    return np.unique(np.concatenate([linear, geometric]))


def _threshold_tests(rho, sigma, lams: np.ndarray):
    """Score spectral threshold tests of ``rho - lam * sigma`` for every ``lam``.

    For each ``lam`` the test is the projector onto the positive eigenvectors,
    with the eigenvector closest to the zero eigenvalue ("boundary") given a
    weight from ``FRACTIONS``.  Returns the objective array of shape
    ``(len(lams), len(FRACTIONS))`` and the eigen data needed to rebuild tests.
    """
    E, U = eigh_batch(rho[None, :, :] - lams[:, None, None] * sigma[None, :, :])
    a = np.real(np.einsum("lik,ij,ljk->lk", U.conj(), rho, U))
    b = np.real(np.einsum("lik,ij,ljk->lk", U.conj(), sigma, U))
    boundary = np.argmin(np.abs(E), axis=1)
    base = E > 0
    base[np.arange(len(lams)), boundary] = False
    p0 = np.sum(np.where(base, a, 0.0), axis=1)
    q0 = np.sum(np.where(base, b, 0.0), axis=1)
    ab = a[np.arange(len(lams)), boundary]
    bb = b[np.arange(len(lams)), boundary]
    th = np.asarray(FRACTIONS)
    p = np.clip(p0[:, None] + th[None, :] * ab[:, None], 0.0, 1.0)
    q = np.clip(q0[:, None] + th[None, :] * bb[:, None], 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        obj = np.where((p > 0) & (q >= NULL_EIG), p * np.log2(p / q), 0.0)
    return obj, (E, U, base, boundary)


def _build_test(U: np.ndarray, base: np.ndarray, boundary: int, theta: float) -> np.ndarray:
    weights = base.astype(float)
    weights[boundary] = theta
    M = (U * weights[None, :]) @ U.conj().T
    return 0.5 * (M + M.conj().T)


def divergence_quantum(rho, sigma, lambda_grid: int = 512, refine_rounds: int = 3) -> DivergenceResult:
    """Certified lower bound on the quantum divergence.

    Scans threshold tests over a linear+geometric grid of ``lam`` in
    ``[0, lam_max]`` together with the generalised eigenvalues of the pencil
    (where the positive eigenspace changes rank), then zooms in around the
    best ``lam`` with ``refine_rounds`` batched local grids.  Tests from
    measuring in either state's eigenbasis are included as extra candidates,
    so the result is never below the classical divergence of those
    measurements.
    """
    rho, sigma = _check_matrices(rho, sigma)
    n = rho.shape[0]
    mu, V = eig_hermitian(sigma)
    null = mu < NULL_EIG
    if np.any(null):
        Pi0 = V[:, null] @ V[:, null].conj().T
        leak = float(np.real(np.trace(Pi0 @ rho)))
        if leak > NULL_WEIGHT:
            q0 = float(np.real(np.trace(Pi0 @ sigma)))
            return DivergenceResult(INF, Pi0, min(leak, 1.0), max(q0, 0.0), "support", {})

    lam_rho = eig_hermitian(rho).eigenvalues
    lam_max = float(lam_rho[-1] / mu[~null].min())
    W = V[:, ~null] / np.sqrt(mu[~null])[None, :]
    breakpoints = np.clip(eig_hermitian(W.conj().T @ rho @ W).eigenvalues, 0.0, lam_max)

    grid = np.unique(np.concatenate([_lambda_grid(lam_max, lambda_grid), breakpoints]))
    obj, (E, U, base, boundary) = _threshold_tests(rho, sigma, grid)
    i, t = np.unravel_index(np.argmax(obj), obj.shape)
    best = (float(obj[i, t]), U[i], base[i], int(boundary[i]), FRACTIONS[t], float(grid[i]))
    evaluated = grid.size

    lo_i, hi_i = max(i - 1, 0), min(i + 1, grid.size - 1)
    lo, hi = float(grid[lo_i]), float(grid[hi_i])
    for _ in range(refine_rounds):
        if hi <= lo:
            break
        local = np.linspace(lo, hi, 33)
        lobj, (_, lU, lbase, lbound) = _threshold_tests(rho, sigma, local)
        evaluated += local.size
        li, lt = np.unravel_index(np.argmax(lobj), lobj.shape)
        if lobj[li, lt] > best[0]:
            best = (float(lobj[li, lt]), lU[li], lbase[li], int(lbound[li]), FRACTIONS[lt], float(local[li]))
        step = (hi - lo) / 32
        lo, hi = max(lo, local[li] - step), min(hi, local[li] + step)

    M = _build_test(best[1], best[2], best[3], best[4])
    value = divergence_observed(rho, sigma, M)
    best_lam = best[5]

    for B in (V, eig_hermitian(rho).eigenvectors):
        cres = divergence_classical_exact(_diag_in_basis(rho, B), _diag_in_basis(sigma, B))
        if math.isinf(cres.value):
            continue
        Mc = (B * cres.witness[None, :]) @ B.conj().T
        Mc = 0.5 * (Mc + Mc.conj().T)
        vc = divergence_observed(rho, sigma, Mc)
        if vc > value:
            M, value, best_lam = Mc, vc, float("nan")

    p, q = _quantum_pq(rho, sigma, M)
    meta = {
        "lower_bound": True,
        "lambda_max": lam_max,
        "lambda_points": int(evaluated),
        "lambda_grid": int(lambda_grid),
        "refine_rounds": int(refine_rounds),
        "best_lambda": best_lam,
        "dim": n,
    }
    return DivergenceResult(value, M, p, q, "threshold-scan", meta)


def _diag_in_basis(A: np.ndarray, B: np.ndarray) -> ProbVector:
    d = np.clip(np.real(np.einsum("ji,jk,ki->i", B.conj(), A, B)), 0.0, None)
    return ProbVector(d / d.sum())


def frontier_classical(P: ProbVector, Q: ProbVector) -> list[tuple[int, float, float, float]]:
    """Vertices of the likelihood-ratio frontier: (threshold index, p, q, objective)."""
    groups = _ratio_groups(ratio_items(P, Q))
    rows = [(0, 0.0, 0.0, 0.0)]
    m = np.zeros(P.dim)
    for j, g in enumerate(groups, start=1):
        m[g] = 1.0
        p, log2q = _classical_pq(P, Q, m)
        rows.append((j, p, 2.0**log2q, _objective(p, log2q)))
    return rows


def frontier_quantum(rho, sigma, lambda_grid: int = 512) -> list[tuple[float, float, float, float]]:
    """Projector threshold tests along the ``lam`` grid: (lam, p, q, objective)."""
    rho, sigma = _check_matrices(rho, sigma)
    mu = eig_hermitian(sigma).eigenvalues
    lam_max = float(eig_hermitian(rho).eigenvalues[-1] / mu[mu >= NULL_EIG].min())
    grid = _lambda_grid(lam_max, lambda_grid)
    E, U = eigh_batch(rho[None] - grid[:, None, None] * sigma[None])
    a = np.real(np.einsum("lik,ij,ljk->lk", U.conj(), rho, U))
    b = np.real(np.einsum("lik,ij,ljk->lk", U.conj(), sigma, U))
    pos = E > 0
    p = np.clip(np.sum(np.where(pos, a, 0.0), axis=1), 0.0, 1.0)
    q = np.clip(np.sum(np.where(pos, b, 0.0), axis=1), 0.0, 1.0)
    return [(float(l), float(pi), float(qi), _quantum_objective(pi, qi)) for l, pi, qi in zip(grid, p, q)]
