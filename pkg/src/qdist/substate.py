"""Substate property for classical distributions and the strong variant.

``P`` and ``Q`` have the k-substate property when for every ``r > 1`` there is
a distribution ``P_r`` within l1 distance ``2/r`` of ``P`` with

    Q - (1 - 1/r) * P_r / 2**(r*k) >= 0     (entrywise).

Equivalently ``P_r <= c * Q`` with capacity factor ``c = r/(r-1) * 2**(r*k)``,
and the closest such ``P_r`` is found by clipping the excess of ``P`` over
``c * Q`` and re-depositing it where there is room.  Capacities are handled
in log2 so that ``2**(r*k)`` never overflows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import ValidationError, eig_hermitian, is_psd
from .measures import INF, NULL_EIG, NULL_WEIGHT, divergence_classical_exact, rel_entropy_classical, rel_entropy_quantum
from .states import ProbVector, as_density

DEFAULT_PRECISION = 1e-4
DIST_SLACK = 1e-12


@dataclass(frozen=True)
class SubstateParams:
    k: float
    r: float

    def __post_init__(self):
        if not self.r > 1.0 + 1e-12:
            raise ValidationError(f"r must exceed 1 (got {self.r!r})")
        if not self.k >= 0.0:
            raise ValidationError(f"k must be nonnegative (got {self.k!r})")

    @property
    def log2_capacity(self) -> float:
        """log2 of ``c = r/(r-1) * 2**(r*k)``."""
        return math.log2(self.r / (self.r - 1.0)) + self.r * self.k


@dataclass
class SubstateWitness:
    params: SubstateParams
    capacity: float  # may be inf when 2**(r*k) overflows; see log2_capacity
    log2_capacity: float
    clipped_mass: float
    min_distance: float
    witness_Pr: ProbVector


@dataclass
class SubstateReport:
    holds: bool
    k: float
    worst_r: float
    worst_margin: float  # min_distance - 2/r at worst_r; <= 0 when the property holds there
    checked: int


def _capacity_room(P: ProbVector, Q: ProbVector, log2c: float) -> np.ndarray:
    """``c * q_i`` per coordinate, evaluated from log2 values (inf allowed)."""
    with np.errstate(over="ignore"):
        room = np.exp2(log2c + Q.log2p)
    return np.where(Q.log2p == -INF, 0.0, room)


def substate_min_distance_classical(P: ProbVector, Q: ProbVector, k: float, r: float) -> SubstateWitness:
    """Closest ``P_r`` dominated by ``c * Q`` and its l1 distance ``2 * clipped``."""
    if P.dim != Q.dim:
        raise ValidationError(f"dimension mismatch: {P.dim} vs {Q.dim}")
    params = SubstateParams(float(k), float(r))
    log2c = params.log2_capacity
    room = _capacity_room(P, Q, log2c)
    # compare in log domain so tiny q_i with huge c stay exact
    over = P.log2p > log2c + Q.log2p
    Pr = np.where(over, np.minimum(P.p, room), P.p)
    clipped = float(np.sum(P.p - Pr))
    remaining = clipped
    if remaining > 0.0:
        slack = np.where(np.isinf(room), INF, room - Pr)
        for i in sorted(range(P.dim), key=lambda j: (-slack[j], j)):
            if remaining <= 0.0:
                break
            if slack[i] <= 0.0:
                break
            add = min(slack[i], remaining)
            Pr[i] += add
            remaining -= add
    Pr = Pr / Pr.sum()
    witness = ProbVector(Pr)
    return SubstateWitness(
        params=params,
        capacity=2.0**log2c if log2c < 1000 else INF,
        log2_capacity=log2c,
        clipped_mass=clipped,
        min_distance=2.0 * clipped,
        witness_Pr=witness,
    )


def default_r_grid(P: ProbVector | None = None, Q: ProbVector | None = None, size: int = 64) -> list[float]:
    """Geometric grid on ``[1 + 2**-6, 2**10]`` plus the adversarial ``r = 2/p``.

    ``p`` is the acceptance probability of the optimal divergence test, the
    value of ``r`` at which the converse argument applies the property.
    """
    grid = [float(x) for x in np.geomspace(1.0 + 2.0**-6, 2.0**10, size)]
    if P is not None and Q is not None:
        res = divergence_classical_exact(P, Q)
        if res.p > 0.0 and math.isfinite(res.value):
            grid.append(2.0 / res.p)
    return sorted(set(grid))


def clipped_mass_grid(P: ProbVector, Q: ProbVector, k: float, r_grid) -> np.ndarray:
    """``sum_i max(0, p_i - c(r) q_i)`` for every ``r`` in the grid at once."""
    rs = np.asarray(r_grid, dtype=float)
    log2c = np.log2(rs / (rs - 1.0)) + rs * k
    with np.errstate(over="ignore"):
        room = np.exp2(log2c[:, None] + Q.log2p[None, :])
    over = P.log2p[None, :] > log2c[:, None] + Q.log2p[None, :]
    return np.sum(np.where(over, P.p[None, :] - room, 0.0), axis=1)


def has_substate_property_classical(P: ProbVector, Q: ProbVector, k: float, r_grid=None) -> SubstateReport:
    """Check the k-substate property on every ``r`` of a grid (classical bound ``2/r``)."""
    if P.dim != Q.dim:
        raise ValidationError(f"dimension mismatch: {P.dim} vs {Q.dim}")
    if r_grid is None:
        r_grid = default_r_grid(P, Q)
    rs = np.asarray(list(r_grid), dtype=float)
    if rs.size == 0:
        raise ValidationError("r grid is empty")
    if np.any(rs <= 1.0):
        raise ValidationError("every r must exceed 1")
    margins = 2.0 * clipped_mass_grid(P, Q, float(k), rs) - 2.0 / rs
    worst = int(np.argmax(margins))
    holds = bool(np.all(margins <= DIST_SLACK))
    return SubstateReport(holds, float(k), float(rs[worst]), float(margins[worst]), int(rs.size))


def substate_k_classical(P: ProbVector, Q: ProbVector, precision: float = DEFAULT_PRECISION, r_grid=None) -> float:
    """Smallest k (to within ``precision``) with the substate property on the grid.

    Returns the upper end of the final bisection bracket, so the property is
    guaranteed to hold at the returned value.
    """
    if np.any((P.p > 0) & (Q.log2p == -INF)):
        return INF
    if r_grid is None:
        r_grid = default_r_grid(P, Q)
    pos = P.p > 0
    k_hi = max(0.0, float(np.max(P.log2p[pos] - Q.log2p[pos])))
    if has_substate_property_classical(P, Q, 0.0, r_grid).holds:
        return 0.0
    lo, hi = 0.0, k_hi
    while hi - lo > precision:
        mid = 0.5 * (lo + hi)
        if has_substate_property_classical(P, Q, mid, r_grid).holds:
            hi = mid
        else:
            lo = mid
    return hi


def strong_substate_k(rho, sigma) -> float:
    """Least k with ``sigma - rho / 2**k >= 0`` (classical inputs allowed)."""
    if isinstance(rho, ProbVector):
        if not isinstance(sigma, ProbVector) or rho.dim != sigma.dim:
            raise ValidationError("expected two distributions of equal dimension")
        pos = rho.p > 0
        if np.any(sigma.log2p[pos] == -INF):
            return INF
        return max(0.0, float(np.max(rho.log2p[pos] - sigma.log2p[pos])))
    rho = as_density(rho)
    sigma = as_density(sigma)
    if rho.shape != sigma.shape:
        raise ValidationError(f"dimension mismatch: {rho.shape[0]} vs {sigma.shape[0]}")
    mu, V = eig_hermitian(sigma)
    null = mu < NULL_EIG
    if np.any(null):
        Pi0 = V[:, null] @ V[:, null].conj().T
        if float(np.real(np.trace(Pi0 @ rho))) > NULL_WEIGHT:
            return INF
    W = V[:, ~null] / np.sqrt(mu[~null])[None, :]
    top = eig_hermitian(W.conj().T @ rho @ W).eigenvalues[-1]
    return max(0.0, math.log2(top))


# -- verifiers ---------------------------------------------------------------


@dataclass
class VerifyReport:
    """One inequality check: ``lhs <= rhs`` (margin = lhs - rhs)."""

    name: str
    lhs: float
    rhs: float
    passed: bool
    vacuous: bool = False
    precondition: bool = True
    detail: dict = field(default_factory=dict)

    @property
    def margin(self) -> float:
        if math.isinf(self.lhs) or math.isinf(self.rhs):
            return -INF if self.vacuous else INF
        return self.lhs - self.rhs


def verify_part7(rho, sigma, tol: float = 1e-6) -> VerifyReport:
    """Strong substate bound: ``S(rho|sigma) <= k`` for the least admissible k."""
    k = strong_substate_k(rho, sigma)
    if math.isinf(k):
        return VerifyReport("part7", INF, INF, True, vacuous=True)
    if isinstance(rho, ProbVector):
        S = rel_entropy_classical(rho, sigma)
    else:
        S = rel_entropy_quantum(rho, sigma)
    return VerifyReport("part7", S, k, S <= k + tol)


def verify_part6(P: ProbVector, Q: ProbVector, k: float, tol: float = 1e-6, r_grid=None) -> VerifyReport:
    """Converse: the k-substate property forces ``D(P|Q) <= 2k + 2``."""
    D = divergence_classical_exact(P, Q).value
    if math.isinf(k):
        return VerifyReport("part6", D, INF, True, vacuous=True)
    pre = has_substate_property_classical(P, Q, k, r_grid)
    rhs = 2.0 * k + 2.0
    report = VerifyReport("part6", D, rhs, D <= rhs + tol, precondition=pre.holds, detail={"k": k})
    if not pre.holds:
        # the implication says nothing here; report without asserting
        report.passed = True
        report.vacuous = True
        report.detail["precondition_worst_r"] = pre.worst_r
    return report


def verify_part5_classical(P: ProbVector, Q: ProbVector, r_grid=None) -> VerifyReport:
    """The pair has the ``(8 D + 14)``-substate property on the r grid."""
    D = divergence_classical_exact(P, Q).value
    if math.isinf(D):
        return VerifyReport("part5", INF, INF, True, vacuous=True)
    k = 8.0 * D + 14.0
    rep = has_substate_property_classical(P, Q, k, r_grid)
    # lhs/rhs are the worst distance margin against the 2/r budget
    return VerifyReport(
        "part5",
        rep.worst_margin,
        0.0,
        rep.holds,
        detail={"k": k, "D": D, "worst_r": rep.worst_r},
    )


def strong_substate_gap(rho, sigma, k: float) -> np.ndarray:
    """``sigma - rho / 2**k``; PSD exactly when the strong property holds at k."""
    return np.asarray(sigma, dtype=complex) - np.asarray(rho, dtype=complex) / 2.0**k


def has_strong_substate(rho, sigma, k: float, tol: float = 1e-9) -> bool:
    return is_psd(strong_substate_gap(rho, sigma, k), tol)
