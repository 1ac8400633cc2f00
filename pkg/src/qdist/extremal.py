"""A family of classical pairs where S(P|Q) nearly reaches D(P|Q) * (n - 1).

For ``a > 1``, ``k > 0`` and ``n >= 3``::

    p_1 = (a-1)/a,   p_i = (a-1)/a**i  (1 < i < n),   p_n = a**-(n-1)
    q_i = p_i / 2**(k * a**(i-1))  (i >= 2),          q_1 = 1 - sum(q_2..q_n)

The exponents ``k * a**(i-1)`` are astronomically large for moderate ``a`` and
``n``, so ``Q`` is built from log2 values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import ValidationError
from .measures import divergence_classical_exact, rel_entropy_classical
from .states import ProbVector, trace_distance
from .substate import has_substate_property_classical


class InfeasibleParams(ValidationError):
    pass


@dataclass(frozen=True)
class ExtremalParams:
    a: float
    k: float
    n: int

    def __post_init__(self):
        if not self.a > 1.0:
            raise ValidationError(f"a must exceed 1 (got {self.a!r})")
        if not self.k > 0.0:
            raise ValidationError(f"k must be positive (got {self.k!r})")
        if int(self.n) != self.n or self.n < 3:
            raise ValidationError(f"n must be an integer >= 3 (got {self.n!r})")


def _log2_p(params: ExtremalParams) -> np.ndarray:
    a, n = params.a, int(params.n)
    la = math.log2(a)
    out = np.empty(n)
    out[0] = math.log2(a - 1.0) - la
    for i in range(2, n):
        out[i - 1] = math.log2(a - 1.0) - i * la
    out[n - 1] = -(n - 1) * la
    return out


def part4_family(params: ExtremalParams) -> tuple[ProbVector, ProbVector]:
    a, k, n = params.a, params.k, int(params.n)
    log2p = _log2_p(params)
    log2q = np.empty(n)
    for i in range(2, n + 1):
        log2q[i - 1] = log2p[i - 1] - k * a ** (i - 1)
    tail = float(np.sum(np.exp2(log2q[1:])))
    q1 = 1.0 - tail
    if q1 < 0.0:
        raise InfeasibleParams(
            f"infeasible parameters a={a}, k={k}, n={n}: q_2+...+q_n = {tail:.6g} exceeds 1 "
            f"(q_1 deficit {-q1:.6g})"
        )
    log2q[0] = math.log2(q1) if q1 > 0.0 else -math.inf
    P = ProbVector.from_log2(log2p)
    Q = ProbVector.from_log2(log2q)
    return P, Q


@dataclass
class GapReport:
    params: ExtremalParams
    S: float
    D: float
    finite_a_bound: float  # k(n-1) - k(n-2)/a - 1
    large_a_bound: float  # k(n-2) - 1
    tightness_rhs: float  # (D/2 - 1)(n-2) - 1
    s_exceeds_finite_a_bound: bool
    s_exceeds_large_a_bound: bool
    s_exceeds_tightness_rhs: bool
    d_within_converse: bool  # D <= 2(k+1)
    s_within_part2: bool  # S <= D(n-1)

    @property
    def ratio(self) -> float:
        """S / (D (n-1)); how much of the general upper bound the family uses."""
        return self.S / (self.D * (self.params.n - 1))

    def as_dict(self) -> dict:
        d = {k: v for k, v in self.__dict__.items() if k != "params"}
        d.update(a=self.params.a, k=self.params.k, n=self.params.n, ratio=self.ratio)
        return d


def part4_gap_report(params: ExtremalParams, tol: float = 1e-9) -> GapReport:
    P, Q = part4_family(params)
    a, k, n = params.a, params.k, int(params.n)
    S = rel_entropy_classical(P, Q)
    D = divergence_classical_exact(P, Q).value
    finite_a_bound = k * (n - 1) - k * (n - 2) / a - 1.0
    large_a = k * (n - 2) - 1.0
    tight_rhs = (D / 2.0 - 1.0) * (n - 2) - 1.0
    return GapReport(
        params=params,
        S=S,
        D=D,
        finite_a_bound=finite_a_bound,
        large_a_bound=large_a,
        tightness_rhs=tight_rhs,
        s_exceeds_finite_a_bound=S > finite_a_bound,
        s_exceeds_large_a_bound=S > large_a,
        s_exceeds_tightness_rhs=S > tight_rhs,
        d_within_converse=D <= 2.0 * (k + 1.0) + tol,
        s_within_part2=S <= D * (n - 1) + tol,
    )


@dataclass
class TruncationReport:
    r: float
    cut: int  # entries 1..cut are kept
    distance: float
    distance_bound: float  # 2/r
    domination_margin: float  # max_i log2((1-1/r) P~_i / (2**(rk) q_i)); <= 0 means dominated
    distance_ok: bool
    dominated: bool
    P_tilde: ProbVector

    @property
    def certified(self) -> bool:
        return self.distance_ok and self.dominated


def truncation_cut(params: ExtremalParams, r: float) -> int:
    m = math.floor(math.log(r) / math.log(params.a) + 1e-12) + 1
    return max(1, min(int(params.n), m))


def part4_truncation_witness(params: ExtremalParams, r: float, tol: float = 1e-9) -> TruncationReport:
    """Keep the first ``floor(log_a r) + 1`` entries of P, renormalise, check both conditions."""
    if not r > 1.0:
        raise ValidationError(f"r must exceed 1 (got {r!r})")
    P, Q = part4_family(params)
    m = truncation_cut(params, r)
    log2p = np.array(P.log2p)
    kept_mass = float(np.sum(P.p[:m]))
    log2pt = np.full(P.dim, -math.inf)
    log2pt[:m] = log2p[:m] - math.log2(kept_mass)
    Pt = ProbVector.from_log2(log2pt, tol=1e-10)
    distance = trace_distance(P, Pt)
    lhs = math.log2(1.0 - 1.0 / r) + log2pt[:m] - r * params.k
    margin = float(np.max(lhs - Q.log2p[:m]))
    return TruncationReport(
        r=float(r),
        cut=m,
        distance=distance,
        distance_bound=2.0 / r,
        domination_margin=margin,
        distance_ok=distance <= 2.0 / r + tol,
        dominated=margin <= tol,
        P_tilde=Pt,
    )


def truncation_r_grid(params: ExtremalParams, size: int = 32) -> list[float]:
    hi = max(params.a ** (params.n - 1) * 2.0, 4.0)
    return [float(x) for x in np.geomspace(1.0 + 2.0**-6, hi, size)]


def corroborate_substate(params: ExtremalParams, r_grid=None) -> bool:
    """Independent check that the family has the k-substate property."""
    P, Q = part4_family(params)
    return has_substate_property_classical(P, Q, params.k, r_grid).holds
