"""Randomised verification of every inequality between the three measures."""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .io import state_to_json
from .linalg import ValidationError
from .measures import (
    binary_rel_entropy,
    divergence_classical_exact,
    divergence_quantum,
    rel_entropy_classical,
    rel_entropy_quantum,
)
from .rng import SplitMix64, derive_seed
from .states import measure_in_eigenbasis, random_density, random_distribution
from .substate import (
    DEFAULT_PRECISION,
    DIST_SLACK,
    default_r_grid,
    strong_substate_k,
    substate_k_classical,
    verify_part5_classical,
    verify_part6,
)

CLASSICAL_PARTS = ("part1_classical", "part2", "part5", "part6", "part7_classical")
QUANTUM_PARTS = ("part1_quantum", "part3", "part7_quantum", "part8")
TRIVIAL_LHS = 1e-12


@dataclass
class SuiteConfig:
    seed: int = 0
    trials: int = 100
    dims: list = field(default_factory=lambda: [2, 3, 4, 5, 6])
    mode: str = "both"
    tolerance: float = 1e-6
    lambda_grid: int = 512
    r_grid: int = 64
    out: str | None = None
    fixture: str | None = None  # "identical": second state equals the first

    def validate(self) -> None:
        if self.trials < 1:
            raise ValidationError("trials must be at least 1")
        if not self.dims or any(int(d) < 2 for d in self.dims):
            raise ValidationError("every dimension must be at least 2")
        if self.mode not in ("classical", "quantum", "both"):
            raise ValidationError(f"unknown mode {self.mode!r}")
        if not self.tolerance > 0:
            raise ValidationError("tolerance must be positive")
        if self.lambda_grid < 2 or self.r_grid < 2:
            raise ValidationError("grid sizes must be at least 2")
        if self.fixture not in (None, "identical"):
            raise ValidationError(f"unknown fixture {self.fixture!r}")


class _Tally:
    def __init__(self, name):
        self.name = name
        self.passed = self.failed = self.vacuous = self.trivial = 0
        self.worst_margin = -math.inf
        self.worst_trial = None
        self.failures = []

    def add(self, trial, lhs, rhs, tol, instance, vacuous=False, extra=None):
        """Record ``lhs <= rhs + tol``; margin is ``lhs - rhs``."""
        if vacuous or math.isinf(lhs) or math.isinf(rhs):
            self.vacuous += 1
            return
        margin = lhs - rhs
        if margin > self.worst_margin:
            self.worst_margin, self.worst_trial = margin, trial
        if margin <= tol:
            self.passed += 1
            if abs(lhs) <= TRIVIAL_LHS:
                self.trivial += 1
        else:
            self.failed += 1
            rec = {"trial": trial, "lhs": lhs, "rhs": rhs, "margin": margin, "instance": instance}
            if extra:
                rec.update(extra)
            self.failures.append(rec)

    def as_dict(self):
        return {
            "trials": self.passed + self.failed + self.vacuous,
            "passed": self.passed,
            "failed": self.failed,
            "vacuous": self.vacuous,
            "trivial": self.trivial,
            "worst_margin": None if self.worst_margin == -math.inf else self.worst_margin,
            "worst_trial": self.worst_trial,
            "failures": self.failures,
        }


def _draw(config: SuiteConfig, trial: int):
    gen = SplitMix64(derive_seed(config.seed, trial, 0))
    n = int(config.dims[gen.integer(0, len(config.dims) - 1)])
    s = [derive_seed(config.seed, trial, j) for j in range(1, 5)]
    return n, s


def _classical_trial(config, trial, n, seeds, tallies):
    P = random_distribution(n, seeds[0])
    Q = P if config.fixture == "identical" else random_distribution(n, seeds[1])
    inst = {"kind": "classical", "n": n, "P": state_to_json(P), "Q": state_to_json(Q)}
    tol = config.tolerance
    S = rel_entropy_classical(P, Q)
    D = divergence_classical_exact(P, Q).value
    tallies["part1_classical"].add(trial, D, S + 1.0, tol, inst)
    tallies["part2"].add(trial, S, D * (n - 1), tol, inst)

    grid = default_r_grid(P, Q, config.r_grid)
    p5 = verify_part5_classical(P, Q, grid)
    tallies["part5"].add(trial, p5.lhs, p5.rhs, DIST_SLACK, inst, vacuous=p5.vacuous, extra=p5.detail)

    k = substate_k_classical(P, Q, DEFAULT_PRECISION, grid)
    p6 = verify_part6(P, Q, k, tol, grid)
    tallies["part6"].add(trial, p6.lhs, p6.rhs, tol, inst, vacuous=p6.vacuous, extra={"k": k})

    ks = strong_substate_k(P, Q)
    tallies["part7_classical"].add(trial, S, ks, tol, inst)


def _quantum_trial(config, trial, n, seeds, tallies):
    rho = random_density(n, seeds[2])
    sigma = rho if config.fixture == "identical" else random_density(n, seeds[3])
    inst = {"kind": "quantum", "n": n, "rho": state_to_json(rho), "sigma": state_to_json(sigma)}
    tol = config.tolerance
    S = rel_entropy_quantum(rho, sigma)
    res = divergence_quantum(rho, sigma, config.lambda_grid)
    tallies["part1_quantum"].add(trial, res.value, S + 1.0, tol, inst)

    Pm, Qm = measure_in_eigenbasis(rho, sigma)
    Dm = divergence_classical_exact(Pm, Qm).value
    tallies["part3"].add(trial, S, Dm * (n - 1) + math.log2(n), tol, inst, extra={"D_measured": Dm})

    ks = strong_substate_k(rho, sigma)
    tallies["part7_quantum"].add(trial, S, ks, tol, inst)

    # binary outcome distributions (p, 1-p), (q, 1-q) of the divergence witness
    Sb = binary_rel_entropy(res.p, res.q)
    bound = (S - math.log2(n)) / (n - 1) - 1.0
    if math.isinf(Sb):
        tallies["part8"].add(trial, 0.0, 0.0, tol, inst, vacuous=True)
    else:
        tallies["part8"].add(trial, bound, Sb, tol, inst, extra={"p": res.p, "q": res.q})


def run_suite(config: SuiteConfig) -> dict:
    """Run ``config.trials`` random trials and return the report dictionary.

    Margins are ``lhs - rhs`` of each inequality written as ``lhs <= rhs``
    (Part 8 is rewritten that way), so a check passes when its margin is at
    most the tolerance.  Infinite sides are counted as vacuous.
    """
    config.validate()
    started = time.perf_counter()
    parts = ()
    if config.mode in ("classical", "both"):
        parts += CLASSICAL_PARTS
    if config.mode in ("quantum", "both"):
        parts += QUANTUM_PARTS
    tallies = {name: _Tally(name) for name in parts}
    for trial in range(config.trials):
        n, seeds = _draw(config, trial)
        if config.mode in ("classical", "both"):
            _classical_trial(config, trial, n, seeds, tallies)
        if config.mode in ("quantum", "both"):
            _quantum_trial(config, trial, n, seeds, tallies)
    failures = sum(t.failed for t in tallies.values())
    return {
        "config": asdict(config),
        "parts": {name: t.as_dict() for name, t in tallies.items()},
        "total_failures": failures,
        "passed": failures == 0,
        "timing": {"wall_clock_s": time.perf_counter() - started},
    }


def strip_timing(report: dict) -> dict:
    return {k: v for k, v in report.items() if k != "timing"}


def summarize(report: dict) -> str:
    lines = []
    for name, t in report["parts"].items():
        wm = t["worst_margin"]
        wm_s = "n/a" if wm is None else f"{wm:+.3e}"
        status = "PASS" if t["failed"] == 0 else "FAIL"
        lines.append(
            f"{status} {name:16s} passed={t['passed']:5d} failed={t['failed']:3d} "
            f"vacuous={t['vacuous']:3d} trivial={t['trivial']:3d} worst_margin={wm_s}"
        )
    lines.append(f"total failures: {report['total_failures']}")
    return "\n".join(lines)


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return x
    if isinstance(x, np.integer):
        return int(x)
    return x


def to_json_ready(report: dict) -> dict:
    return _jsonable(report)
