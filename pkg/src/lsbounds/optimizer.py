"""Search over unitary remixes of a Kraus representation.

A channel's Kraus operators are only fixed up to ``K'_n = sum_m w[n, m] K_m``
with ``w`` unitary. The channel itself does not move, but the flagged
channel built from the operators does, and with it the middle term of
each sandwich chain. ``tighten`` pushes that middle term up or down with
a derivative-free coordinate pattern search over ``w = exp(A)``, ``A``
anti-Hermitian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Generator

import numpy as np

from .channels import KrausSet, remix_kraus, validate_kraus
from .entropy import DensityMatrix
from .errors import KrausError, LayoutError
from .inequalities import SlackReport, check_ls9, check_ls_main, check_sandwich
from .samplers import SeededGenerator

DIRECTIONS = ("maximize", "minimize")
CHAINS = ("sandwich", "ls-main", "ls9")

INITIAL_STEP = math.pi / 4
MIN_STEP = 1e-4


def parametrize_unitary(params) -> np.ndarray:
    """Unitary ``exp(A)`` from ``m^2`` real coordinates.

    The first ``m`` entries are the imaginary diagonal of ``A``; then come
    the real parts and then the imaginary parts of the upper triangle, in
    row-major order.
    """
    p = np.asarray(params, dtype=float).ravel()
    m = math.isqrt(p.size)
    if m * m != p.size or m == 0:
        raise ValueError(f"parameter length {p.size} is not a positive perfect square")
    npair = m * (m - 1) // 2
    a = np.zeros((m, m), dtype=complex)
    a[np.diag_indices(m)] = 1j * p[:m]
    iu = np.triu_indices(m, 1)
    re, im = p[m:m + npair], p[m + npair:]
    a[iu] = re + 1j * im
    a[(iu[1], iu[0])] = -re + 1j * im
    # A = iH with H Hermitian, so exp(A) = U diag(exp(i lambda)) U^†
    lam, u = np.linalg.eigh(-1j * a)
    return (u * np.exp(1j * lam)) @ u.conj().T


@dataclass(frozen=True, eq=False)
class RemixObjective:
    direction: str
    chain: str
    kraus: KrausSet
    rho: DensityMatrix
    gamma: DensityMatrix | None = None

    def __post_init__(self):
        if self.direction not in DIRECTIONS:
            raise ValueError(f"direction must be one of {DIRECTIONS}, got {self.direction!r}")
        if self.chain not in CHAINS:
            raise ValueError(f"chain must be one of {CHAINS}, got {self.chain!r}")
        report = validate_kraus(self.kraus)
        if not report.passed:
            raise KrausError(f"base Kraus set fails completeness ({report.deviation:.3e})")
        if self.chain == "sandwich" and self.gamma is None:
            raise ValueError("the sandwich chain needs a second state gamma")
        # surfaces dimension errors at construction
        self.report(np.eye(self.kraus.count))

    @property
    def size(self) -> int:
        return self.kraus.count

    def better(self, a: float, b: float) -> bool:
        return a > b if self.direction == "maximize" else a < b

    def report(self, w: np.ndarray) -> SlackReport:
        ks = remix_kraus(self.kraus, w)
        if self.chain == "sandwich":
            return check_sandwich(self.rho, self.gamma, ks)
        if self.chain == "ls-main":
            return check_ls_main(self.rho, ks)
        return check_ls9(self.rho, ks)


def remix_report(obj: RemixObjective, w: np.ndarray) -> SlackReport:
    """Full chain report for the remixed Kraus set; the middle term is ``values[1]``."""
    w = np.asarray(w)
    if w.shape != (obj.size, obj.size):
        raise LayoutError(f"remix must be {obj.size}x{obj.size}, got {w.shape}")
    return obj.report(w)


def evaluate_objective(obj: RemixObjective, w: np.ndarray) -> float:
    return remix_report(obj, w).values[1]


@dataclass(frozen=True)
class Evaluation:
    restart: int
    params: tuple[float, ...]
    value: float


@dataclass
class RemixTrace:
    direction: str
    chain: str
    budget: int
    restarts: int
    seed: int
    algorithm: str
    evaluations: list[Evaluation] = field(default_factory=list)
    best_index: int = -1

    @property
    def budget_used(self) -> int:
        return len(self.evaluations)

    @property
    def baseline(self) -> float:
        return self.evaluations[0].value

    @property
    def best(self) -> Evaluation:
        return self.evaluations[self.best_index]

    @property
    def best_value(self) -> float:
        return self.best.value

    @property
    def best_unitary(self) -> np.ndarray:
        return parametrize_unitary(self.best.params)

    def best_after(self, k: int) -> float:
        """Best value among the first ``k`` evaluations."""
        vals = [e.value for e in self.evaluations[:k]]
        return max(vals) if self.direction == "maximize" else min(vals)

    def to_dict(self) -> dict:
        return {
            "direction": self.direction,
            "chain": self.chain,
            "budget": self.budget,
            "budget_used": self.budget_used,
            "restarts": self.restarts,
            "seed": self.seed,
            "algorithm": self.algorithm,
            "baseline": self.baseline,
            "best_value": self.best_value,
            "best_restart": self.best.restart,
            "best_params": list(self.best.params),
            "values": [e.value for e in self.evaluations],
        }


def _pattern_search(
    x0: np.ndarray, better: Callable[[float, float], bool]
) -> Generator[np.ndarray, float, None]:
    """Coroutine: yields trial points, receives their objective values."""
    x = np.array(x0, dtype=float)
    fx = yield x.copy()
    step = INITIAL_STEP
    while step >= MIN_STEP:
        improved = False
        for i in range(x.size):
            for sign in (1.0, -1.0):
                trial = x.copy()
                trial[i] += sign * step
                ft = yield trial
                if better(ft, fx):
                    x, fx = trial, ft
                    improved = True
                    break
        if not improved:
            step /= 2


def tighten(
    obj: RemixObjective, budget: int, restarts: int, gen: SeededGenerator
) -> RemixTrace:
    """Pattern search over remixes from ``restarts`` starting points.

    Restart 0 starts at the identity remix, the others at points uniform in
    ``[-pi, pi]^(m^2)``. Restarts advance round-robin, one evaluation each,
    so ``budget`` counts objective evaluations across all restarts and a
    larger budget only ever extends the trace. Converged restarts drop out.
    """
    if budget < 1 or restarts < 1:
        raise ValueError("budget and restarts must be at least 1")
    n = obj.size ** 2
    starts = [np.zeros(n)] + [gen.uniform(n, -math.pi, math.pi) for _ in range(restarts - 1)]
    trace = RemixTrace(obj.direction, obj.chain, budget, restarts, gen.seed, gen.algorithm)

    searches = [_pattern_search(x0, obj.better) for x0 in starts]
    pending = {r: next(s) for r, s in enumerate(searches)}
    while pending and trace.budget_used < budget:
        for r in list(pending):
            if trace.budget_used >= budget:
                break
            params = pending[r]
            value = evaluate_objective(obj, parametrize_unitary(params))
            trace.evaluations.append(Evaluation(r, tuple(float(x) for x in params), value))
            if trace.best_index < 0 or obj.better(value, trace.best_value):
                trace.best_index = trace.budget_used - 1
            try:
                pending[r] = searches[r].send(value)
            except StopIteration:
                del pending[r]
    return trace
