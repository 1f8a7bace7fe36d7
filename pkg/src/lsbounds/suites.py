"""Randomized trials for every inequality chain.

Trial ``i`` of a run with seed ``s`` draws from
``SeededGenerator(s).child(i)``, so trials are independent of each other
and of how a run is sharded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .channels import KrausSet
from .errors import InternalConsistencyError, LayoutError
from .inequalities import (
    TOLERANCE,
    SlackReport,
    check_fin_equivalence,
    check_ls9,
    check_ls_main,
    check_monotonicity_form,
    check_sandwich,
    check_ssa,
)
from .samplers import SeededGenerator, default_layout, random_density_matrix, random_kraus_set

THREE_PARTY = ("ssa", "monotonicity", "ls-main", "ls9", "fin-equivalence")
SUITE_NAMES = ("ssa", "monotonicity", "sandwich", "ls-main", "ls9", "fin-equivalence")


def kraus_dim(chain: str, dims: Sequence[int]) -> int:
    """Dimension of the space the chain's Kraus operators act on."""
    if chain == "sandwich":
        return math.prod(dims)
    if chain == "ls-main":
        return dims[0] * dims[1]
    if chain in ("ls9", "fin-equivalence"):
        return dims[1]
    raise ValueError(f"chain {chain!r} takes no Kraus set")


def _full_rank(gen, dims):
    layout = default_layout(dims)
    return random_density_matrix(layout.total, layout.total, gen, layout)


def _kraus(chain, gen, dims, m, fixed):
    if fixed is not None:
        return fixed
    acting_on = "B" if chain in ("ls9", "fin-equivalence") else None
    return random_kraus_set(kraus_dim(chain, dims), m, gen, acting_on)


def _ssa(gen, dims, m, fixed, tol):
    return check_ssa(_full_rank(gen, dims), tol)


def _monotonicity(gen, dims, m, fixed, tol):
    return check_monotonicity_form(_full_rank(gen, dims), tol)


def _sandwich(gen, dims, m, fixed, tol):
    rho, gamma = _full_rank(gen, dims), _full_rank(gen, dims)
    return check_sandwich(rho, gamma, _kraus("sandwich", gen, dims, m, fixed), tol, regularize=True)


def _ls_main(gen, dims, m, fixed, tol):
    rho = _full_rank(gen, dims)
    return check_ls_main(rho, _kraus("ls-main", gen, dims, m, fixed), tol)


def _ls9(gen, dims, m, fixed, tol):
    rho = _full_rank(gen, dims)
    return check_ls9(rho, _kraus("ls9", gen, dims, m, fixed), tol)


def _fin(gen, dims, m, fixed, tol):
    rho = _full_rank(gen, dims)
    return check_fin_equivalence(rho, _kraus("fin-equivalence", gen, dims, m, fixed), tol, regularize=True)


TrialFn = Callable[[SeededGenerator, Sequence[int], int, "KrausSet | None", float], SlackReport]

CHECKERS: dict[str, TrialFn] = {
    "ssa": _ssa,
    "monotonicity": _monotonicity,
    "sandwich": _sandwich,
    "ls-main": _ls_main,
    "ls9": _ls9,
    "fin-equivalence": _fin,
}


@dataclass
class TrialResult:
    trial: int
    seed: int
    report: SlackReport | None
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.error is None and self.report is not None and self.report.passed


@dataclass
class SuiteResult:
    chain: str
    seed: int
    dims: tuple[int, ...]
    kraus_count: int
    tolerance: float
    trials: list[TrialResult] = field(default_factory=list)

    @property
    def violations(self) -> int:
        return sum(not t.passed for t in self.trials)

    @property
    def min_slack(self) -> float:
        slacks = [s for t in self.trials if t.report is not None for s in t.report.slacks]
        return min(slacks) if slacks else math.nan

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self, per_trial: bool = True) -> dict:
        out = {
            "chain": self.chain,
            "trials": len(self.trials),
            "dims": list(self.dims),
            "kraus_count": self.kraus_count,
            "seed": self.seed,
            "tolerance": self.tolerance,
            "min_slack": self.min_slack,
            "violations": self.violations,
        }
        if per_trial:
            out["per_trial"] = [
                {
                    "trial": t.trial,
                    "seed": t.seed,
                    "slacks": t.report.slacks if t.report is not None else None,
                    "error": t.error,
                }
                for t in self.trials
            ]
        return out


def validate_dims(chain: str, dims: Sequence[int]) -> None:
    if chain in THREE_PARTY and len(dims) != 3:
        raise LayoutError(f"chain {chain!r} needs three subsystem dimensions, got {list(dims)}")
    if not dims or any(d < 1 for d in dims):
        raise LayoutError(f"invalid dimensions {list(dims)}")


def run_trial(
    chain: str,
    gen: SeededGenerator,
    dims: Sequence[int],
    kraus_count: int = 2,
    kraus: KrausSet | None = None,
    tol: float = TOLERANCE,
) -> SlackReport:
    return CHECKERS[chain](gen, tuple(dims), kraus_count, kraus, tol)


def run_suite(
    chain: str,
    trials: int,
    dims: Sequence[int],
    seed: int,
    kraus_count: int = 2,
    kraus: KrausSet | None = None,
    tol: float = TOLERANCE,
) -> SuiteResult:
    if chain not in CHECKERS:
        raise ValueError(f"unknown suite {chain!r}; known: {SUITE_NAMES}")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    validate_dims(chain, dims)
    parent = SeededGenerator(seed)
    result = SuiteResult(chain, parent.seed, tuple(dims), kraus_count, tol)
    for i in range(trials):
        child = parent.child(i)
        try:
            report = run_trial(chain, child, dims, kraus_count, kraus, tol)
            result.trials.append(TrialResult(i, child.seed, report))
        except InternalConsistencyError as exc:
            result.trials.append(TrialResult(i, child.seed, None, str(exc)))
    return result
