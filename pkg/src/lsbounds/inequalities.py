"""Entropy-inequality chains evaluated as ordered terms with signed slacks.

Every report lists the smaller side of each inequality first, so a
slack ``term[i+1] - term[i] >= -tolerance`` always means the inequality
holds. Three-party checks take the layout's factors in order as the
``A``, ``B``, ``C`` roles whatever their labels are.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .channels import (
    KrausSet,
    apply_channel,
    apply_ls_channel,
    build_dilation,
    embed_on_subsystem,
    kraus_tensor_identity,
)
from .entropy import (
    DensityMatrix,
    maximally_mixed_extension,
    relative_entropy,
    von_neumann_entropy as S,
)
from .errors import InternalConsistencyError, LayoutError

TOLERANCE = 1e-9
# identity cross-checks between two evaluations of the same quantity
EQUIVALENCE_TOL = 1e-9
REGULARIZATION = 1e-9


def _slack(lower: float, upper: float) -> float:
    if math.isinf(upper):
        return math.inf
    if math.isinf(lower):
        return -math.inf
    return upper - lower


@dataclass
class SlackReport:
    chain_name: str
    terms: list[tuple[str, float]]
    tolerance: float = TOLERANCE
    diagnostics: dict[str, float] = field(default_factory=dict)

    @property
    def values(self) -> list[float]:
        return [v for _, v in self.terms]

    @property
    def slacks(self) -> list[float]:
        v = self.values
        return [_slack(v[i], v[i + 1]) for i in range(len(v) - 1)]

    @property
    def min_slack(self) -> float:
        return min(self.slacks)

    @property
    def passed(self) -> bool:
        return all(s >= -self.tolerance for s in self.slacks)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict:
        return {
            "chain": self.chain_name,
            "terms": [{"description": d, "value": v} for d, v in self.terms],
            "slacks": self.slacks,
            "tolerance": self.tolerance,
            "verdict": self.verdict,
            "diagnostics": dict(self.diagnostics),
        }


def _abc(rho: DensityMatrix) -> tuple[str, str, str]:
    if len(rho.layout) != 3:
        raise LayoutError(f"expected a three-factor layout, got {rho.layout}")
    a, b, c = rho.layout.labels
    return a, b, c


def _cross_check(name: str, got: float, expected: float) -> float:
    gap = abs(got - expected)
    if not gap <= EQUIVALENCE_TOL:
        raise InternalConsistencyError(f"{name}: {got!r} vs {expected!r} (gap {gap:.3e})")
    return gap


def check_ssa(rho: DensityMatrix, tol: float = TOLERANCE) -> SlackReport:
    """S(ABC) - S(AB) <= S(BC) - S(B)."""
    a, b, c = _abc(rho)
    lhs = S(rho) - S(rho.marginal([a, b]))
    rhs = S(rho.marginal([b, c])) - S(rho.marginal([b]))
    return SlackReport(
        "ssa",
        [("S(ABC) - S(AB)", lhs), ("S(BC) - S(B)", rhs)],
        tol,
    )


def _rel_to_mixed_c(joint: DensityMatrix, drop: str) -> float:
    return relative_entropy(joint, maximally_mixed_extension(joint.ptrace([drop]), joint.layout))


def check_monotonicity_form(rho: DensityMatrix, tol: float = TOLERANCE) -> SlackReport:
    """H(BC, B ⊗ I/d_C) <= H(ABC, AB ⊗ I/d_C), cross-checked against SSA."""
    a, b, c = _abc(rho)
    h_bc = _rel_to_mixed_c(rho.marginal([b, c]), c)
    h_abc = _rel_to_mixed_c(rho, c)
    report = SlackReport(
        "monotonicity",
        [("H(BC, B ⊗ I/d_C)", h_bc), ("H(ABC, AB ⊗ I/d_C)", h_abc)],
        tol,
    )
    ssa = check_ssa(rho, tol)
    report.diagnostics["ssa_slack_gap"] = _cross_check(
        "monotonicity slack vs SSA slack", report.slacks[0], ssa.slacks[0]
    )
    return report


def check_sandwich(
    rho: DensityMatrix,
    gamma: DensityMatrix,
    ks: KrausSet,
    tol: float = TOLERANCE,
    regularize: bool = False,
) -> SlackReport:
    """H(Φρ, Φγ) <= H(Λρ, Λγ) <= H(ρ, γ)."""
    if rho.layout.total != gamma.layout.total:
        raise LayoutError(f"dimension mismatch: {rho.layout} vs {gamma.layout}")
    if regularize:
        rho, gamma = rho.regularized(REGULARIZATION), gamma.regularized(REGULARIZATION)
    gamma = gamma.relabeled(rho.layout)
    h_phi = relative_entropy(apply_channel(ks, rho), apply_channel(ks, gamma))
    h_ls = relative_entropy(apply_ls_channel(ks, rho), apply_ls_channel(ks, gamma))
    h = relative_entropy(rho, gamma)
    return SlackReport(
        "sandwich",
        [("H(Φρ, Φγ)", h_phi), ("H(Λρ, Λγ)", h_ls), ("H(ρ, γ)", h)],
        tol,
    )


def check_ls_main(rho: DensityMatrix, ks: KrausSet, tol: float = TOLERANCE) -> SlackReport:
    """Flagged-channel chain for a Kraus set acting on the AB compound.

    S(ABC) - S(AB) <= S[(Λ ⊗ I_C)ρ] - S[Λ(ρ_AB)] <= S[(Φ ⊗ I_C)ρ] - S[Φ(ρ_AB)]
    """
    a, b, c = _abc(rho)
    rho_ab = rho.marginal([a, b])
    if ks.dim != rho_ab.dim:
        raise LayoutError(f"Kraus dimension {ks.dim} does not match dim(AB) = {rho_ab.dim}")
    ks_ab = KrausSet(ks.operators)
    ks_abc = kraus_tensor_identity(ks_ab, rho.layout.dim(c))
    t1 = S(rho) - S(rho_ab)
    t2 = S(apply_ls_channel(ks_abc, rho)) - S(apply_ls_channel(ks_ab, rho_ab))
    t3 = S(apply_channel(ks_abc, rho)) - S(apply_channel(ks_ab, rho_ab))
    return SlackReport(
        "ls-main",
        [
            ("S(ABC) - S(AB)", t1),
            ("S[(Λ⊗I)(ABC)] - S[Λ(AB)]", t2),
            ("S[(Φ⊗I)(ABC)] - S[Φ(AB)]", t3),
        ],
        tol,
    )


def _local_on_b(rho: DensityMatrix, ks_b: KrausSet) -> str:
    b = _abc(rho)[1]
    if ks_b.acting_on is not None and ks_b.acting_on != b:
        raise LayoutError(f"Kraus set acts on {ks_b.acting_on!r}, expected the middle factor {b!r}")
    if ks_b.dim != rho.layout.dim(b):
        raise LayoutError(f"Kraus dimension {ks_b.dim} does not match dim({b}) = {rho.layout.dim(b)}")
    return b


def check_ls9(rho: DensityMatrix, ks_b: KrausSet, tol: float = TOLERANCE) -> SlackReport:
    """Chain for a Kraus set local to B, ending at S(AC) - S(A).

    S(ABC)-S(AB) <= S[Λ(ABC)]-S[Λ(AB)] <= S[Φ_B(ABC)]-S[Φ_B(AB)] <= S(AC)-S(A)
    """
    a, b, c = _abc(rho)
    _local_on_b(rho, ks_b)
    rho_ab = rho.marginal([a, b])
    full = embed_on_subsystem(ks_b, rho.layout, b)
    on_ab = embed_on_subsystem(ks_b, rho_ab.layout, b)
    t1 = S(rho) - S(rho_ab)
    t2 = S(apply_ls_channel(full, rho)) - S(apply_ls_channel(on_ab, rho_ab))
    t3 = S(apply_channel(full, rho)) - S(apply_channel(on_ab, rho_ab))
    t4 = S(rho.marginal([a, c])) - S(rho.marginal([a]))
    return SlackReport(
        "ls9",
        [
            ("S(ABC) - S(AB)", t1),
            ("S[Λ(ABC)] - S[Λ(AB)]", t2),
            ("S[Φ_B(ABC)] - S[Φ_B(AB)]", t3),
            ("S(AC) - S(A)", t4),
        ],
        tol,
    )


def check_fin_equivalence(
    rho: DensityMatrix,
    ks_b: KrausSet,
    tol: float = TOLERANCE,
    regularize: bool = False,
) -> SlackReport:
    """Relative-entropy form of the B-local chain on the dilated state.

    With sigma = V ρ V^† on A,B,C,D,E and B' = (B, D)::

        H(σ_AC, σ_A ⊗ I/d_C) <= H(σ_AB'C, σ_AB' ⊗ I/d_C) <= H(σ_AB'CE, σ_AB'E ⊗ I/d_C)

    The two slacks are cross-checked against the conditional-entropy chain
    of ``check_ls9``: the upper slack equals its first slack and the lower
    slack equals the sum of its last two.
    """
    if regularize:
        rho = rho.regularized(REGULARIZATION)
    a, b, c = _abc(rho)
    _local_on_b(rho, ks_b)
    chain = check_ls9(rho, ks_b, tol)

    dil = build_dilation(embed_on_subsystem(ks_b, rho.layout, b), rho)
    sigma, e = dil.sigma, dil.env_label
    h_full = _rel_to_mixed_c(sigma, c)
    h_mid = _rel_to_mixed_c(sigma.ptrace([e]), c)
    h_ac = _rel_to_mixed_c(sigma.marginal([a, c]), c)
    report = SlackReport(
        "fin-equivalence",
        [
            ("H(σ_AC, σ_A ⊗ I/d_C)", h_ac),
            ("H(σ_AB'C, σ_AB' ⊗ I/d_C)", h_mid),
            ("H(σ_AB'CE, σ_AB'E ⊗ I/d_C)", h_full),
        ],
        tol,
    )
    s1, s2, s3 = chain.slacks
    lower, upper = report.slacks
    report.diagnostics["upper_gap"] = _cross_check("upper slack vs flag slack", upper, s1)
    report.diagnostics["lower_gap"] = _cross_check("lower slack vs B-local tail", lower, s2 + s3)
    ln_dc = math.log(rho.layout.dim(c))
    report.diagnostics["constant_gap"] = max(
        abs((ln_dc - h_full) - chain.values[0]),
        abs((ln_dc - h_mid) - chain.values[1]),
        abs((ln_dc - h_ac) - chain.values[3]),
    )
    return report
