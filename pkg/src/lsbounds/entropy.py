"""Density matrices, von Neumann entropy, relative entropy, conditional entropy.

All quantities are in nats. Relative entropy is ``+inf`` when the kernel
of the second argument is not contained in the kernel of the first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np

from . import linalg
from .errors import InternalConsistencyError, InvalidStateError, LayoutError
from .linalg import DEFAULT_CLIP, HERM_TOL, Spectrum, SystemLayout

TRACE_TOL = 1e-10
KERNEL_TOL = 1e-9
# results in (-NEG_CLAMP, 0) are float noise and reported as 0
NEG_CLAMP = 1e-9


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray
    layout: SystemLayout

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidStateError(f"density matrix must be square, got shape {m.shape}")
        if m.shape[0] != self.layout.total:
            raise InvalidStateError(
                f"matrix dimension {m.shape[0]} does not match layout {self.layout}"
            )
        dev = linalg.hermiticity_deviation(m)
        if dev > HERM_TOL:
            raise InvalidStateError(f"not Hermitian (deviation {dev:.3e})")
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidStateError(f"trace {tr!r} differs from 1")
        m = (m + m.conj().T) / 2
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        lam_min = self.spectrum.eigenvalues[-1]
        if lam_min < -DEFAULT_CLIP:
            raise InvalidStateError(f"not positive semi-definite (eigenvalue {lam_min:.3e})")

    @classmethod
    def from_matrix(cls, m, layout: SystemLayout | None = None) -> "DensityMatrix":
        m = np.asarray(m, dtype=complex)
        if layout is None:
            layout = SystemLayout([("A", m.shape[0])])
        return cls(m, layout)

    @classmethod
    def pure(cls, psi, layout: SystemLayout | None = None) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex).ravel()
        psi = psi / np.linalg.norm(psi)
        return cls.from_matrix(np.outer(psi, psi.conj()), layout)

    @classmethod
    def maximally_mixed(cls, layout: SystemLayout) -> "DensityMatrix":
        d = layout.total
        return cls(np.eye(d, dtype=complex) / d, layout)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def spectrum(self) -> Spectrum:
        return linalg.hermitian_eig(self.matrix)

    def ptrace(self, traced: Iterable[str]) -> "DensityMatrix":
        m, lay = linalg.partial_trace(self.matrix, self.layout, traced)
        return DensityMatrix(m, lay)

    def marginal(self, kept: Iterable[str]) -> "DensityMatrix":
        m, lay = linalg.marginal(self.matrix, self.layout, kept)
        return DensityMatrix(m, lay)

    def tensor(self, other: "DensityMatrix") -> "DensityMatrix":
        return DensityMatrix(
            np.kron(self.matrix, other.matrix),
            SystemLayout(self.layout.factors + other.layout.factors),
        )

    def permuted(self, order) -> "DensityMatrix":
        m, lay = linalg.permute_factors(self.matrix, self.layout, order)
        return DensityMatrix(m, lay)

    def regularized(self, eps: float = 1e-9) -> "DensityMatrix":
        """Mix with ``eps`` of the maximally mixed state."""
        d = self.dim
        return DensityMatrix((1 - eps) * self.matrix + eps * np.eye(d) / d, self.layout)

    def relabeled(self, layout: SystemLayout) -> "DensityMatrix":
        return DensityMatrix(self.matrix, layout)


def _clamp_nonneg(value: float, what: str) -> float:
    if value < 0.0:
        if value > -NEG_CLAMP:
            return 0.0
        raise InternalConsistencyError(f"{what} evaluated to {value:.3e} < 0")
    return value


def _entropy_of_spectrum(lam: np.ndarray, clip: float) -> float:
    lam = lam[lam > clip]
    return float(-np.sum(lam * np.log(lam)))


def von_neumann_entropy(rho: DensityMatrix, clip: float = DEFAULT_CLIP) -> float:
    """``-Tr rho ln rho`` with ``0 ln 0 = 0``."""
    return _clamp_nonneg(_entropy_of_spectrum(rho.spectrum.eigenvalues, clip), "entropy")


def relative_entropy(rho: DensityMatrix, gamma: DensityMatrix, clip: float = DEFAULT_CLIP) -> float:
    """``Tr rho (ln rho - ln gamma)``, or ``inf`` if ker(gamma) is not inside ker(rho).

    The kernel condition is tested as ``Tr rho (I - P) > KERNEL_TOL`` with
    ``P`` the support projector of ``gamma``; the cross term is evaluated
    on that support only.
    """
    if rho.dim != gamma.dim:
        raise LayoutError(f"dimension mismatch: {rho.dim} vs {gamma.dim}")
    g = gamma.spectrum
    on = g.eigenvalues > clip
    u = g.eigenvectors[:, on]
    # populations of rho along the support eigenbasis of gamma
    pops = np.real(np.einsum("ik,ij,jk->k", u.conj(), rho.matrix, u))
    leak = np.trace(rho.matrix).real - float(np.sum(pops))
    if leak > KERNEL_TOL:
        return math.inf
    neg_s = -_entropy_of_spectrum(rho.spectrum.eigenvalues, clip)
    cross = float(np.sum(pops * np.log(g.eigenvalues[on])))
    return _clamp_nonneg(neg_s - cross, "relative entropy")


def _as_labels(labels) -> list[str]:
    if isinstance(labels, str):
        return [labels]
    return list(labels)


def _check_labels(rho: DensityMatrix, target: str, rest) -> list[str]:
    rest = _as_labels(rest)
    for lbl in [target, *rest]:
        rho.layout.index(lbl)
    if target in rest:
        raise LayoutError(f"target {target!r} also listed in rest")
    return rest


def conditional_entropy(rho: DensityMatrix, target: str, rest=()) -> float:
    """``S(rho_{rest+target}) - S(rho_rest)``; may be negative."""
    rest = _check_labels(rho, target, rest)
    joint = rho.marginal(rest + [target])
    s_rest = von_neumann_entropy(rho.marginal(rest)) if rest else 0.0
    return von_neumann_entropy(joint) - s_rest


def conditional_via_relative(rho: DensityMatrix, target: str, rest=()) -> float:
    """Conditional entropy as ``ln d - H(rho_{rest+target}, rho_rest ⊗ I/d)``."""
    rest = _check_labels(rho, target, rest)
    joint = rho.marginal(rest + [target])
    reference = maximally_mixed_extension(joint.marginal(rest), joint.layout)
    h = relative_entropy(joint, reference)
    if math.isinf(h):
        raise InternalConsistencyError(
            "relative entropy to rho_rest ⊗ I/d is infinite, which no valid state allows"
        )
    return math.log(rho.layout.dim(target)) - h


def maximally_mixed_extension(reduced: DensityMatrix, target: SystemLayout) -> DensityMatrix:
    """``reduced ⊗ I/d`` with the identity factors placed per ``target``."""
    return DensityMatrix(linalg.with_maximally_mixed(reduced.matrix, reduced.layout, target), target)
