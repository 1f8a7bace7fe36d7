"""Dense complex matrix substrate.

Kronecker products, partial traces over labelled tensor factors,
Hermitian eigendecomposition and spectral functions restricted to the
support of a positive semi-definite matrix.

Tensor factors follow the usual convention: the leftmost factor of a
layout is the most significant index, so ``kron(a, b)`` lives on the
layout ``[a-factors..., b-factors...]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import LayoutError, NotHermitianError, NotPSDError

HERM_TOL = 1e-10
EIG_TOL = 1e-10
DEFAULT_CLIP = 1e-12

JACOBI_REL_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100


@dataclass(frozen=True)
class SystemLayout:
    """Ordered labelled tensor factors, e.g. ``SystemLayout.of(A=2, B=3)``."""

    factors: tuple[tuple[str, int], ...]

    def __init__(self, factors: Iterable[tuple[str, int]]):
        factors = tuple((str(lbl), int(dim)) for lbl, dim in factors)
        labels = [lbl for lbl, _ in factors]
        if len(set(labels)) != len(labels):
            raise LayoutError(f"duplicate labels in layout: {labels}")
        for lbl, dim in factors:
            if dim < 1:
                raise LayoutError(f"factor {lbl!r} has dimension {dim} < 1")
        object.__setattr__(self, "factors", factors)

    @classmethod
    def of(cls, **dims: int) -> "SystemLayout":
        return cls(dims.items())

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(lbl for lbl, _ in self.factors)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(dim for _, dim in self.factors)

    @property
    def total(self) -> int:
        return math.prod(dim for _, dim in self.factors)

    def __len__(self) -> int:
        return len(self.factors)

    def __contains__(self, label: object) -> bool:
        return label in self.labels

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise LayoutError(f"unknown label {label!r}; layout has {self.labels}") from None

    def dim(self, label: str) -> int:
        return self.factors[self.index(label)][1]

    def dim_of(self, labels: Iterable[str]) -> int:
        out = 1
        for lbl in labels:
            out *= self.dim(lbl)
        return out

    def subset(self, labels: Iterable[str]) -> "SystemLayout":
        """Layout restricted to ``labels``, kept in this layout's order."""
        wanted = set(labels)
        for lbl in wanted:
            self.index(lbl)
        return SystemLayout(f for f in self.factors if f[0] in wanted)

    def without(self, labels: Iterable[str]) -> "SystemLayout":
        drop = set(labels)
        for lbl in drop:
            self.index(lbl)
        return SystemLayout(f for f in self.factors if f[0] not in drop)

    def extended(self, label: str, dim: int) -> "SystemLayout":
        return SystemLayout(self.factors + ((label, dim),))

    def fresh_label(self, base: str) -> str:
        """``base`` if unused, otherwise ``base1``, ``base2``, ..."""
        if base not in self.labels:
            return base
        k = 1
        while f"{base}{k}" in self.labels:
            k += 1
        return f"{base}{k}"

    def __str__(self) -> str:
        return "{" + ", ".join(f"{lbl}:{dim}" for lbl, dim in self.factors) + "}"


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues in descending order with matching eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(np.asarray(a), np.asarray(b))


def kron_all(mats: Sequence[np.ndarray]) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def _check_square(m: np.ndarray, layout: SystemLayout | None = None) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise LayoutError(f"expected a square matrix, got shape {m.shape}")
    if layout is not None and m.shape[0] != layout.total:
        raise LayoutError(
            f"matrix dimension {m.shape[0]} does not match layout {layout} (total {layout.total})"
        )
    return m


def partial_trace(
    m: np.ndarray, layout: SystemLayout, traced: Iterable[str]
) -> tuple[np.ndarray, SystemLayout]:
    """Trace out the factors named in ``traced``.

    Returns the reduced matrix together with the layout of the remaining
    factors (original relative order). Tracing every factor yields a 1x1
    matrix holding ``Tr m``.
    """
    m = _check_square(m, layout)
    traced = set(traced)
    for lbl in traced:
        layout.index(lbl)
    n = len(layout)
    keep = [i for i, lbl in enumerate(layout.labels) if lbl not in traced]
    drop = [i for i, lbl in enumerate(layout.labels) if lbl in traced]
    reduced_layout = SystemLayout(layout.factors[i] for i in keep)

    t = m.reshape(layout.dims + layout.dims)
    # bring to (keep_row, drop_row, keep_col, drop_col) then contract drop indices
    t = t.transpose(keep + drop + [n + i for i in keep] + [n + i for i in drop])
    dk = reduced_layout.total
    dd = layout.total // dk
    t = t.reshape(dk, dd, dk, dd)
    return np.einsum("ijkj->ik", t), reduced_layout


def marginal(m: np.ndarray, layout: SystemLayout, kept: Iterable[str]) -> tuple[np.ndarray, SystemLayout]:
    kept = set(kept)
    return partial_trace(m, layout, [lbl for lbl in layout.labels if lbl not in kept])


def permute_factors(
    m: np.ndarray, layout: SystemLayout, order: Sequence[str]
) -> tuple[np.ndarray, SystemLayout]:
    """Reorder the tensor factors of an operator to ``order``."""
    m = _check_square(m, layout)
    if sorted(order) != sorted(layout.labels):
        raise LayoutError(f"order {list(order)} is not a permutation of {layout.labels}")
    perm = [layout.index(lbl) for lbl in order]
    n = len(layout)
    t = m.reshape(layout.dims + layout.dims).transpose(perm + [n + p for p in perm])
    new_layout = SystemLayout(layout.factors[p] for p in perm)
    return t.reshape(new_layout.total, new_layout.total), new_layout


def with_maximally_mixed(
    m: np.ndarray, layout: SystemLayout, target: SystemLayout
) -> np.ndarray:
    """``m ⊗ I/d`` on the factors of ``target`` missing from ``layout``.

    The identity factors are inserted at their positions in ``target``.
    """
    m = _check_square(m, layout)
    missing = [f for f in target.factors if f[0] not in layout.labels]
    for lbl in layout.labels:
        target.index(lbl)
    d_missing = math.prod(d for _, d in missing)
    full = np.kron(m, np.eye(d_missing) / d_missing)
    full_layout = SystemLayout(layout.factors + tuple(missing))
    out, _ = permute_factors(full, full_layout, target.labels)
    return out


def hermiticity_deviation(m: np.ndarray) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def _jacobi_eigh(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic complex Jacobi sweeps on a Hermitian matrix."""
    a = np.array(h, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = np.linalg.norm(a)
    if scale == 0.0 or n == 1:
        return np.real(np.diag(a)).copy(), v
    for _ in range(JACOBI_MAX_SWEEPS):
        off = np.sqrt(max(np.linalg.norm(a) ** 2 - np.sum(np.abs(np.diag(a)) ** 2), 0.0))
        if off <= JACOBI_REL_TOL * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                phase = apq / mag
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # phase-fix column q, then real plane rotation
                g = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]], dtype=complex)
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ g
    return np.real(np.diag(a)).copy(), v


def hermitian_eig(m: np.ndarray, method: str = "lapack") -> Spectrum:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    The input is symmetrized after checking its Hermiticity deviation
    against ``HERM_TOL``. ``method="jacobi"`` runs the cyclic Jacobi
    reference solver instead of LAPACK.
    """
    m = _check_square(m)
    dev = hermiticity_deviation(m)
    if dev > HERM_TOL:
        raise NotHermitianError(f"Hermiticity deviation {dev:.3e} exceeds {HERM_TOL:.0e}")
    h = (m + m.conj().T) / 2
    if method == "lapack":
        w, v = np.linalg.eigh(h)
    elif method == "jacobi":
        w, v = _jacobi_eigh(h)
    else:
        raise ValueError(f"unknown eigensolver {method!r}")
    order = np.argsort(-w, kind="stable")
    return Spectrum(np.asarray(w[order], dtype=float), np.asarray(v[:, order], dtype=complex))


def _psd_spectrum(m: np.ndarray, clip: float) -> Spectrum:
    spec = hermitian_eig(m)
    if spec.eigenvalues.size and spec.eigenvalues[-1] < -clip:
        raise NotPSDError(f"eigenvalue {spec.eigenvalues[-1]:.3e} below -{clip:.0e}")
    return spec


def matrix_log_on_support(m: np.ndarray, clip: float = DEFAULT_CLIP) -> np.ndarray:
    """Natural log on the support of a PSD matrix, zero on its kernel."""
    spec = _psd_spectrum(m, clip)
    lam = spec.eigenvalues
    f = np.zeros_like(lam)
    on = lam > clip
    f[on] = np.log(lam[on])
    v = spec.eigenvectors
    return (v * f) @ v.conj().T


def support_projector(m: np.ndarray, clip: float = DEFAULT_CLIP) -> np.ndarray:
    spec = _psd_spectrum(m, clip)
    v = spec.eigenvectors[:, spec.eigenvalues > clip]
    return v @ v.conj().T
