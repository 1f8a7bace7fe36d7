"""Kraus channels, the flagged channel and its isometric dilation.

For Kraus operators ``K_m`` with ``sum K_m^† K_m = I``:

* ``apply_channel``     rho -> sum_m K_m rho K_m^†
* ``apply_ls_channel``  rho -> sum_m K_m rho K_m^† ⊗ |m><m|_D
* ``build_dilation``    rho -> V rho V^†,  V = sum_m K_m ⊗ |m>_D ⊗ |m>_E

Ancilla factors are appended on the right of the layout with fresh labels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .entropy import DensityMatrix
from .errors import KrausError, LayoutError
from .linalg import SystemLayout

KRAUS_TOL = 1e-9
UNITARY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class KrausSet:
    """Square Kraus operators stacked as an ``(m, d, d)`` array.

    ``acting_on`` optionally names the subsystem the operators address;
    ``None`` means the whole space of whatever state they are applied to.
    """

    operators: np.ndarray
    acting_on: str | None = None

    def __post_init__(self):
        ops = _stack(self.operators)
        ops.setflags(write=False)
        object.__setattr__(self, "operators", ops)

    @property
    def count(self) -> int:
        return self.operators.shape[0]

    @property
    def dim(self) -> int:
        return self.operators.shape[1]

    def __len__(self) -> int:
        return self.count

    def __iter__(self):
        return iter(self.operators)

    def completeness_deviation(self) -> float:
        s = np.einsum("mji,mjk->ik", self.operators.conj(), self.operators)
        return float(np.max(np.abs(s - np.eye(self.dim))))


def _stack(operators) -> np.ndarray:
    if isinstance(operators, np.ndarray) and operators.ndim == 3:
        ops = operators.astype(complex, copy=True)
    else:
        mats = [np.asarray(k, dtype=complex) for k in operators]
        if not mats:
            raise KrausError("a Kraus set needs at least one operator")
        shapes = {k.shape for k in mats}
        if len(shapes) != 1 or any(len(s) != 2 for s in shapes):
            raise KrausError(f"ragged Kraus operator shapes: {sorted(shapes)}")
        ops = np.stack(mats)
    if ops.shape[0] == 0:
        raise KrausError("a Kraus set needs at least one operator")
    if ops.shape[1] != ops.shape[2]:
        raise KrausError(f"Kraus operators must be square, got {ops.shape[1:]}")
    return ops


@dataclass(frozen=True)
class KrausValidation:
    deviation: float
    passed: bool
    tolerance: float = KRAUS_TOL


def validate_kraus(ks: KrausSet, tol: float = KRAUS_TOL) -> KrausValidation:
    dev = ks.completeness_deviation()
    return KrausValidation(dev, dev <= tol, tol)


def _require_valid(ks: KrausSet) -> None:
    report = validate_kraus(ks)
    if not report.passed:
        raise KrausError(f"Kraus completeness deviation {report.deviation:.3e} exceeds {KRAUS_TOL:.0e}")


def embed_on_subsystem(ks: KrausSet, layout: SystemLayout, label: str | None = None) -> KrausSet:
    """Lift a local Kraus set to ``I_before ⊗ K_m ⊗ I_after`` on ``layout``."""
    label = label if label is not None else ks.acting_on
    if label is None:
        raise LayoutError("no subsystem label given for embedding")
    idx = layout.index(label)
    d = layout.dims[idx]
    if ks.dim != d:
        raise LayoutError(f"Kraus dimension {ks.dim} does not match dim({label}) = {d}")
    before = int(np.prod(layout.dims[:idx], dtype=np.int64))
    after = int(np.prod(layout.dims[idx + 1:], dtype=np.int64))
    eye_b, eye_a = np.eye(before), np.eye(after)
    ops = np.stack([np.kron(np.kron(eye_b, k), eye_a) for k in ks.operators])
    return KrausSet(ops, None)


def _full_space_ops(ks: KrausSet, layout: SystemLayout) -> np.ndarray:
    if ks.acting_on is not None and ks.acting_on in layout and ks.dim != layout.total:
        ks = embed_on_subsystem(ks, layout)
    if ks.dim != layout.total:
        raise LayoutError(f"Kraus dimension {ks.dim} does not match state dimension {layout.total}")
    return ks.operators


def apply_channel(ks: KrausSet, rho: DensityMatrix) -> DensityMatrix:
    _require_valid(ks)
    ops = _full_space_ops(ks, rho.layout)
    out = np.einsum("mij,jk,mlk->il", ops, rho.matrix, ops.conj())
    return DensityMatrix(out, rho.layout)


def apply_ls_channel(ks: KrausSet, rho: DensityMatrix, flag_label: str = "D") -> DensityMatrix:
    """Block-diagonal output ``sum_m K_m rho K_m^† ⊗ |m><m|`` with the flag rightmost."""
    _require_valid(ks)
    ops = _full_space_ops(ks, rho.layout)
    m, d = ops.shape[0], ops.shape[1]
    blocks = np.einsum("mij,jk,mlk->mil", ops, rho.matrix, ops.conj())
    out = np.zeros((d, m, d, m), dtype=complex)
    for k in range(m):
        out[:, k, :, k] = blocks[k]
    layout = rho.layout.extended(rho.layout.fresh_label(flag_label), m)
    return DensityMatrix(out.reshape(d * m, d * m), layout)


@dataclass(frozen=True, eq=False)
class DilationResult:
    sigma: DensityMatrix
    isometry: np.ndarray
    flag_label: str
    env_label: str


def dilation_isometry(ks: KrausSet) -> np.ndarray:
    """The ``(d m^2) x d`` block column with blocks ``K_m ⊗ |m> ⊗ |m>``."""
    m, d = ks.count, ks.dim
    v = np.zeros((d, m, m, d), dtype=complex)
    for k in range(m):
        v[:, k, k, :] = ks.operators[k]
    return v.reshape(d * m * m, d)


def build_dilation(
    ks: KrausSet, rho: DensityMatrix, flag_label: str = "D", env_label: str = "E"
) -> DilationResult:
    _require_valid(ks)
    ops = _full_space_ops(ks, rho.layout)
    v = dilation_isometry(KrausSet(ops))
    sigma_m = v @ rho.matrix @ v.conj().T
    d_lbl = rho.layout.fresh_label(flag_label)
    layout = rho.layout.extended(d_lbl, ks.count)
    e_lbl = layout.fresh_label(env_label)
    layout = layout.extended(e_lbl, ks.count)
    return DilationResult(DensityMatrix(sigma_m, layout), v, d_lbl, e_lbl)


def conjugate(v: np.ndarray, rho: DensityMatrix, layout: SystemLayout) -> DensityMatrix:
    """``V rho V^†`` placed on ``layout``."""
    return DensityMatrix(v @ rho.matrix @ v.conj().T, layout)


def is_unitary(w: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    w = np.asarray(w)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        return False
    return float(np.max(np.abs(w.conj().T @ w - np.eye(w.shape[0])))) <= tol


def remix_kraus(ks: KrausSet, w: np.ndarray) -> KrausSet:
    """``K'_n = sum_m w[n, m] K_m`` for a unitary ``w``; the channel is unchanged."""
    w = np.asarray(w, dtype=complex)
    if w.shape != (ks.count, ks.count):
        raise KrausError(f"remix matrix must be {ks.count}x{ks.count}, got {w.shape}")
    if not is_unitary(w):
        raise KrausError("remix matrix is not unitary")
    return KrausSet(np.einsum("nm,mij->nij", w, ks.operators), ks.acting_on)


def unitary_kraus(u: np.ndarray, acting_on: str | None = None) -> KrausSet:
    return KrausSet([u], acting_on)


def identity_kraus(d: int, acting_on: str | None = None) -> KrausSet:
    return KrausSet([np.eye(d)], acting_on)


def dephasing_kraus(d: int = 2, acting_on: str | None = None) -> KrausSet:
    """Computational-basis projectors ``|k><k|``."""
    ops = []
    for k in range(d):
        p = np.zeros((d, d))
        p[k, k] = 1.0
        ops.append(p)
    return KrausSet(ops, acting_on)


def from_isometry(v: np.ndarray, count: int, acting_on: str | None = None) -> KrausSet:
    """Slice a ``(count d) x d`` isometry into ``count`` stacked ``d x d`` blocks."""
    v = np.asarray(v)
    d = v.shape[1]
    if v.shape[0] != count * d:
        raise KrausError(f"isometry shape {v.shape} incompatible with {count} blocks")
    return KrausSet(v.reshape(count, d, d), acting_on)


def kraus_tensor_identity(ks: KrausSet, d_after: int) -> KrausSet:
    """``K_m ⊗ I`` for operators acting on the leading factors."""
    return KrausSet(np.stack([np.kron(k, np.eye(d_after)) for k in ks.operators]), None)
