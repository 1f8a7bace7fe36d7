"""Named states and channels with closed-form entropies."""

from __future__ import annotations

import numpy as np

from .channels import KrausSet, dephasing_kraus, identity_kraus
from .entropy import DensityMatrix
from .linalg import SystemLayout
from .samplers import default_layout


def ghz(parties: int = 3, d: int = 2) -> DensityMatrix:
    """(|0...0> + ... + |d-1...d-1>)/sqrt(d) on factors A, B, C, ..."""
    layout = default_layout([d] * parties)
    psi = np.zeros(layout.total, dtype=complex)
    stride = sum(d ** k for k in range(parties))
    psi[[k * stride for k in range(d)]] = 1.0
    return DensityMatrix.pure(psi, layout)


def bell() -> DensityMatrix:
    """(|00> + |11>)/sqrt(2) on A, B."""
    return ghz(2, 2)


def plus(label: str = "A") -> DensityMatrix:
    return DensityMatrix.pure([1.0, 1.0], SystemLayout([(label, 2)]))


def diagonal(probs, label: str = "A") -> DensityMatrix:
    p = np.asarray(probs, dtype=float)
    return DensityMatrix(np.diag(p).astype(complex), SystemLayout([(label, p.size)]))


def product(*states: DensityMatrix) -> DensityMatrix:
    out = states[0]
    for s in states[1:]:
        out = out.tensor(s)
    return out


def maximally_mixed(dims) -> DensityMatrix:
    return DensityMatrix.maximally_mixed(default_layout(dims))


CHANNELS = {
    "identity": identity_kraus,
    "dephasing": dephasing_kraus,
}


def channel(name: str, d: int, acting_on: str | None = None) -> KrausSet:
    try:
        factory = CHANNELS[name]
    except KeyError:
        raise ValueError(f"unknown channel fixture {name!r}; known: {sorted(CHANNELS)}") from None
    return factory(d, acting_on)
