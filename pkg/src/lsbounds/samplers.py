"""Seeded sampling of states, unitaries and Kraus sets.

Uniform draws come from numpy's PCG64 bit generator; Gaussians are made
from that uniform stream by Box-Muller in a fixed call order, so a seed
pins down every draw. Child generators for parallel workers use
``child_seed = SeedSequence(parent_seed, spawn_key=(index,))``.
"""

from __future__ import annotations

import numpy as np

from .channels import KrausSet, from_isometry
from .entropy import DensityMatrix
from .linalg import SystemLayout

ALGORITHM = "PCG64+box-muller"
_MASK64 = (1 << 64) - 1


class SeededGenerator:
    algorithm = ALGORITHM

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK64
        self._rng = np.random.Generator(np.random.PCG64(self.seed))

    def __repr__(self) -> str:
        return f"SeededGenerator(seed={self.seed}, algorithm={self.algorithm!r})"

    def uniform(self, n: int, low: float = 0.0, high: float = 1.0) -> np.ndarray:
        return low + (high - low) * self._rng.random(n)

    def normal(self, n: int) -> np.ndarray:
        pairs = (n + 1) // 2
        u = self._rng.random(2 * pairs)
        r = np.sqrt(-2.0 * np.log(1.0 - u[0::2]))
        theta = 2.0 * np.pi * u[1::2]
        z = np.empty(2 * pairs)
        z[0::2] = r * np.cos(theta)
        z[1::2] = r * np.sin(theta)
        return z[:n]

    def complex_normal(self, shape) -> np.ndarray:
        """Standard complex Gaussian entries, E|z|^2 = 1."""
        n = int(np.prod(shape))
        z = self.normal(2 * n)
        return ((z[0::2] + 1j * z[1::2]) / np.sqrt(2.0)).reshape(shape)

    def child_seed(self, index: int) -> int:
        ss = np.random.SeedSequence(self.seed, spawn_key=(int(index),))
        return int(ss.generate_state(1, np.uint64)[0])

    def child(self, index: int) -> "SeededGenerator":
        return SeededGenerator(self.child_seed(index))


def random_density_matrix(
    d: int, rank: int | None, gen: SeededGenerator, layout: SystemLayout | None = None
) -> DensityMatrix:
    """``G G^† / Tr(G G^†)`` with ``G`` a ``d x rank`` complex Ginibre matrix."""
    rank = d if rank is None else rank
    if not 1 <= rank <= d:
        raise ValueError(f"rank must lie in [1, {d}], got {rank}")
    g = gen.complex_normal((d, rank))
    m = g @ g.conj().T
    m /= np.trace(m).real
    return DensityMatrix.from_matrix(m, layout)


def random_unitary(d: int, gen: SeededGenerator) -> np.ndarray:
    """Haar unitary: QR of a Ginibre matrix with R's diagonal made positive."""
    z = gen.complex_normal((d, d))
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def random_kraus_set(
    d: int, m: int, gen: SeededGenerator, acting_on: str | None = None
) -> KrausSet:
    """First ``d`` columns of a Haar ``(m d)``-unitary, sliced into ``m`` blocks."""
    if d < 1 or m < 1:
        raise ValueError("d and m must be positive")
    u = random_unitary(m * d, gen)
    return from_isometry(u[:, :d], m, acting_on)


def default_layout(dims) -> SystemLayout:
    """Layout labelled A, B, C, ... for the given dimensions."""
    return SystemLayout((chr(ord("A") + i), d) for i, d in enumerate(dims))
