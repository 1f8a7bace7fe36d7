"""JSON state and channel files.

Matrices are grids of ``[re, im]`` pairs. A state file holds either an
explicit matrix::

    {"layout": [["A", 2], ["B", 2]], "matrix": [[[0.5, 0], ...], ...]}

or a named fixture::

    {"fixture": "ghz", "parties": 3}
    {"fixture": "bell"}
    {"fixture": "plus"}
    {"fixture": "product", "factors": [{"label": "A", "diagonal": [0.75, 0.25]}, ...]}
    {"fixture": "maximally_mixed", "dims": [2, 2]}

A channel file holds ``{"dim": d, "count": m, "operators": [grid, ...]}``
or ``{"fixture": "dephasing" | "identity", "dim": d}``, each with an
optional ``"acting_on"`` label.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import fixtures
from .channels import KrausSet, validate_kraus
from .entropy import DensityMatrix
from .errors import KrausError
from .linalg import SystemLayout


class SpecFileError(ValueError):
    pass


def matrix_to_grid(m: np.ndarray) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def grid_to_matrix(grid) -> np.ndarray:
    try:
        arr = np.asarray(grid, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SpecFileError(f"matrix grid is not numeric: {exc}") from None
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise SpecFileError(f"matrix grid must be rows x cols x [re, im], got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def _read(path) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise SpecFileError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise SpecFileError(f"{path} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SpecFileError(f"{path}: top level must be an object")
    return doc


def _layout(raw) -> SystemLayout:
    try:
        if isinstance(raw, dict):
            return SystemLayout(raw.items())
        return SystemLayout((lbl, dim) for lbl, dim in raw)
    except (TypeError, ValueError) as exc:
        raise SpecFileError(f"bad layout {raw!r}: {exc}") from None


def _state_fixture(doc: dict) -> DensityMatrix:
    name = doc["fixture"]
    if name == "ghz":
        return fixtures.ghz(int(doc.get("parties", 3)), int(doc.get("d", 2)))
    if name == "bell":
        return fixtures.bell()
    if name == "plus":
        return fixtures.plus(doc.get("label", "A"))
    if name == "product":
        parts = [fixtures.diagonal(f["diagonal"], f["label"]) for f in doc["factors"]]
        if not parts:
            raise SpecFileError("product fixture needs at least one factor")
        return fixtures.product(*parts)
    if name == "maximally_mixed":
        return fixtures.maximally_mixed([int(d) for d in doc["dims"]])
    raise SpecFileError(f"unknown state fixture {name!r}")


def parse_state(doc: dict) -> DensityMatrix:
    try:
        if "fixture" in doc:
            return _state_fixture(doc)
        layout = _layout(doc["layout"])
        return DensityMatrix(grid_to_matrix(doc["matrix"]), layout)
    except KeyError as exc:
        raise SpecFileError(f"state file missing field {exc}") from None
    except SpecFileError:
        raise
    except (TypeError, ValueError) as exc:
        raise SpecFileError(f"invalid state: {exc}") from None


def load_state(path) -> DensityMatrix:
    return parse_state(_read(path))


def parse_channel(doc: dict) -> KrausSet:
    acting_on = doc.get("acting_on")
    try:
        if "fixture" in doc:
            ks = fixtures.channel(doc["fixture"], int(doc["dim"]), acting_on)
        else:
            ops = [grid_to_matrix(g) for g in doc["operators"]]
            ks = KrausSet(ops, acting_on)
            if "dim" in doc and ks.dim != int(doc["dim"]):
                raise SpecFileError(f"declared dim {doc['dim']} but operators are {ks.dim}x{ks.dim}")
            if "count" in doc and ks.count != int(doc["count"]):
                raise SpecFileError(f"declared count {doc['count']} but found {ks.count} operators")
    except KeyError as exc:
        raise SpecFileError(f"channel file missing field {exc}") from None
    except SpecFileError:
        raise
    except (TypeError, ValueError) as exc:
        raise SpecFileError(f"invalid channel: {exc}") from None
    report = validate_kraus(ks)
    if not report.passed:
        raise KrausError(
            f"Kraus completeness deviation {report.deviation:.3e} exceeds {report.tolerance:.0e}"
        )
    return ks


def load_channel(path) -> KrausSet:
    return parse_channel(_read(path))


def state_to_doc(rho: DensityMatrix) -> dict:
    return {"layout": [list(f) for f in rho.layout.factors], "matrix": matrix_to_grid(rho.matrix)}


def channel_to_doc(ks: KrausSet) -> dict:
    doc = {"dim": ks.dim, "count": ks.count, "operators": [matrix_to_grid(k) for k in ks.operators]}
    if ks.acting_on is not None:
        doc["acting_on"] = ks.acting_on
    return doc
