"""JSON file formats used by the command line.

State file::

    {"dim": 4, "dims": [2, 2], "data": [[[re, im], ...], ...]}

Kraus file: a list of matrices, or of ``{"matrix": ..., "sign": "+" | "-"}``.

Measurement file (for ``reconstruct``)::

    {"dims": [2], "measurements": [{"g": <matrix>, "values": [w_0, w_1, ...]}, ...]}

Floats are written with Python's shortest round-trip repr, so a file
written and read back reproduces every bit of the matrix.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .channels import KrausMap
from .errors import DimensionMismatch
from .config import get_tolerances
from .linmap import DensityMatrix, as_matrix
from .tomography import Tomogram


class InputError(ValueError):
    """Malformed or invalid input file; ``location`` is 'line L, column C' when known."""

    def __init__(self, message: str, location: str | None = None):
        super().__init__(f"{message} ({location})" if location else message)
        self.location = location


def matrix_to_json(m) -> list:
    m = as_matrix(m)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(data: Any, what: str = "matrix") -> np.ndarray:
    try:
        arr = np.array(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{what} must be a nested list of [re, im] pairs: {exc}") from None
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise InputError(f"{what} must have shape rows x cols x 2, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{what} contains NaN or infinite entries")
    return arr[..., 0] + 1j * arr[..., 1]


def _load_json(path) -> Any:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc.msg}",
                         f"line {exc.lineno}, column {exc.colno}") from None


def parse_dims(text: str | Sequence[int] | None) -> tuple[int, ...] | None:
    if text is None:
        return None
    if isinstance(text, str):
        try:
            dims = tuple(int(x) for x in text.replace("x", ",").split(",") if x.strip())
        except ValueError:
            raise InputError(f"cannot parse dims {text!r}; use e.g. 2,2") from None
    else:
        dims = tuple(int(x) for x in text)
    if not dims or any(d < 1 for d in dims):
        raise InputError(f"invalid dims {dims}")
    return dims


def state_to_json(m, dims: Sequence[int] | None = None) -> dict:
    m = as_matrix(m)
    n = m.shape[0]
    return {"dim": n, "dims": list(dims) if dims else [n], "data": matrix_to_json(m)}


def write_state_file(path, m, dims: Sequence[int] | None = None) -> None:
    Path(path).write_text(json.dumps(state_to_json(m, dims)) + "\n")


def load_state(path, dims: Sequence[int] | None = None, hermitian_only: bool = False):
    """Read a state file.

    Returns a DensityMatrix, or with ``hermitian_only`` a Hermitian array
    plus its dims (for tomograms of non-state matrices).
    """
    raw = _load_json(path)
    if not isinstance(raw, dict) or "data" not in raw:
        raise InputError(f"{path}: expected an object with a 'data' field")
    m = matrix_from_json(raw["data"], "data")
    n = m.shape[0]
    if m.shape != (n, n):
        raise InputError(f"{path}: matrix must be square, got {m.shape[0]}x{m.shape[1]}")
    if "dim" in raw and raw["dim"] != n:
        raise InputError(f"{path}: 'dim' is {raw['dim']} but matrix is {n}x{n}")
    dims = tuple(dims) if dims else parse_dims(raw.get("dims")) or (n,)
    if math.prod(dims) != n:
        raise InputError(f"{path}: dims {dims} do not multiply to {n}")
    if hermitian_only:
        resid = np.max(np.abs(m - m.conj().T))
        if resid > get_tolerances().spectral:
            raise InputError(f"{path}: matrix is not Hermitian (residual {resid:.3g})")
        return (m + m.conj().T) / 2, dims
    try:
        return DensityMatrix(m, dims)
    except DimensionMismatch as exc:
        raise InputError(f"{path}: {exc}") from None


def load_matrix(path) -> np.ndarray:
    raw = _load_json(path)
    if isinstance(raw, dict):
        raw = raw.get("data", raw.get("matrix"))
    return matrix_from_json(raw, f"matrix in {path}")


def load_kraus(path) -> KrausMap:
    raw = _load_json(path)
    if not isinstance(raw, list) or not raw:
        raise InputError(f"{path}: expected a non-empty list of Kraus operators")
    pos, neg = [], []
    for i, entry in enumerate(raw):
        sign = "+"
        if isinstance(entry, dict):
            sign = entry.get("sign", "+")
            entry = entry.get("matrix")
        if sign not in ("+", "-"):
            raise InputError(f"{path}: entry {i} has sign {sign!r}, expected '+' or '-'")
        (pos if sign == "+" else neg).append(matrix_from_json(entry, f"Kraus operator {i}"))
    try:
        return KrausMap(tuple(pos), tuple(neg))
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


def kraus_to_json(k: KrausMap) -> list:
    return ([{"matrix": matrix_to_json(v), "sign": "+"} for v in k.positive]
            + [{"matrix": matrix_to_json(v), "sign": "-"} for v in k.negative])


def load_measurements(path):
    raw = _load_json(path)
    if not isinstance(raw, dict) or "measurements" not in raw:
        raise InputError(f"{path}: expected an object with a 'measurements' list")
    out = []
    for i, item in enumerate(raw["measurements"]):
        try:
            g = matrix_from_json(item["g"], f"g of measurement {i}")
            values = np.asarray(item["values"], dtype=float).reshape(-1)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"{path}: measurement {i} is malformed: {exc}") from None
        out.append((g, values))
    return out, parse_dims(raw.get("dims"))


def measurements_to_json(pairs, dims: Sequence[int] | None = None) -> dict:
    return {
        "dims": list(dims) if dims else None,
        "measurements": [
            {"g": matrix_to_json(g),
             "values": [float(x) for x in (t.flat() if isinstance(t, Tomogram) else np.ravel(t))]}
            for g, t in pairs
        ],
    }
