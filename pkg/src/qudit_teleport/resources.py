"""Named resource states and the matrix file formats.

JSON layout (field names are fixed)::

    {"dim": D, "rows": [[[re, im], [re, im], ...], ...]}

CSV layout: one line per matrix row, ``2 * D`` numbers ``re0, im0, re1, im1, ...``.
"""
from __future__ import annotations

import csv
import io
import json
import re
from pathlib import Path

import numpy as np

from .matrix import ValidationError, projector
from .sampling import random_density
from .weyl import max_entangled

__all__ = [
    "MatrixFormatError",
    "bell_resource",
    "maximally_mixed",
    "isotropic",
    "PRESETS",
    "resolve_resource",
    "matrix_to_json",
    "matrix_from_json",
    "load_matrix",
    "save_matrix",
]


class MatrixFormatError(ValueError):
    """A matrix file could not be parsed."""


def bell_resource(d: int) -> np.ndarray:
    return projector(max_entangled(d))


def maximally_mixed(d: int) -> np.ndarray:
    return np.eye(d * d, dtype=complex) / (d * d)


def isotropic(d: int, p: float) -> np.ndarray:
    """``p |Omega><Omega| + (1 - p) I / d^2``; a state for ``-1/(d^2-1) <= p <= 1``."""
    return p * bell_resource(d) + (1 - p) * maximally_mixed(d)


PRESETS = ("bell", "maximally_mixed", "isotropic", "random_density")

_PRESET_RE = re.compile(r"^(\w+)\s*(?:[:(]\s*([^)]*?)\s*\)?)?$")


def resolve_resource(spec: str, d: int | None) -> tuple[np.ndarray, int]:
    """Turn a preset name or a file path into ``(chi, d)``.

    Presets: ``bell``, ``maximally_mixed``, ``isotropic:P`` (or ``isotropic(P)``)
    and ``random_density:SEED``. Anything else is read as a matrix file.
    """
    match = _PRESET_RE.match(spec.strip())
    if match and match.group(1) in PRESETS:
        name, arg = match.groups()
        if d is None:
            raise ValidationError(f"preset {name!r} needs a dimension")
        if d < 2:
            raise ValidationError(f"dimension must be >= 2, got {d}")
        if name == "bell":
            return bell_resource(d), d
        if name == "maximally_mixed":
            return maximally_mixed(d), d
        if arg is None or arg == "":
            raise ValidationError(f"preset {name!r} needs an argument, e.g. {name}:0.5")
        if name == "isotropic":
            return isotropic(d, float(arg)), d
        return random_density(d * d, int(arg)), d

    chi = load_matrix(spec)
    dim = chi.shape[0]
    root = int(round(np.sqrt(dim)))
    if root * root != dim:
        raise ValidationError(f"resource dimension {dim} is not a perfect square")
    if d is not None and root != d:
        raise ValidationError(f"resource has d={root}, but --dim {d} was given")
    return chi, root


def matrix_to_json(m) -> dict:
    m = np.asarray(m, dtype=complex)
    return {
        "dim": int(m.shape[0]),
        "rows": [[[float(z.real), float(z.imag)] for z in row] for row in m],
    }


def matrix_from_json(obj) -> np.ndarray:
    try:
        dim = int(obj["dim"])
        rows = obj["rows"]
        m = np.array([[complex(re_, im) for re_, im in row] for row in rows])
    except (KeyError, TypeError, ValueError) as exc:
        raise MatrixFormatError(f"malformed matrix JSON: {exc}") from exc
    if m.shape != (dim, dim):
        raise MatrixFormatError(f"matrix JSON declares dim {dim} but rows have shape {m.shape}")
    return m


def _matrix_from_csv(text: str) -> np.ndarray:
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    try:
        vals = np.array([[float(c) for c in r] for r in rows])
    except ValueError as exc:
        raise MatrixFormatError(f"malformed matrix CSV: {exc}") from exc
    if vals.ndim != 2 or vals.shape[1] != 2 * vals.shape[0]:
        raise MatrixFormatError(f"matrix CSV must have D rows of 2*D numbers, got {vals.shape}")
    return vals[:, 0::2] + 1j * vals[:, 1::2]


def load_matrix(path) -> np.ndarray:
    """Read a matrix from JSON or CSV. ``OSError`` propagates for missing files."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".csv":
        return _matrix_from_csv(text)
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MatrixFormatError(f"{path}: not valid JSON ({exc})") from exc
    return matrix_from_json(obj)


def save_matrix(path, m) -> None:
    path = Path(path)
    m = np.asarray(m, dtype=complex)
    if path.suffix.lower() == ".csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for row in m:
            writer.writerow([repr(float(x)) for z in row for x in (z.real, z.imag)])
        path.write_text(buf.getvalue())
    else:
        path.write_text(json.dumps(matrix_to_json(m)) + "\n")
