"""Weyl shift-and-phase unitaries and the generalized Bell basis.

``U^{n,m} = sum_j exp(2 pi i n j / d) |j><j+m|`` with indices taken mod ``d``,
so negative ``n`` or ``m`` wrap around (``U^{n,-m}`` is ``weyl_unitary(d, n, -m)``).
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

__all__ = [
    "weyl_unitary",
    "max_entangled",
    "bell_state",
    "bell_basis",
    "weyl_indices",
]


def _check_dim(d: int) -> None:
    if int(d) != d or d < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {d!r}")


def weyl_indices(d: int):
    """All ``(n, m)`` pairs in row-major order."""
    return [(n, m) for n in range(d) for m in range(d)]


@lru_cache(maxsize=256)
def _weyl_cached(d: int, n: int, m: int) -> np.ndarray:
    j = np.arange(d)
    u = np.zeros((d, d), dtype=complex)
    u[j, (j + m) % d] = np.exp(2j * np.pi * n * j / d)
    u.setflags(write=False)
    return u


def weyl_unitary(d: int, n: int, m: int) -> np.ndarray:
    _check_dim(d)
    return _weyl_cached(int(d), int(n) % d, int(m) % d).copy()


def max_entangled(d: int) -> np.ndarray:
    """``(1/sqrt d) sum_i |i>|i>`` as a length ``d**2`` vector."""
    _check_dim(d)
    return np.eye(d, dtype=complex).ravel() / np.sqrt(d)


def bell_state(d: int, n: int, m: int) -> np.ndarray:
    """``(U^{n,m} (x) I) |Omega^{0,0}>``."""
    # (U (x) I) vec_rowmajor(I) / sqrt(d) == vec_rowmajor(U) / sqrt(d)
    return weyl_unitary(d, n, m).ravel() / np.sqrt(d)


def bell_basis(d: int) -> np.ndarray:
    """Array of shape ``(d, d, d*d)``; ``basis[n, m]`` is ``|Omega^{n,m}>``."""
    _check_dim(d)
    basis = np.empty((d, d, d * d), dtype=complex)
    for n, m in weyl_indices(d):
        basis[n, m] = bell_state(d, n, m)
    return basis
