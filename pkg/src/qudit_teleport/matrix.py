"""Dense complex-matrix primitives.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Bipartite
operators use the usual Kronecker ordering: for ``A (x) B`` the first factor
is the slow (outer) index.
"""
from __future__ import annotations

import contextlib
import dataclasses
from dataclasses import dataclass
from typing import Iterator

import numpy as np

__all__ = [
    "Tolerances",
    "ValidationError",
    "get_tolerances",
    "set_tolerances",
    "tolerances",
    "kron",
    "partial_trace",
    "hermitian_sqrt",
    "psd_eigh",
    "swap_operator",
    "dagger",
    "matmul",
    "trace",
    "trace_distance",
    "as_matrix",
    "as_density",
    "as_pure",
    "projector",
]


class ValidationError(ValueError):
    """Raised when an input fails a matrix or state invariant."""


@dataclass(frozen=True)
class Tolerances:
    herm: float = 1e-10
    psd: float = 1e-10
    recon: float = 1e-8
    trace: float = 1e-10
    norm: float = 1e-10


_TOL = Tolerances()


def get_tolerances() -> Tolerances:
    return _TOL


def set_tolerances(**overrides: float) -> Tolerances:
    """Replace the library-wide tolerances. Returns the previous setting."""
    global _TOL
    previous = _TOL
    _TOL = dataclasses.replace(_TOL, **overrides)
    return previous


@contextlib.contextmanager
def tolerances(**overrides: float) -> Iterator[Tolerances]:
    """Temporarily override tolerances inside a ``with`` block."""
    previous = set_tolerances(**overrides)
    try:
        yield _TOL
    finally:
        set_tolerances(**dataclasses.asdict(previous))


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D complex array."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        raise ValidationError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} has non-finite entries")
    return arr


def _check_square(m: np.ndarray) -> int:
    if m.shape[0] != m.shape[1]:
        raise ValidationError(f"matrix must be square, got shape {m.shape}")
    return m.shape[0]


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def dagger(m) -> np.ndarray:
    return as_matrix(m).conj().T


def matmul(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ValidationError(f"dimension mismatch: {a.shape} @ {b.shape}")
    return a @ b


def trace(m) -> complex:
    m = as_matrix(m)
    _check_square(m)
    return complex(np.trace(m))


def partial_trace(m, dim_a: int, dim_b: int, keep: str = "A") -> np.ndarray:
    """Trace out one half of an operator on ``C^dim_a (x) C^dim_b``.

    ``keep="A"`` returns the operator on the first factor, ``keep="B"`` the
    operator on the second.
    """
    m = np.asarray(m, dtype=complex)
    n = dim_a * dim_b
    if m.shape != (n, n):
        raise ValidationError(
            f"bad bipartition: shape {m.shape} is not ({dim_a}*{dim_b})^2"
        )
    t = m.reshape(dim_a, dim_b, dim_a, dim_b)
    keep = keep.upper()
    if keep == "A":
        return np.einsum("ikjk->ij", t)
    if keep == "B":
        return np.einsum("kikj->ij", t)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def _hermitian_part(m: np.ndarray, tol: float) -> np.ndarray:
    dev = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if dev > tol:
        raise ValidationError(f"matrix is not Hermitian (max deviation {dev:.3e})")
    return (m + m.conj().T) / 2


def psd_eigh(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian PSD matrix with round-off removed.

    Eigenvalues in ``[-tol_psd, 0)`` are clamped to zero, anything more
    negative raises :class:`ValidationError`. Positive eigenvalues below the
    numerical-rank cutoff ``dim * eps * max|w|`` are zeroed too; their square
    roots would otherwise surface at the ``1e-8`` level.
    """
    tol = _TOL
    m = as_matrix(m)
    _check_square(m)
    h = _hermitian_part(m, tol.herm)
    w, v = np.linalg.eigh(h)
    if w.size and w[0] < -tol.psd:
        raise ValidationError(f"not PSD (min eigenvalue {w[0]:.3e})")
    cutoff = w.size * np.finfo(float).eps * np.max(np.abs(w), initial=0.0)
    w = np.where(w > cutoff, w, 0.0)
    return w, v


def hermitian_sqrt(m) -> np.ndarray:
    """Principal square root of a Hermitian positive semidefinite matrix."""
    w, v = psd_eigh(m)
    return (v * np.sqrt(w)) @ v.conj().T


def swap_operator(d: int) -> np.ndarray:
    """Exchange operator on ``C^d (x) C^d``: ``|i>|j> -> |j>|i>``."""
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    f = np.zeros((d * d, d * d), dtype=complex)
    i, j = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    f[(j * d + i).ravel(), (i * d + j).ravel()] = 1.0
    return f


def projector(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    return np.outer(psi, psi.conj())


def as_density(m, dim: int | None = None, name: str = "density matrix") -> np.ndarray:
    """Validate a density matrix and return its Hermitian-symmetrized copy.

    Checks Hermiticity, unit trace and positivity against the active
    tolerances. If ``dim`` is given the matrix must be ``dim x dim``.
    """
    tol = _TOL
    m = as_matrix(m, name)
    n = _check_square(m)
    if dim is not None and n != dim:
        raise ValidationError(f"{name} has dimension {n}, expected {dim}")
    h = _hermitian_part(m, tol.herm)
    tr = np.trace(h).real
    if abs(tr - 1.0) > tol.trace:
        raise ValidationError(f"{name} has trace {tr!r}, expected 1")
    w = np.linalg.eigvalsh(h)
    if w[0] < -tol.psd:
        raise ValidationError(f"{name} is not PSD (min eigenvalue {w[0]:.3e})")
    return h


def as_pure(psi, dim: int | None = None) -> np.ndarray:
    """Validate a unit-norm state vector."""
    v = np.asarray(psi, dtype=complex).ravel()
    if dim is not None and v.size != dim:
        raise ValidationError(f"state has dimension {v.size}, expected {dim}")
    if not np.all(np.isfinite(v)):
        raise ValidationError("state has non-finite entries")
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > _TOL.norm:
        raise ValidationError(f"state is not normalized (norm {norm!r})")
    return v


def trace_distance(rho, sigma) -> float:
    """Half the trace norm of ``rho - sigma``."""
    rho, sigma = as_matrix(rho), as_matrix(sigma)
    if rho.shape != sigma.shape:
        raise ValidationError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    diff = rho - sigma
    w = np.linalg.eigvalsh((diff + diff.conj().T) / 2)
    return 0.5 * float(np.sum(np.abs(w)))
