"""Haar-random states and unitaries, and a reproducible Monte Carlo estimator.

Randomness is addressed by ``(seed, stream, chunk)``: each triple maps to an
independent ``numpy`` generator through :class:`numpy.random.SeedSequence`
spawn keys. :func:`mc_estimate` splits its samples into fixed-size chunks,
one generator per chunk, and merges the per-chunk moments in chunk order, so
the result does not depend on how many worker threads were used.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .matrix import partial_trace

__all__ = [
    "RngState",
    "McEstimate",
    "make_rng",
    "haar_unitary",
    "haar_pure",
    "hs_mixed",
    "random_density",
    "mc_estimate",
    "DEFAULT_SAMPLES",
    "DEFAULT_CHUNK",
]

DEFAULT_SAMPLES = 100_000
DEFAULT_CHUNK = 4096


@dataclass(frozen=True)
class RngState:
    """Seed plus sub-stream index; ``generator(*extra)`` is deterministic."""

    seed: int
    stream: int = 0

    def generator(self, *extra: int) -> np.random.Generator:
        return make_rng(self.seed, self.stream, *extra)


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    if not 0 <= int(seed) < 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed!r}")
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.PCG64(ss))


def _rng(rng) -> np.random.Generator:
    if isinstance(rng, RngState):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def _ginibre(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def haar_unitary(d: int, rng=None, size: int | None = None) -> np.ndarray:
    """Haar-distributed ``d x d`` unitary (or a stack of ``size`` of them).

    QR of a complex Ginibre matrix, with the columns of ``Q`` rephased so
    that ``R`` has a positive diagonal; without the rephasing the result is
    not Haar.
    """
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    rng = _rng(rng)
    shape = (d, d) if size is None else (size, d, d)
    q, r = np.linalg.qr(_ginibre(rng, shape))
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    phases = diag / np.abs(diag)
    return q * phases[..., None, :]


def haar_pure(dim: int, rng=None, size: int | None = None) -> np.ndarray:
    """Uniformly random unit vector in ``C^dim`` (rows of a ``(size, dim)`` array)."""
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    rng = _rng(rng)
    shape = (dim,) if size is None else (size, dim)
    z = _ginibre(rng, shape)
    return z / np.linalg.norm(z, axis=-1, keepdims=True)


def hs_mixed(d: int, rng=None, return_purification: bool = False):
    """Hilbert-Schmidt random ``d x d`` density matrix.

    Reduces a Haar-random state on (ancilla, system) of dimension ``d**2``
    over the ancilla. With ``return_purification`` the generating state is
    returned as well.
    """
    phi = haar_pure(d * d, rng)
    rho = partial_trace(np.outer(phi, phi.conj()), d, d, keep="B")
    rho = (rho + rho.conj().T) / 2
    return (rho, phi) if return_purification else rho


def random_density(dim: int, seed: int) -> np.ndarray:
    """Full-rank Hilbert-Schmidt random density matrix of size ``dim`` from a seed."""
    g = _ginibre(make_rng(seed), (dim, dim))
    rho = g @ g.conj().T
    rho = rho / np.trace(rho).real
    return (rho + rho.conj().T) / 2


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    n_samples: int
    seed: int
    stream: int = 0

    def z_score(self, expected: float) -> float:
        diff = abs(self.mean - expected)
        if self.stderr == 0.0:
            return 0.0 if diff == 0.0 else float("inf")
        return diff / self.stderr

    def agrees_with(self, expected: float, n_sigma: float = 4.0, atol: float = 1e-12) -> bool:
        """``|mean - expected| <= n_sigma * stderr + atol``.

        ``atol`` absorbs round-off for statistics that are constant in exact
        arithmetic, where ``stderr`` is zero or at machine precision.
        """
        return abs(self.mean - expected) <= n_sigma * self.stderr + atol


def _moments(values: np.ndarray) -> tuple[int, float, float]:
    values = np.asarray(values, dtype=float).ravel()
    n = values.size
    if np.all(values == values[0]):
        return n, float(values[0]), 0.0
    mean = float(values.mean())
    m2 = float(np.sum((values - mean) ** 2))
    return n, mean, m2


def _merge(a, b):
    na, ma, sa = a
    nb, mb, sb = b
    n = na + nb
    delta = mb - ma
    return n, ma + delta * nb / n, sa + sb + delta * delta * na * nb / n


def _tree_merge(parts):
    parts = list(parts)
    while len(parts) > 1:
        nxt = [_merge(parts[i], parts[i + 1]) for i in range(0, len(parts) - 1, 2)]
        if len(parts) % 2:
            nxt.append(parts[-1])
        parts = nxt
    return parts[0]


def mc_estimate(
    sampler: Callable,
    statistic: Callable,
    n: int,
    seed: int,
    stream: int = 0,
    *,
    vectorized: bool = True,
    chunk_size: int = DEFAULT_CHUNK,
    threads: int = 1,
) -> McEstimate:
    """Sample mean and standard error of ``statistic`` over ``n`` draws.

    With ``vectorized=True`` (the default) ``sampler(rng, k)`` returns ``k``
    samples stacked along the first axis and ``statistic`` maps that stack to
    ``k`` real values. Otherwise ``sampler(rng)`` returns one sample and
    ``statistic`` one number.

    The standard error uses the unbiased variance (``ddof=1``).
    """
    if n < 2:
        raise ValueError(f"need at least 2 samples, got {n}")
    if chunk_size < 1:
        raise ValueError("chunk_size must be positive")
    sizes = [chunk_size] * (n // chunk_size)
    if n % chunk_size:
        sizes.append(n % chunk_size)

    def run(job):
        idx, k = job
        rng = make_rng(seed, stream, idx)
        if vectorized:
            vals = statistic(sampler(rng, k))
        else:
            vals = [statistic(sampler(rng)) for _ in range(k)]
        vals = np.asarray(vals, dtype=float).ravel()
        if vals.size != k:
            raise ValueError(f"statistic returned {vals.size} values for {k} samples")
        return _moments(vals)

    jobs = list(enumerate(sizes))
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, jobs))
    else:
        parts = [run(job) for job in jobs]
    total, mean, m2 = _tree_merge(parts)
    var = m2 / (total - 1)
    return McEstimate(mean=mean, stderr=float(np.sqrt(max(var, 0.0) / total)),
                      n_samples=total, seed=int(seed), stream=int(stream))
