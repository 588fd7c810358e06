"""Fidelity measures for the teleportation channel.

Bipartite states are ordered (reference, system): the channel acts on the
second factor, as in ``(I (x) eps)(|phi><phi|)``.
"""
from __future__ import annotations

import numpy as np

from .channel import TeleportChannel
from .matrix import ValidationError, as_density, as_pure, hermitian_sqrt, kron, psd_eigh

__all__ = [
    "uhlmann_fidelity",
    "pure_fidelity",
    "purify",
    "entanglement_fidelity",
    "lambda_overlaps",
    "ent_fidelity_lambda",
    "ent_fidelity_batch",
    "channel_fidelity_batch",
    "avg_fidelity_closed",
    "avg_ent_fidelity_closed",
]


def uhlmann_fidelity(rho, sigma) -> float:
    """``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))**2``, clipped to ``[0, 1]``."""
    rho = as_density(rho)
    sigma = as_density(sigma, rho.shape[0])
    s = hermitian_sqrt(rho)
    w, _ = psd_eigh(s @ sigma @ s)
    f = float(np.sum(np.sqrt(w))) ** 2
    return min(max(f, 0.0), 1.0)


def pure_fidelity(psi, sigma) -> float:
    psi = as_pure(psi)
    sigma = as_density(sigma, psi.size)
    return float(np.real(psi.conj() @ sigma @ psi))


def purify(rho) -> np.ndarray:
    """Canonical purification ``sum_i sqrt(l_i) |i>_ref (x) |e_i>`` of ``rho``.

    Eigenvalues are taken in descending order and the reference system always
    has the same dimension as ``rho``. Tracing out the first factor gives back
    ``rho``.
    """
    w, v = psd_eigh(as_density(rho))
    w, v = w[::-1], v[:, ::-1]
    amps = np.sqrt(w)
    return (amps[:, None] * v.T).ravel()


def _split(phi, d: int) -> np.ndarray:
    phi = np.asarray(phi, dtype=complex)
    if phi.shape[-1] != d * d:
        raise ValidationError(
            f"bipartite state has dimension {phi.shape[-1]}, expected {d}^2 = {d * d}"
        )
    return phi.reshape(phi.shape[:-1] + (d, d))


def entanglement_fidelity(rho, ch: TeleportChannel, purification=None) -> float:
    """``<phi| (I (x) eps)(|phi><phi|) |phi>`` with ``phi`` purifying ``rho``.

    Evaluated by building the full ``d^2 x d^2`` output state. Any purification
    with the reference first may be passed in; by default :func:`purify` is used.
    """
    rho = as_density(rho)
    d = ch.d
    if rho.shape[0] != d:
        raise ValidationError(f"input has dimension {rho.shape[0]}, channel dimension is {d}")
    phi = purify(rho) if purification is None else as_pure(purification, d * d)
    proj = np.outer(phi, phi.conj())
    eye = np.eye(d)
    out = np.zeros_like(proj)
    for p, u in zip(ch.weights, ch.unitaries):
        k = kron(eye, u)
        out += p * (k @ proj @ k.conj().T)
    return float(np.real(phi.conj() @ out @ phi))


def lambda_overlaps(phi, ch: TeleportChannel) -> np.ndarray:
    """``|<phi| I (x) U^{n,-m} |phi>|**2`` for every outcome, shape ``(..., d*d)``.

    Accepts a single state or a stack of states along the leading axes.
    """
    mat = _split(phi, ch.d)
    amp = np.einsum("...as,kst,...at->...k", mat.conj(), ch.unitaries, mat)
    return amp.real ** 2 + amp.imag ** 2


def ent_fidelity_lambda(phi, ch: TeleportChannel) -> float:
    """Entanglement fidelity as ``sum p[n,m] lambda_nm(phi)``; no ``d^4`` matrices."""
    phi = as_pure(phi, ch.d * ch.d)
    return float(lambda_overlaps(phi, ch) @ ch.weights)


def ent_fidelity_batch(phis, ch: TeleportChannel) -> np.ndarray:
    """Vectorized :func:`ent_fidelity_lambda` over rows of ``phis``."""
    return lambda_overlaps(phis, ch) @ ch.weights


def channel_fidelity_batch(psis, ch: TeleportChannel) -> np.ndarray:
    """``<psi| eps(|psi><psi|) |psi>`` for each row of ``psis``."""
    psis = np.asarray(psis, dtype=complex)
    amp = np.einsum("...i,kij,...j->...k", psis.conj(), ch.unitaries, psis)
    return (amp.real ** 2 + amp.imag ** 2) @ ch.weights


def _check_fraction(f: float, d: int) -> None:
    if not (-1e-12 <= f <= 1 + 1e-12):
        raise ValueError(f"singlet fraction must lie in [0, 1], got {f!r}")
    if int(d) != d or d < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {d!r}")


def avg_fidelity_closed(f: float, d: int) -> float:
    """Average over pure inputs of ``<psi|eps(psi)|psi>``: ``(d f + 1) / (d + 1)``."""
    _check_fraction(f, d)
    return d * f / (d + 1) + 1 / (d + 1)


def avg_ent_fidelity_closed(f: float, d: int) -> float:
    """Average entanglement fidelity: ``(d^2 f + 1) / (d^2 + 1)``."""
    _check_fraction(f, d)
    d2 = d * d
    return d2 * f / (d2 + 1) + 1 / (d2 + 1)
