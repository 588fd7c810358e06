"""The standard teleportation channel built from a bipartite resource state.

Two routes to the same map are provided:

* :class:`TeleportChannel` keeps only the Bell-overlap grid ``p[n, m]`` of the
  resource and applies ``rho -> sum p[n, m] U^{n,-m} rho U^{n,-m}^dagger``.
* :func:`simulate_protocol` runs measurement, classical feed-forward and
  correction literally on ``rho (x) chi`` (particle order 1, 3, 4) and is
  used as the oracle for the first route.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .matrix import (
    ValidationError,
    as_density,
    as_matrix,
    get_tolerances,
    partial_trace,
    projector,
)
from .weyl import bell_basis, weyl_indices, weyl_unitary

__all__ = [
    "TeleportChannel",
    "GeneralProtocol",
    "outcome_probs",
    "singlet_fraction",
    "teleport_channel",
    "apply_channel",
    "channel_kraus",
    "standard_protocol",
    "protocol_branches",
    "simulate_protocol",
    "fingerprint",
]

_PROB_CLAMP = 1e-12


def fingerprint(m) -> str:
    """Short content hash of a matrix, used to tag reports."""
    arr = np.ascontiguousarray(np.asarray(m, dtype=complex))
    h = hashlib.sha256()
    h.update(str(arr.shape).encode())
    h.update(arr.tobytes())
    return h.hexdigest()[:16]


def _resource(chi) -> tuple[np.ndarray, int]:
    chi = np.asarray(chi, dtype=complex)
    if chi.ndim != 2 or chi.shape[0] != chi.shape[1]:
        raise ValidationError(f"invalid resource state: shape {chi.shape}")
    d = int(round(np.sqrt(chi.shape[0])))
    if d * d != chi.shape[0] or d < 2:
        raise ValidationError(
            f"invalid resource state: dimension {chi.shape[0]} is not d^2 with d >= 2"
        )
    try:
        chi = as_density(chi, name="resource state")
    except ValidationError as exc:
        raise ValidationError(f"invalid resource state: {exc}") from exc
    return chi, d


def outcome_probs(chi) -> np.ndarray:
    """Grid ``p[n, m] = <Omega^{n,m}| chi |Omega^{n,m}>`` of shape ``(d, d)``."""
    chi, d = _resource(chi)
    basis = bell_basis(d).reshape(d * d, d * d)
    p = np.einsum("ki,ij,kj->k", basis.conj(), chi, basis).real
    return p.reshape(d, d)


def singlet_fraction(chi) -> float:
    """Overlap of ``chi`` with the maximally entangled state."""
    return float(outcome_probs(chi)[0, 0])


@dataclass(frozen=True)
class TeleportChannel:
    """Generalized depolarizing channel ``sum p[n,m] U^{n,-m} . U^{n,-m}^dagger``.

    ``probs`` is validated on construction: entries down to ``-1e-12`` are
    clamped to zero and the grid must sum to one.
    """

    d: int
    probs: np.ndarray
    resource_fingerprint: str = ""
    _ops: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        d = int(self.d)
        if d < 2:
            raise ValidationError(f"dimension must be >= 2, got {self.d}")
        p = np.array(self.probs, dtype=float)
        if p.shape != (d, d):
            raise ValidationError(f"probability grid must be ({d}, {d}), got {p.shape}")
        if np.any(p < -_PROB_CLAMP):
            raise ValidationError(f"negative outcome probability {p.min():.3e}")
        p = np.clip(p, 0.0, None)
        if abs(p.sum() - 1.0) > get_tolerances().trace:
            raise ValidationError(f"outcome probabilities sum to {p.sum()!r}")
        p.setflags(write=False)
        ops = np.stack([weyl_unitary(d, n, -m) for n, m in weyl_indices(d)])
        ops.setflags(write=False)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "_ops", ops)

    @classmethod
    def from_resource(cls, chi) -> "TeleportChannel":
        chi, _ = _resource(chi)
        return cls(d=int(round(np.sqrt(chi.shape[0]))), probs=outcome_probs(chi),
                   resource_fingerprint=fingerprint(chi))

    @property
    def singlet_fraction(self) -> float:
        return float(self.probs[0, 0])

    @property
    def unitaries(self) -> np.ndarray:
        """``U^{n,-m}`` stacked in row-major ``(n, m)`` order, shape ``(d*d, d, d)``."""
        return self._ops

    @property
    def weights(self) -> np.ndarray:
        return self.probs.ravel()

    def __call__(self, rho) -> np.ndarray:
        return apply_channel(self, rho)


def teleport_channel(chi) -> TeleportChannel:
    return TeleportChannel.from_resource(chi)


def apply_channel(ch: TeleportChannel, rho) -> np.ndarray:
    rho = as_matrix(rho, "input state")
    if rho.shape != (ch.d, ch.d):
        raise ValidationError(f"input has shape {rho.shape}, channel dimension is {ch.d}")
    ops = ch.unitaries
    out = np.einsum("k,kij,jl,kml->im", ch.weights, ops, rho, ops.conj())
    return (out + out.conj().T) / 2


def channel_kraus(ch: TeleportChannel) -> list[np.ndarray]:
    """Kraus operators ``sqrt(p[n,m]) U^{n,-m}`` in row-major ``(n, m)`` order."""
    return [np.sqrt(p) * u for p, u in zip(ch.weights, ch.unitaries)]


@dataclass(frozen=True)
class GeneralProtocol:
    """Measurement on particles (1, 3) followed by a unitary correction on 4."""

    d: int
    measurement_ops: Sequence[np.ndarray]
    corrections: Sequence[np.ndarray]

    def __post_init__(self):
        d = self.d
        tol = get_tolerances().herm
        ops = tuple(as_matrix(m, "measurement operator") for m in self.measurement_ops)
        cors = tuple(as_matrix(u, "correction") for u in self.corrections)
        if len(ops) != len(cors):
            raise ValidationError("need exactly one correction per measurement outcome")
        if any(m.shape != (d * d, d * d) for m in ops):
            raise ValidationError(f"measurement operators must be {d*d}x{d*d}")
        if any(u.shape != (d, d) for u in cors):
            raise ValidationError(f"corrections must be {d}x{d}")
        total = sum(m.conj().T @ m for m in ops)
        if np.max(np.abs(total - np.eye(d * d))) > tol:
            raise ValidationError("not a measurement: sum M^dagger M != I")
        for u in cors:
            if np.max(np.abs(u.conj().T @ u - np.eye(d))) > tol:
                raise ValidationError("correction is not unitary")
        object.__setattr__(self, "measurement_ops", ops)
        object.__setattr__(self, "corrections", cors)


def standard_protocol(d: int) -> GeneralProtocol:
    """Generalized Bell measurement with correction ``U^{n,m}`` on outcome ``(n, m)``.

    After outcome ``(n, m)`` with a perfect resource the receiver holds
    ``U^{n,m}^dagger |psi>``, so ``U^{n,m}`` undoes it.
    """
    basis = bell_basis(d)
    ops = [projector(basis[n, m]) for n, m in weyl_indices(d)]
    cors = [weyl_unitary(d, n, m) for n, m in weyl_indices(d)]
    return GeneralProtocol(d, ops, cors)


def protocol_branches(chi, rho, proto: GeneralProtocol) -> list[np.ndarray]:
    """Unnormalized receiver states ``Tr_13[(M_i (x) I) (rho (x) chi) (M_i (x) I)^dagger]``.

    Branch ``i`` has trace equal to the probability of outcome ``i``; the
    correction has not been applied yet.
    """
    d = proto.d
    chi = _resource(chi)[0]
    if chi.shape != (d * d, d * d):
        raise ValidationError(f"resource dimension {chi.shape[0]} does not match d={d}")
    rho = as_density(rho, d, name="input state")
    joint = np.kron(rho, chi)
    eye = np.eye(d)
    branches = []
    for m in proto.measurement_ops:
        k = np.kron(m, eye)
        branches.append(partial_trace(k @ joint @ k.conj().T, d * d, d, keep="B"))
    return branches


def simulate_protocol(chi, rho, proto: GeneralProtocol) -> np.ndarray:
    """Receiver's final state averaged over outcomes.

    Each branch is corrected while still unnormalized, which equals
    ``p_i * eps_i(rho_i)`` without dividing by a possibly vanishing ``p_i``.
    """
    out = np.zeros((proto.d, proto.d), dtype=complex)
    for branch, u in zip(protocol_branches(chi, rho, proto), proto.corrections):
        out += u @ branch @ u.conj().T
    return out
