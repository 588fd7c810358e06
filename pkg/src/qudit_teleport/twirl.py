"""Numerical checks of the twirling argument behind the average entanglement fidelity.

``lambda_nm(phi) = |<phi| I (x) U^{n,-m} |phi>|^2`` is written as an
expectation of ``mu_nm = I (x) U^{n,-m} (x) I (x) U^{n,-m}^dagger`` on two
copies of ``phi``. Averaging ``V (x) V`` conjugation over Haar ``V`` on the
``d^2``-dimensional space leaves only identity and swap components, whose
weights ``alpha`` and ``beta`` follow from ``Tr(mu)`` and ``Tr(mu F)`` with
``F`` the exchange of the two ``d^2``-dimensional copies.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import TeleportChannel
from .fidelity import avg_ent_fidelity_closed
from .matrix import swap_operator
from .sampling import DEFAULT_CHUNK, McEstimate, haar_pure, make_rng, mc_estimate
from .weyl import weyl_indices, weyl_unitary

__all__ = [
    "MU_MAX_DIM",
    "TwirlCoefficients",
    "TraceIdentityReport",
    "mu_nm",
    "alpha_beta",
    "alpha_beta_explicit",
    "assemble_average",
    "check_closed_form",
    "lambda_nm",
    "twirl_integral_mc",
    "verify_trace_identities",
]

MU_MAX_DIM = 4


@dataclass(frozen=True)
class TwirlCoefficients:
    d: int
    n: int
    m: int
    alpha: float
    beta: float

    @property
    def total(self) -> float:
        return self.alpha + self.beta


def mu_nm(d: int, n: int, m: int) -> np.ndarray:
    """``I (x) U^{n,-m} (x) I (x) U^{n,-m}^dagger``, a ``d^4 x d^4`` unitary."""
    if d > MU_MAX_DIM:
        raise ValueError(f"d too large for mu construction (d={d}, max {MU_MAX_DIM})")
    u = weyl_unitary(d, n, -m)
    eye = np.eye(d)
    return np.kron(np.kron(eye, u), np.kron(eye, u.conj().T))


def _coefficients(d: int, tr_mu: complex, tr_mu_swap: complex) -> tuple[float, float]:
    d2, d4 = d * d, d ** 4
    alpha = tr_mu / (d4 - 1) - tr_mu_swap / (d2 * (d4 - 1))
    beta = tr_mu_swap / (d4 - 1) - tr_mu / (d2 * (d4 - 1))
    return alpha, beta


def alpha_beta(d: int, n: int, m: int) -> TwirlCoefficients:
    """Identity/swap weights from the closed-form traces.

    ``Tr(mu_nm) = d^4 [n = m = 0]`` and ``Tr(mu_nm F) = d^2``.
    """
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    delta = 1.0 if (n % d, m % d) == (0, 0) else 0.0
    alpha, beta = _coefficients(d, d ** 4 * delta, float(d * d))
    return TwirlCoefficients(d, n % d, m % d, float(alpha), float(beta))


def alpha_beta_explicit(d: int, n: int, m: int) -> TwirlCoefficients:
    """Same weights, from traces of the explicit ``d^4``-dimensional matrices."""
    mu = mu_nm(d, n, m)
    swap = swap_operator(d * d)
    alpha, beta = _coefficients(d, np.trace(mu), np.trace(mu @ swap))
    if max(abs(np.imag(alpha)), abs(np.imag(beta))) > 1e-12:
        raise ArithmeticError("twirl coefficients came out complex")
    return TwirlCoefficients(d, n % d, m % d, float(np.real(alpha)), float(np.real(beta)))


def assemble_average(probs) -> float:
    """``sum p[n,m] (alpha_nm + beta_nm)`` for a ``d x d`` probability grid."""
    probs = np.asarray(probs, dtype=float)
    d = probs.shape[0]
    return float(sum(probs[n, m] * alpha_beta(d, n, m).total for n, m in weyl_indices(d)))


def lambda_nm(phis, d: int, n: int, m: int) -> np.ndarray:
    """``|<phi| I (x) U^{n,-m} |phi>|^2`` for a state or a stack of states."""
    phis = np.asarray(phis, dtype=complex)
    mat = phis.reshape(phis.shape[:-1] + (d, d))
    u = weyl_unitary(d, n, -m)
    amp = np.einsum("...as,st,...at->...", mat.conj(), u, mat)
    return amp.real ** 2 + amp.imag ** 2


def twirl_integral_mc(d: int, n: int, m: int, n_samples: int, seed: int,
                      stream: int = 0, *, threads: int = 1,
                      chunk_size: int = DEFAULT_CHUNK) -> McEstimate:
    """Monte Carlo average of ``lambda_nm`` over Haar states on ``C^d (x) C^d``."""
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    if (n % d, m % d) == (0, 0):
        # lambda_00 = <phi|phi>^2 is identically one
        statistic = lambda batch: np.ones(batch.shape[0])
    else:
        statistic = lambda batch: lambda_nm(batch, d, n, m)
    return mc_estimate(lambda rng, k: haar_pure(d * d, rng, size=k), statistic,
                       n_samples, seed, stream, threads=threads, chunk_size=chunk_size)


@dataclass
class TraceIdentityReport:
    d: int
    weyl_trace_max_dev: float
    swap_trace_max_dev: float
    n_random_pairs: int
    tol: float = 1e-10

    @property
    def max_deviation(self) -> float:
        return max(self.weyl_trace_max_dev, self.swap_trace_max_dev)

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tol

    def as_dict(self) -> dict:
        return {
            "d": self.d,
            "weyl_trace_max_dev": self.weyl_trace_max_dev,
            "swap_trace_max_dev": self.swap_trace_max_dev,
            "n_random_pairs": self.n_random_pairs,
            "tol": self.tol,
            "max_deviation": self.max_deviation,
            "pass": self.passed,
        }


def verify_trace_identities(d: int, seed: int = 0, n_pairs: int = 10,
                            tol: float = 1e-10) -> TraceIdentityReport:
    """Check ``Tr U^{n,m} = d [n = m = 0]`` and ``Tr((A (x) B) F) = Tr(AB)``.

    The second identity is tested on ``n_pairs`` random complex ``d x d``
    pairs drawn from ``seed``; deviations are relative to ``max(1, |Tr(AB)|)``.
    """
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    weyl_dev = 0.0
    for n, m in weyl_indices(d):
        expected = d if (n, m) == (0, 0) else 0.0
        weyl_dev = max(weyl_dev, abs(np.trace(weyl_unitary(d, n, m)) - expected))
    rng = make_rng(seed)
    swap = swap_operator(d)
    swap_dev = 0.0
    for _ in range(n_pairs):
        a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        b = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        lhs = np.trace(np.kron(a, b) @ swap)
        rhs = np.trace(a @ b)
        swap_dev = max(swap_dev, abs(lhs - rhs) / max(1.0, abs(rhs)))
    return TraceIdentityReport(d, float(weyl_dev), float(swap_dev), n_pairs, tol)


def check_closed_form(ch: TeleportChannel) -> float:
    """Difference between the assembled twirl average and the closed form."""
    return assemble_average(ch.probs) - avg_ent_fidelity_closed(ch.singlet_fraction, ch.d)
