import numpy as np
import pytest

from qudit_teleport.channel import teleport_channel
from qudit_teleport.fidelity import ent_fidelity_batch
from qudit_teleport.matrix import partial_trace
from qudit_teleport.resources import bell_resource
from qudit_teleport.sampling import (
    RngState,
    haar_pure,
    haar_unitary,
    hs_mixed,
    make_rng,
    mc_estimate,
    random_density,
)

N = 100_000

# 0.999 quantile of chi-square with 19 degrees of freedom
CHI2_19_999 = 43.82


def test_haar_unitary_is_unitary():
    u = haar_unitary(5, make_rng(1))
    assert np.max(np.abs(u.conj().T @ u - np.eye(5))) < 1e-12
    batch = haar_unitary(3, make_rng(1), size=50)
    eye = np.eye(3)
    assert np.max(np.abs(np.conj(np.swapaxes(batch, 1, 2)) @ batch - eye)) < 1e-12


def test_haar_unitary_first_moment(rng):
    d = 3
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    a = a + a.conj().T
    us = haar_unitary(d, make_rng(5), size=N)
    # <0|U A U^dagger|0> = v^dagger A v with v = U^dagger|0>
    col = us[:, 0, :].conj()
    vals = np.einsum("ni,ij,nj->n", col.conj(), a, col).real
    mean, se = vals.mean(), vals.std(ddof=1) / np.sqrt(N)
    assert abs(mean - np.trace(a).real / d) <= 4 * se


def test_haar_unitary_eigenphases_uniform():
    us = haar_unitary(8, make_rng(11), size=10_000)
    phases = np.angle(np.linalg.eigvals(us)) % (2 * np.pi)
    counts, _ = np.histogram(phases, bins=20, range=(0, 2 * np.pi))
    expected = phases.size / 20
    chi2 = np.sum((counts - expected) ** 2 / expected)
    assert chi2 < CHI2_19_999


def test_unrephased_qr_would_fail():
    # sanity of the eigenphase test itself: plain QR without phase fix is biased
    rng = make_rng(11)
    z = (rng.standard_normal((10_000, 8, 8)) + 1j * rng.standard_normal((10_000, 8, 8)))
    q, _ = np.linalg.qr(z)
    phases = np.angle(np.linalg.eigvals(q)) % (2 * np.pi)
    counts, _ = np.histogram(phases, bins=20, range=(0, 2 * np.pi))
    expected = phases.size / 20
    assert np.sum((counts - expected) ** 2 / expected) > CHI2_19_999


def test_haar_pure():
    psi = haar_pure(7, make_rng(2))
    assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-12)
    est = mc_estimate(lambda g, k: haar_pure(4, g, size=k), lambda b: np.abs(b[:, 0]) ** 2,
                      N, seed=3)
    assert est.agrees_with(1 / 4)
    ones = mc_estimate(lambda g, k: haar_pure(4, g, size=k),
                       lambda b: np.einsum("ni,ni->n", b.conj(), b).real, 1000, seed=3)
    assert ones.mean == pytest.approx(1.0, abs=1e-12)


def test_haar_pure_invariance():
    w = haar_unitary(3, make_rng(99))
    stat = lambda b: np.abs(b[:, 0]) ** 4 + np.abs(b[:, 1]) ** 2
    plain = mc_estimate(lambda g, k: haar_pure(3, g, size=k), stat, N, seed=10)
    rotated = mc_estimate(lambda g, k: haar_pure(3, g, size=k) @ w.T, stat, N, seed=11)
    combined = np.hypot(plain.stderr, rotated.stderr)
    assert abs(plain.mean - rotated.mean) <= 5 * combined


def test_hs_mixed():
    rho, phi = hs_mixed(3, RngState(4, 2), return_purification=True)
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)
    assert np.linalg.eigvalsh(rho).min() >= -1e-12
    np.testing.assert_array_equal(rho, hs_mixed(3, RngState(4, 2)))
    reduced = partial_trace(np.outer(phi, phi.conj()), 3, 3, "B")
    np.testing.assert_allclose(rho, reduced, atol=1e-15)


def _batch_purity(phis):
    m = phis.reshape(-1, 2, 2)
    rho = np.einsum("nas,nat->nst", m, m.conj())
    return np.einsum("nst,nts->n", rho, rho).real


def test_hs_purity_snapshot():
    # regression value for seed 2024; HS theory gives 2d/(d^2+1) = 0.8 for d=2
    est = mc_estimate(lambda g, k: haar_pure(4, g, size=k), _batch_purity, N, seed=2024)
    assert est.mean == pytest.approx(0.8001670389553308, abs=1e-12)
    assert est.stderr == pytest.approx(0.0004135156745127155, rel=1e-9)


def test_batch_purity_matches_hs_mixed():
    phis = np.stack([hs_mixed(2, RngState(3, i), return_purification=True)[1] for i in range(5)])
    expected = [np.trace(r @ r).real for r in (hs_mixed(2, RngState(3, i)) for i in range(5))]
    np.testing.assert_allclose(_batch_purity(phis), expected, atol=1e-14)


def test_rng_streams():
    a = make_rng(7, 0).standard_normal(5)
    b = make_rng(7, 0).standard_normal(5)
    c = make_rng(7, 1).standard_normal(5)
    np.testing.assert_array_equal(a, b)
    assert not np.allclose(a, c)
    np.testing.assert_array_equal(RngState(7, 1).generator().standard_normal(5), c)
    with pytest.raises(ValueError):
        make_rng(-1)


def test_mc_constant_statistic():
    est = mc_estimate(lambda g, k: g.standard_normal(k), lambda b: np.full(b.shape, 0.3),
                      10_000, seed=1)
    assert est.mean == 0.3 and est.stderr == 0.0


def test_mc_identity_channel_exact():
    ch = teleport_channel(bell_resource(2))
    est = mc_estimate(lambda g, k: haar_pure(4, g, size=k),
                      lambda b: ent_fidelity_batch(b, ch), 10_000, seed=1)
    assert est.mean == pytest.approx(1.0, abs=1e-12)
    assert est.stderr < 1e-12


def test_mc_needs_two_samples():
    with pytest.raises(ValueError):
        mc_estimate(lambda g, k: g.random(k), lambda b: b, 1, seed=0)


def test_mc_uniform_moments():
    est = mc_estimate(lambda g, k: g.random(k), lambda b: b, N, seed=8)
    assert est.agrees_with(0.5)
    # unbiased variance of U(0,1) is 1/12
    assert est.stderr == pytest.approx(np.sqrt(1 / 12 / N), rel=0.02)


def test_mc_matches_direct_numpy():
    # one chunk: must equal the plain numpy mean / ddof=1 stderr of the same draws
    est = mc_estimate(lambda g, k: g.random(k), lambda b: b ** 2, 1000, seed=4, chunk_size=1000)
    vals = make_rng(4, 0, 0).random(1000) ** 2
    assert est.mean == pytest.approx(vals.mean(), rel=1e-14)
    assert est.stderr == pytest.approx(vals.std(ddof=1) / np.sqrt(1000), rel=1e-12)


def test_mc_chunk_merge_matches_pooled():
    est = mc_estimate(lambda g, k: g.random(k), lambda b: b, 10_001, seed=4, chunk_size=333)
    pooled = np.concatenate([make_rng(4, 0, i).random(333 if i < 30 else 10_001 - 30 * 333)
                             for i in range(31)])
    assert est.mean == pytest.approx(pooled.mean(), rel=1e-13)
    assert est.stderr == pytest.approx(pooled.std(ddof=1) / np.sqrt(pooled.size), rel=1e-10)


def test_mc_reproducible_across_threads():
    args = (lambda g, k: haar_pure(9, g, size=k), lambda b: np.abs(b[:, 0]) ** 2, 50_000)
    one = mc_estimate(*args, seed=12, threads=1)
    many = mc_estimate(*args, seed=12, threads=4)
    again = mc_estimate(*args, seed=12, threads=3)
    assert one == many == again
    assert mc_estimate(*args, seed=13) != one


def test_mc_scalar_mode():
    est = mc_estimate(lambda g: haar_pure(2, g), lambda psi: abs(psi[0]) ** 2, 2000, seed=5,
                      vectorized=False)
    assert est.n_samples == 2000
    assert est.agrees_with(0.5)


def test_mc_stderr_scaling():
    args = (lambda g, k: haar_pure(3, g, size=k), lambda b: np.abs(b[:, 0]) ** 2)
    small = mc_estimate(*args, 20_000, seed=21)
    large = mc_estimate(*args, 40_000, seed=22)
    assert large.stderr / small.stderr == pytest.approx(1 / np.sqrt(2), rel=0.2)


def test_random_density_is_seeded():
    a = random_density(4, 7)
    np.testing.assert_array_equal(a, random_density(4, 7))
    assert np.trace(a).real == pytest.approx(1.0)
    assert np.linalg.eigvalsh(a).min() > 0
