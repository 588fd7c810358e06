import numpy as np
import pytest

from qudit_teleport.channel import apply_channel, teleport_channel
from qudit_teleport.fidelity import (
    avg_ent_fidelity_closed,
    avg_fidelity_closed,
    channel_fidelity_batch,
    ent_fidelity_batch,
    ent_fidelity_lambda,
    entanglement_fidelity,
    lambda_overlaps,
    pure_fidelity,
    purify,
    uhlmann_fidelity,
)
from qudit_teleport.matrix import ValidationError, partial_trace
from qudit_teleport.resources import bell_resource, isotropic, maximally_mixed

from conftest import rand_density, rand_pure, rand_unitary


def test_uhlmann_basic(rng):
    rho = rand_density(rng, 3)
    assert uhlmann_fidelity(rho, rho) == pytest.approx(1.0, abs=1e-10)
    assert uhlmann_fidelity(np.diag([1.0, 0]), np.diag([0, 1.0])) == pytest.approx(0.0, abs=1e-14)
    assert uhlmann_fidelity(np.diag([1.0, 0]), np.eye(2) / 2) == pytest.approx(0.5, abs=1e-14)


def test_uhlmann_qubit_formula(rng):
    # for qubits F = Tr(rho sigma) + 2 sqrt(det rho det sigma)
    for _ in range(20):
        rho, sigma = rand_density(rng, 2), rand_density(rng, 2)
        expected = np.trace(rho @ sigma).real + 2 * np.sqrt(
            np.linalg.det(rho).real * np.linalg.det(sigma).real)
        assert uhlmann_fidelity(rho, sigma) == pytest.approx(expected, abs=1e-10)


def test_uhlmann_symmetric(rng):
    for _ in range(10):
        rho, sigma = rand_density(rng, 3), rand_density(rng, 3, rank=2)
        assert abs(uhlmann_fidelity(rho, sigma) - uhlmann_fidelity(sigma, rho)) < 1e-8


def test_uhlmann_dim_mismatch():
    with pytest.raises(ValidationError):
        uhlmann_fidelity(np.eye(2) / 2, np.eye(3) / 3)


def test_pure_fidelity(rng):
    psi = rand_pure(rng, 3)
    assert pure_fidelity(psi, np.outer(psi, psi.conj())) == pytest.approx(1.0, abs=1e-14)
    assert pure_fidelity([1, 0, 0, 0], np.eye(4) / 4) == pytest.approx(0.25)
    for _ in range(10):
        psi, sigma = rand_pure(rng, 3), rand_density(rng, 3)
        assert abs(pure_fidelity(psi, sigma)
                   - uhlmann_fidelity(np.outer(psi, psi.conj()), sigma)) < 1e-8


@pytest.mark.parametrize("d", [2, 3, 4])
def test_purify_roundtrip(rng, d):
    for rank in range(1, d + 1):
        rho = rand_density(rng, d, rank)
        phi = purify(rho)
        assert np.linalg.norm(phi) == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(partial_trace(np.outer(phi, phi.conj()), d, d, "B"), rho,
                                   atol=1e-10)


def test_purify_special_cases(rng):
    psi = rand_pure(rng, 3)
    phi = purify(np.outer(psi, psi.conj()))
    schmidt = np.linalg.svd(phi.reshape(3, 3), compute_uv=False)
    np.testing.assert_allclose(schmidt, [1, 0, 0], atol=1e-12)
    schmidt = np.linalg.svd(purify(np.eye(3) / 3).reshape(3, 3), compute_uv=False)
    np.testing.assert_allclose(schmidt, np.full(3, 1 / np.sqrt(3)), atol=1e-12)


def test_ent_fidelity_perfect(rng):
    ch = teleport_channel(bell_resource(3))
    assert entanglement_fidelity(rand_density(rng, 3), ch) == pytest.approx(1.0, abs=1e-12)


def test_ent_fidelity_pure_input_collapse(rng):
    for d in (2, 3):
        ch = teleport_channel(rand_density(rng, d * d))
        psi = rand_pure(rng, d)
        rho = np.outer(psi, psi.conj())
        f_e = entanglement_fidelity(rho, ch)
        assert f_e == pytest.approx(pure_fidelity(psi, apply_channel(ch, rho)), abs=1e-10)


@pytest.mark.parametrize("d", [2, 3])
def test_two_paths_agree(rng, d):
    for _ in range(100):
        ch = teleport_channel(rand_density(rng, d * d))
        rho = rand_density(rng, d)
        phi = purify(rho)
        assert abs(entanglement_fidelity(rho, ch) - ent_fidelity_lambda(phi, ch)) < 1e-10
        # arbitrary bipartite state: reduce first, then purify canonically
        phi = rand_pure(rng, d * d)
        rho = partial_trace(np.outer(phi, phi.conj()), d, d, "B")
        assert abs(ent_fidelity_lambda(phi, ch) - entanglement_fidelity(rho, ch)) < 1e-10


def test_purification_independence(rng):
    d = 3
    for _ in range(20):
        ch = teleport_channel(rand_density(rng, d * d))
        rho = rand_density(rng, d)
        rotated = np.kron(rand_unitary(rng, d), np.eye(d)) @ purify(rho)
        a = entanglement_fidelity(rho, ch)
        b = entanglement_fidelity(rho, ch, purification=rotated)
        assert abs(a - b) < 1e-10


def test_lambda_examples():
    ch = teleport_channel(maximally_mixed(3))
    omega = purify(np.eye(3) / 3)
    lam = lambda_overlaps(omega, ch)
    assert lam[0] == pytest.approx(1.0, abs=1e-14)
    np.testing.assert_allclose(lam[1:], 0.0, atol=1e-14)
    assert ent_fidelity_lambda(omega, ch) == pytest.approx(1 / 9, abs=1e-14)


def test_lambda_dim_check():
    ch = teleport_channel(bell_resource(2))
    with pytest.raises(ValidationError):
        ent_fidelity_lambda(np.ones(9) / 3, ch)


def test_ent_fidelity_below_fidelity(rng):
    for d in (2, 3):
        for _ in range(30):
            ch = teleport_channel(rand_density(rng, d * d))
            rho = rand_density(rng, d)
            assert (entanglement_fidelity(rho, ch)
                    <= uhlmann_fidelity(rho, apply_channel(ch, rho)) + 1e-10)


def test_batches_match_scalar(rng):
    ch = teleport_channel(rand_density(rng, 9))
    phis = np.stack([rand_pure(rng, 9) for _ in range(5)])
    np.testing.assert_allclose(ent_fidelity_batch(phis, ch),
                               [ent_fidelity_lambda(p, ch) for p in phis], atol=1e-14)
    psis = np.stack([rand_pure(rng, 3) for _ in range(5)])
    expected = [pure_fidelity(p, apply_channel(ch, np.outer(p, p.conj()))) for p in psis]
    np.testing.assert_allclose(channel_fidelity_batch(psis, ch), expected, atol=1e-13)


def test_closed_forms():
    for d in (2, 3, 5):
        assert avg_fidelity_closed(1.0, d) == pytest.approx(1.0)
        assert avg_ent_fidelity_closed(1.0, d) == pytest.approx(1.0)
        assert avg_ent_fidelity_closed(1 / d**2, d) == pytest.approx(2 / (d**2 + 1))
    assert avg_fidelity_closed(0.25, 2) == pytest.approx(0.5)
    assert avg_fidelity_closed(0.5 + 0.5 / 9, 3) == pytest.approx(2 / 3)
    assert avg_ent_fidelity_closed(0.25, 2) == pytest.approx(0.4)
    assert avg_ent_fidelity_closed(0.625, 2) == pytest.approx(0.7)
    with pytest.raises(ValueError):
        avg_fidelity_closed(1.5, 2)
    with pytest.raises(ValueError):
        avg_ent_fidelity_closed(-0.1, 2)


def test_closed_forms_affine():
    for closed in (avg_fidelity_closed, avg_ent_fidelity_closed):
        vals = [closed(f, 3) for f in (0.0, 0.5, 1.0)]
        assert vals[1] == pytest.approx((vals[0] + vals[2]) / 2)


def test_isotropic_spot_value():
    f = teleport_channel(isotropic(3, 0.5)).singlet_fraction
    assert avg_ent_fidelity_closed(f, 3) == pytest.approx(0.6, abs=1e-12)
