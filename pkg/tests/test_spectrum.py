import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import c1_params, c2_params
from qwalk3 import coins, linalg, spectrum
from qwalk3.errors import DomainError


def family_coin(p):
    return coins.build_c1(p) if isinstance(p, coins.C1Params) else coins.build_c2(p)


def test_evolution_at_k_zero_is_the_coin():
    C = coins.grover()
    assert np.array_equal(spectrum.evolution_at_k(C, 0.0), C.matrix)


def test_evolution_is_unitary_with_constant_determinant(rng):
    C = coins.random_unitary(rng)
    for k in (0.0, 1.0, 2.0):
        U = spectrum.evolution_at_k(C, k)
        assert linalg.is_unitary(U)
        assert abs(linalg.det3(U) - C.det) < 1e-14


def test_evolution_stack_matches_pointwise():
    k = np.array([-1.0, 0.5, 2.0])
    stack = spectrum.evolution_at_k(coins.dft3(), k)
    for i, ki in enumerate(k):
        assert np.allclose(stack[i], spectrum.evolution_at_k(coins.dft3(), ki))


def test_grover_at_pi_has_unit_eigenvalue():
    es = linalg.eigensystem(spectrum.evolution_at_k(coins.grover(), math.pi))
    assert np.min(np.abs(es.eigenvalues - 1)) < 1e-12


def test_grover_at_half_pi_dispersion():
    lam = linalg.eigenvalues(spectrum.evolution_at_k(coins.grover(), math.pi / 2))
    moving = lam[np.argsort(np.abs(lam - 1))[1:]]
    assert np.allclose(moving.real, -2 / 3, atol=1e-12)


def test_scan_requires_enough_samples():
    with pytest.raises(ValueError):
        spectrum.spectral_scan(coins.grover(), 32)


def test_grover_scan_one_constant_track():
    scan = spectrum.spectral_scan(coins.grover(), 256)
    assert scan.constant_tracks == (scan.constant_track_index,)
    assert np.max(np.abs(scan.tracks[scan.constant_track_index] - 1)) < 1e-10


def test_dft3_scan_no_constant_track():
    scan = spectrum.spectral_scan(coins.dft3(), 256)
    assert scan.constant_tracks == ()
    assert np.min(scan.deviations) > 1e-4


def test_branch1_scan_three_constant_tracks():
    C = coins.build_unitary(coins.CoinParams(theta13=math.pi / 2, gamma2=0.3))
    assert len(spectrum.spectral_scan(C, 256).constant_tracks) == 3


def test_tracks_are_continuous_and_unimodular():
    scan = spectrum.spectral_scan(coins.grover(), 256)
    assert np.max(np.abs(np.abs(scan.tracks) - 1)) < 1e-10
    steps = np.abs(np.angle(scan.tracks[:, 1:] / scan.tracks[:, :-1]))
    assert np.max(steps) < math.pi / 8


def test_omega_samples_are_conjugate_pair():
    scan = spectrum.spectral_scan(coins.grover(), 256)
    wa, wb = scan.omega_samples(reference=1.0)
    # omega = pi at k = 0 shows up as +pi on both branches
    assert np.max(np.abs(np.exp(1j * (wa + wb)) - 1)) < 1e-10


def test_dispersion_omega_examples():
    assert abs(spectrum.dispersion_omega(1 / 3, 2 / 3, math.pi, math.pi / 2) - math.acos(-2 / 3)) < 1e-12
    k = np.linspace(-3, 3, 7)
    assert np.allclose(spectrum.dispersion_omega(0.0, 0.4, 1.0, k), math.acos(-0.4))
    assert abs(spectrum.dispersion_omega(0.5, 0.2, 0.7, 0.7) - math.acos(0.3)) < 1e-15


def test_dispersion_omega_clamps_and_rejects():
    assert spectrum.dispersion_omega(0.5, -0.5 - 1e-13, 0.0, 0.0) == 0.0
    with pytest.raises(DomainError):
        spectrum.dispersion_omega(0.8, -0.5, 0.0, 0.0)


def test_verify_dispersion_examples():
    assert spectrum.verify_dispersion(coins.grover()) < 1e-8
    C = coins.build_c1(coins.C1Params(theta13=0.0, theta23=math.pi / 4))
    d = coins.extract_dispersion_params(C)
    assert abs(d.rho - math.sqrt(2) / 2) < 1e-12 and abs(d.mu - 0.25) < 1e-12
    assert spectrum.verify_dispersion(C) < 1e-8
    kappa = math.pi / 5
    C2 = coins.build_c2(coins.C2Params.from_kappa(kappa, math.pi / 2 - kappa, 0.0))
    assert abs(coins.extract_dispersion_params(C2).mu) < 1e-12
    assert spectrum.verify_dispersion(C2) < 1e-8


def test_verify_dispersion_rejects_no_point_spectrum():
    with pytest.raises(DomainError):
        spectrum.verify_dispersion(coins.dft3())


@settings(max_examples=25)
@given(st.one_of(c1_params(), c2_params()))
def test_family_scan_invariants(p):
    C = family_coin(p)
    cls = coins.classify_coin(C)
    scan = spectrum.spectral_scan(C, 256)
    d = coins.extract_dispersion_params(C, cls)
    n_const = len(scan.constant_tracks)
    assert n_const == (3 if d.rho == 0 else 1) or cls.coin_class is coins.CoinClass.DECOUPLED
    lam0 = C.det
    j = min(scan.constant_tracks, key=lambda i: np.max(np.abs(scan.tracks[i] - lam0)))
    assert np.max(np.abs(scan.tracks[j] - lam0)) < 1e-8
    if d.rho > 0:
        assert spectrum.verify_dispersion(C, scan, cls) < 1e-8


@settings(max_examples=25)
@given(st.one_of(c1_params(), c2_params()))
def test_moving_pair_product(p):
    # the two k-dependent eigenvalues multiply to det C / lambda0 = 1 for the family coins
    C = family_coin(p)
    k = np.linspace(-math.pi, math.pi, 64, endpoint=False)
    lam = linalg.eigenvalues(spectrum.evolution_at_k(C, k))
    lam0 = C.det
    near = np.argmin(np.abs(lam - lam0), axis=1)
    others = np.prod(lam, axis=1) / lam[np.arange(len(k)), near]
    assert np.max(np.abs(others - 1)) < 1e-10


@settings(max_examples=25)
@given(st.one_of(c1_params(), c2_params()))
def test_trace_and_minor_identities(p):
    # tr U(k) = lambda0 + 2cos w and sum of minors = lambda0 (1 + lambda0 2cos w)... written per coefficient
    C = family_coin(p)
    M = C.matrix
    lam0 = C.det
    k = np.linspace(-math.pi, math.pi, 64, endpoint=False)
    two_cos = spectrum.disp1_residual(C, k)
    assert np.max(np.abs(two_cos.imag)) < 1e-10
    d = coins.extract_dispersion_params(C)
    assert np.max(np.abs(two_cos.real - 2 * (d.rho * np.cos(k - d.gamma) - d.mu))) < 1e-10
    mL, mS, mR = linalg.principal_minors(M)
    lhs = 1 + lam0 * two_cos
    rhs = mL * np.exp(1j * k) + mS + mR * np.exp(-1j * k)
    assert np.max(np.abs(lhs - rhs)) < 1e-10
