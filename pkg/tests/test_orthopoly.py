import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from widomlab.measures import DensitySpec, discretize, normalize
from widomlab.orthopoly import minimality_check, monic_coefficients, poly_norm, recurrence
from widomlab.potential import equilibrium_measure
from widomlab.sets import make_interval_union, unit_circle
from widomlab.suite import random_atoms, random_density, random_set

MU_INT = normalize(equilibrium_measure(make_interval_union([(-1, 1)])))
MU_CIRC = normalize(equilibrium_measure(unit_circle()))
LEGENDRE = DensitySpec(math.pi / 2, ((-1.0, 0.5), (1.0, 0.5)))  # dx/2 relative to mu_[-1,1]


def test_chebyshev_first_kind_recurrence():
    res = recurrence(MU_INT, 40)
    assert np.allclose(res.a, 0, atol=1e-14)
    assert res.b[0] == pytest.approx(0.5, rel=1e-14)
    assert np.allclose(res.b[1:], 0.25, rtol=1e-13)
    assert np.allclose(np.exp(2 * np.asarray(res.widom_log[1:])), 2, rtol=1e-12)


def test_legendre_widom_factors():
    res = recurrence(normalize(MU_INT.base, LEGENDRE), 30)
    for n in range(1, 31):
        log_exact = (4 * n * math.log(2) + 4 * math.lgamma(n + 1) - 2 * math.lgamma(2 * n + 1)
                     - math.log(2 * n + 1))
        assert 2 * res.widom_log[n] == pytest.approx(log_exact, abs=1e-12)


def test_circle_equilibrium():
    res = recurrence(MU_CIRC, 64)
    assert np.allclose(res.widom, 1, atol=1e-13)
    assert np.allclose(np.abs(res.verblunsky), 0, atol=1e-14)


def test_circle_one_minus_cos():
    res = recurrence(normalize(MU_CIRC.base, DensitySpec(0.5, ((1.0, 2.0),))), 64)
    alphas = np.abs(np.asarray(res.verblunsky))
    assert np.allclose(alphas, 1 / (np.arange(64) + 2), rtol=1e-11)
    assert math.exp(res.log_norm_sq[64]) == pytest.approx(66 / 130, rel=1e-11)
    assert np.all(np.diff(res.log_norm_sq) <= 1e-15)


def test_circle_competitor_norm():
    # ||z^3 + 0.5||^2 = 1.25 for normalized arc length
    assert poly_norm(MU_CIRC, [0.5, 0, 0, 1]) ** 2 == pytest.approx(1.25, rel=1e-14)
    rep = minimality_check(MU_CIRC, 3, trials=50)
    assert rep.passed and rep.norm == pytest.approx(1.0, rel=1e-14)


def test_norms_match_monic_polynomials():
    E = equilibrium_measure(make_interval_union([(-2, -0.5), (0.3, 1.7)]))
    mu = normalize(E, DensitySpec(1.2, ((0.3, 0.7),), (0.1, 0.3)), [(2.5, 0.2)])
    res = recurrence(mu, 10)
    for n in range(11):
        q = monic_coefficients(mu, n, res)
        assert 2 * math.log(poly_norm(mu, q)) == pytest.approx(res.log_norm_sq[n], abs=1e-10)


def test_symmetric_measure_has_zero_a():
    E = equilibrium_measure(make_interval_union([(-3, -1), (1, 3)]))
    mu = normalize(E, DensitySpec(1.0, ((0.0, 2.0),), (0.0, 0.0, -0.3)), [(-0.5, 0.1), (0.5, 0.1)])
    res = recurrence(mu, 25)
    assert np.allclose(res.a, 0, atol=1e-12)


def test_complex_atoms_against_gram_determinants():
    mu = normalize(MU_INT.base, DensitySpec(), [(0.5j, 0.2), (1.5 + 0.3j, 0.1)])
    res = recurrence(mu, 6)
    assert res.kind == "complex"
    nodes, weights = discretize(mu, 20)
    z = np.asarray(nodes, complex)
    w = np.asarray(weights, float)
    V = np.vander(z, 8, increasing=True)
    G = (V.conj().T * w) @ V
    for n in range(1, 7):
        ratio = np.linalg.det(G[:n + 1, :n + 1]).real / np.linalg.det(G[:n, :n]).real
        assert res.log_norm_sq[n] == pytest.approx(math.log(ratio), abs=1e-8)
    assert minimality_check(mu, 5, trials=30).passed


def test_automatic_extended_precision():
    # N |log Cap| beyond the binary64 range triggers extended precision
    mu = normalize(equilibrium_measure(make_interval_union([(0, 1e-6)])))
    res = recurrence(mu, 50)
    assert res.precision is not None
    assert np.allclose(np.exp(2 * np.asarray(res.widom_log[1:])), 2, rtol=1e-12)
    assert res.log_norm_sq[50] < -1400


def test_bad_degree():
    with pytest.raises(ValueError):
        recurrence(MU_INT, 0)


@settings(max_examples=15)
@given(st.integers(0, 2**31 - 1))
def test_random_measures_minimal(seed):
    rng = np.random.default_rng(seed)
    K = random_set(rng)
    mu = normalize(equilibrium_measure(K), random_density(rng, K), random_atoms(rng, K))
    n = int(rng.integers(1, 8))
    rep = minimality_check(mu, n, trials=20, seed=seed)
    assert rep.passed, rep.min_margin
    res = recurrence(mu, 12)
    assert np.all(np.asarray(res.b) > 0)


@settings(max_examples=10)
@given(st.integers(0, 2**31 - 1))
def test_affine_maps_preserve_widom_factors(seed):
    rng = np.random.default_rng(seed)
    K = random_set(rng)
    alpha, beta = float(rng.choice([-1, 1]) * rng.uniform(0.2, 5)), float(rng.uniform(-5, 5))
    W = recurrence(normalize(equilibrium_measure(K)), 20).widom
    W2 = recurrence(normalize(equilibrium_measure(K.affine_image(alpha, beta))), 20).widom
    assert np.allclose(W2, W, rtol=1e-10)
