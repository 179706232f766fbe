import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate as sint, optimize

from widomlab.measures import integrate, normalize
from widomlab.potential import (EquilibriumError, band_measures, capacity, critical_points,
                                equilibrium_measure, green, log_capacity, pw_sum, rational_dependence,
                                to_dict)
from widomlab.sets import cantor_approximant, make_interval_union, unit_circle
from widomlab.suite import random_set

INTERVAL = make_interval_union([(-1, 1)])
SYMMETRIC = make_interval_union([(-1, -0.5), (0.5, 1)])
ASYMMETRIC = make_interval_union([(0, 1), (2, 4)])


def two_band_capacity(alpha, beta):
    # [-beta, -alpha] U [alpha, beta] is the preimage of an interval under x^2
    return math.sqrt(beta**2 - alpha**2) / 2


def test_interval_basics():
    E = equilibrium_measure(INTERVAL)
    assert E.capacity == pytest.approx(0.5, rel=1e-14)
    assert E.robin_constant == pytest.approx(math.log(2), rel=1e-14)
    assert E.gap_zeros == ()
    assert band_measures(E) == pytest.approx([1.0], abs=1e-14)
    x = np.linspace(-0.99, 0.99, 7)
    assert E.density(x) == pytest.approx(1 / (math.pi * np.sqrt(1 - x**2)), rel=1e-13)


def test_circle_basics():
    C = equilibrium_measure(unit_circle())
    assert C.capacity == 1.0
    assert green(C, 2.0).value == pytest.approx(math.log(2), rel=1e-14)
    assert pw_sum(C) == 0


def test_symmetric_two_bands():
    E = equilibrium_measure(SYMMETRIC)
    assert E.gap_zeros == pytest.approx([0.0], abs=1e-14)
    assert band_measures(E) == pytest.approx([0.5, 0.5], abs=1e-13)
    assert E.capacity == pytest.approx(two_band_capacity(0.5, 1), rel=1e-13)
    assert critical_points(E) == pytest.approx([0.0], abs=1e-12)
    assert pw_sum(E) == pytest.approx(0.5 * math.log(3), rel=1e-12)


def test_asymmetric_gap_zero_matches_weighted_quadrature():
    E = equilibrium_measure(ASYMMETRIC)
    # zero of the monic linear Q: int (t - z) / sqrt|R| over the gap vanishes
    smooth = lambda t: 1 / math.sqrt(t * (4 - t))
    w0 = sint.quad(smooth, 1, 2, weight="alg", wvar=(-0.5, -0.5), epsabs=0, epsrel=1e-13)[0]
    w1 = sint.quad(lambda t: t * smooth(t), 1, 2, weight="alg", wvar=(-0.5, -0.5), epsabs=0,
                   epsrel=1e-13)[0]
    assert E.gap_zeros[0] == pytest.approx(w1 / w0, abs=1e-12)
    masses = band_measures(E)
    assert sum(masses) == pytest.approx(1, abs=1e-12)
    assert abs(masses[0] - masses[1]) > 0.1


def test_critical_point_maximizes_green_on_gap():
    E = equilibrium_measure(ASYMMETRIC)
    (c,) = critical_points(E)
    assert 1 < c < 2
    grid = np.linspace(1, 2, 100001)
    g = green(E, grid)
    assert abs(grid[np.argmax(g)] - c) < 2e-5
    res = optimize.minimize_scalar(lambda x: -float(green(E, x).value), bounds=(1, 2), method="bounded",
                                   options={"xatol": 1e-12})
    assert res.x == pytest.approx(c, abs=1e-7)
    assert c == pytest.approx(E.gap_zeros[0], abs=1e-10)


def test_green_closed_form_and_asymptotics():
    E = equilibrium_measure(INTERVAL)
    assert green(E, 2.0).value == pytest.approx(math.log(2 + math.sqrt(3)), rel=1e-14)
    z = 0.3 + 0.7j
    assert green(E, z).value == pytest.approx(math.log(abs(z + np.sqrt(z * z - 1 + 0j))), rel=1e-13)
    assert green(E, 1e6).value == pytest.approx(math.log(1e6) + math.log(2), abs=1e-6)


@pytest.mark.parametrize("K", [INTERVAL, SYMMETRIC, ASYMMETRIC, cantor_approximant(3)])
def test_green_vanishes_on_bands(K):
    E = equilibrium_measure(K)
    mids = [float(b.lo + b.hi) / 2 for b in K.bands]
    assert all(green(E, x).value == 0 for x in mids)


@pytest.mark.parametrize("K", [SYMMETRIC, ASYMMETRIC, cantor_approximant(2)])
def test_green_is_harmonic_off_K(K):
    E = equilibrium_measure(K)
    rng = np.random.default_rng(3)
    lo, hi = (float(v) for v in K.hull)
    pts = rng.uniform(lo - 1, hi + 1, 20) + 1j * rng.choice([-1, 1], 20) * rng.uniform(0.2, 1, 20)
    # the stencil's O(h^2) truncation error grows near K, so points keep distance 0.2
    h = 1e-3
    lap = (green(E, pts + h) + green(E, pts - h) + green(E, pts + 1j * h) + green(E, pts - 1j * h)
           - 4 * green(E, pts)) / h**2
    assert np.max(np.abs(lap)) <= 1e-4


def test_capacity_by_independent_quadrature():
    # log Cap = int log|x0 - t| d mu_K(t) at a point of K, integrated by the measure module
    E = equilibrium_measure(ASYMMETRIC)
    mu = normalize(E)
    x0 = 0.5
    val = integrate(mu, lambda t: np.log(np.abs(t - x0)), singular_points=[x0])
    assert val == pytest.approx(E.log_capacity, abs=1e-12)


def test_band_masses_reflection_symmetry():
    E = equilibrium_measure(make_interval_union([(0, 1), (2, 3)]))
    assert band_measures(E) == pytest.approx([0.5, 0.5], abs=1e-13)


def test_first_cantor_stage_closed_form():
    E = equilibrium_measure(cantor_approximant(1))
    assert 0 < E.capacity < 0.25
    assert E.capacity == pytest.approx(math.sqrt(2) / 6, rel=1e-13)
    assert pw_sum(E) == pytest.approx(math.log(2) / 2, rel=1e-12)


def test_first_cantor_stage_at_fifty_digits():
    E = equilibrium_measure(cantor_approximant(1), 50)
    ctx = mpmath.mp.clone() if hasattr(mpmath.mp, "clone") else mpmath.mp
    with mpmath.workdps(60):
        want_cap = mpmath.log(mpmath.sqrt(2) / 6)
        want_pw = mpmath.log(2) / 2
        assert abs(log_capacity(E, exact=True) - want_cap) < mpmath.mpf(10) ** -45
        assert abs(pw_sum(E, exact=True) - want_pw) < mpmath.mpf(10) ** -40
    assert E.precision == 50 and ctx is not None


def test_cantor_monotone_in_float():
    caps, pws = [], []
    for m in range(1, 6):
        E = equilibrium_measure(cantor_approximant(m))
        caps.append(E.capacity)
        pws.append(pw_sum(E))
    assert all(b < a for a, b in zip(caps, caps[1:]))
    assert all(b > a for a, b in zip(pws, pws[1:]))


def test_capacity_monotone_under_inclusion():
    small = make_interval_union([(0, 1), (2, 3)])
    big = make_interval_union([(0, 1.5), (2, 3)])
    assert capacity(small) <= capacity(big) <= capacity(make_interval_union([(0, 3)]))


def test_rational_dependence():
    assert not rational_dependence(equilibrium_measure(INTERVAL)).found
    rep = rational_dependence(equilibrium_measure(SYMMETRIC))
    assert rep.found and rep.witness == (1, 2)
    assert not rational_dependence(equilibrium_measure(ASYMMETRIC), height_bound=50).found
    with pytest.raises(ValueError):
        rational_dependence(equilibrium_measure(SYMMETRIC), height_bound=1000)


def test_json_summary():
    d = to_dict(equilibrium_measure(ASYMMETRIC))
    assert set(d) >= {"capacity", "robin_constant", "gap_zeros", "band_masses", "quadrature_orders"}


@given(st.integers(0, 2**31 - 1))
def test_random_set_invariants(seed):
    K = random_set(np.random.default_rng(seed))
    E = equilibrium_measure(K)
    masses = band_measures(E)
    assert sum(masses) == pytest.approx(1, abs=1e-12)
    assert all(m > 0 for m in masses)
    for z, (a, b) in zip(E.gap_zeros, K.gaps):
        assert a < z < b
    lo, hi = (float(v) for v in K.hull)
    longest = max(float(b.length) for b in K.bands)
    assert longest / 4 * (1 - 1e-12) <= E.capacity <= (hi - lo) / 4 * (1 + 1e-12)
    # Frostman: the potential is at least log Cap everywhere
    rng = np.random.default_rng(seed)
    R = 2 * K.diameter
    tau = rng.uniform(-R, R, 100) + (lo + hi) / 2
    assert np.min(green(E, tau)) >= -1e-8
    # equilibrium density is nonnegative on the bands
    x = np.concatenate([np.linspace(float(b.lo), float(b.hi), 50)[1:-1] for b in K.bands])
    assert np.all(E.density(x) >= 0)
