import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from widomlab.chebyshev import RemezError, chebyshev_poly, m_factor, verify_alternation
from widomlab.potential import equilibrium_measure
from widomlab.sets import cantor_approximant, make_interval_union, unit_circle
from widomlab.suite import random_set

E_INT = equilibrium_measure(make_interval_union([(-1, 1)]))


def lp_sup_norm(K, n, per_band=4000):
    """min over monic degree-n q of max |q| on a fine grid, as a linear program."""
    x = np.concatenate([np.linspace(float(b.lo), float(b.hi), per_band) for b in K.bands])
    c0 = 0.5 * (x.min() + x.max())
    s = 0.5 * (x.max() - x.min())
    u = (x - c0) / s
    V = np.polynomial.chebyshev.chebvander(u, n)
    lead = V[:, n] / 2 ** (n - 1) if n else V[:, 0]  # monic T_n in u
    A = V[:, :n]
    ones = np.ones((len(u), 1))
    A_ub = np.vstack([np.hstack([A, -ones]), np.hstack([-A, -ones])])
    b_ub = np.concatenate([-lead, lead])
    cost = np.zeros(n + 1)
    cost[-1] = 1
    res = linprog(cost, A_ub=A_ub, b_ub=b_ub, bounds=[(None, None)] * (n + 1), method="highs",
                  options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10})
    return res.x[-1] * s**n


def test_interval_chebyshev_cubic():
    res = chebyshev_poly(E_INT, 3)
    assert np.allclose(res.coeffs, [0, -0.75, 0, 1], atol=1e-12)
    assert res.sup_norm == pytest.approx(0.25, rel=1e-12)
    assert verify_alternation(res)
    assert len(res.alternation_points) == 4


@pytest.mark.parametrize("n", [1, 5, 16, 40, 64])
def test_interval_m_factor_is_two(n):
    assert m_factor(E_INT, n) == pytest.approx(2, rel=1e-9)


def test_two_band_against_lp():
    K = make_interval_union([(-1, -0.5), (0.5, 1)])
    res = chebyshev_poly(equilibrium_measure(K), 2)
    assert np.allclose(res.coeffs, [-0.625, 0, 1], atol=1e-12)
    assert res.sup_norm == pytest.approx(0.375, rel=1e-12)
    assert res.sup_norm == pytest.approx(lp_sup_norm(K, 2), rel=1e-6)


@pytest.mark.parametrize("n", range(1, 9))
def test_cantor_stage_two(n):
    K = cantor_approximant(2)
    res = chebyshev_poly(equilibrium_measure(K), n)
    assert res.m_factor >= 1
    assert verify_alternation(res)
    assert res.sup_norm == pytest.approx(lp_sup_norm(K, n), rel=1e-6)


def test_levelled_error_nondecreasing():
    E = equilibrium_measure(make_interval_union([(-2, -1.2), (-0.4, 0.1), (0.9, 2.5)]))
    res = chebyshev_poly(E, 12)
    hist = np.asarray(res.levelled_history)
    assert np.all(np.diff(hist) >= -1e-12 * hist[-1])
    assert res.converged and verify_alternation(res)
    assert hist[-1] <= res.sup_norm / E.scale**12 * (1 + 1e-12)


def test_circle_gives_monomial():
    res = chebyshev_poly(equilibrium_measure(unit_circle()), 7)
    assert res.coeffs == (0.0,) * 7 + (1.0,)
    assert res.m_factor == 1.0
    assert verify_alternation(res)


def test_degree_cap():
    with pytest.raises(ValueError):
        chebyshev_poly(E_INT, 65)
    with pytest.raises(ValueError):
        chebyshev_poly(E_INT, 0)


def test_remez_error_carries_best():
    err = RemezError("stalled", best="partial")
    assert err.best == "partial"


@settings(max_examples=15)
@given(st.integers(0, 2**31 - 1), st.integers(1, 20))
def test_random_sets_m_factor_at_least_two(seed, n):
    # real sets satisfy M_n >= 2
    E = equilibrium_measure(random_set(np.random.default_rng(seed)))
    res = chebyshev_poly(E, n)
    assert res.m_factor >= 2 * (1 - 1e-9)
    assert verify_alternation(res)
