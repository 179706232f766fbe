import math

import numpy as np
import pytest
from scipy import special

from widomlab.measures import DensitySpec, normalize
from widomlab.potential import equilibrium_measure
from widomlab.sets import make_interval_union, unit_circle
from widomlab.szego import (cantor_csv, cantor_lebesgue_density, cantor_study, circle_szego_limit,
                            verify_lower_bound, widom_condition_report, widom_interval_limit)


def test_bound_for_equilibrium_measures():
    rep = verify_lower_bound(normalize(equilibrium_measure(make_interval_union([(-2, -1), (0, 3)]))), 30)
    assert rep.M == pytest.approx(0, abs=1e-14)
    assert rep.verdict and rep.min_Wn_sq >= 1
    circ = verify_lower_bound(normalize(equilibrium_measure(unit_circle())), 30)
    assert circ.min_Wn_sq == pytest.approx(1, abs=1e-13) and circ.verdict


def test_bound_for_abs_density():
    E = equilibrium_measure(make_interval_union([(-1, 1)]))
    rep = verify_lower_bound(normalize(E, DensitySpec(math.pi / 2, ((0.0, 1.0),))), 30)
    assert rep.M == pytest.approx(math.log(math.pi / 4), rel=1e-13)
    assert rep.verdict
    assert rep.n_range == 30 and 1 <= rep.argmin_n <= 30


def test_bound_rejects_divergent_integral():
    E = equilibrium_measure(make_interval_union([(-1, 1)]))
    with pytest.raises(ValueError):
        verify_lower_bound(normalize(E, DensitySpec(0.0), [(2.0, 1.0)]), 10)


def test_circle_limits():
    flat = circle_szego_limit(DensitySpec(), 16)
    assert flat.target == pytest.approx(1) and np.allclose(flat.tail_values, 1, atol=1e-14)
    rep = circle_szego_limit(DensitySpec(0.5, ((1.0, 2.0),)), 64)
    assert rep.target == pytest.approx(0.5, rel=1e-13)
    assert rep.tail_values[-1] == pytest.approx(66 / 130, rel=1e-11)
    assert rep.achieved_rel_err <= 0.02 and rep.monotone
    assert rep.n_values == tuple(range(48, 65))


def test_circle_limit_exponential_weight():
    c = special.i0(1)
    rep = circle_szego_limit(DensitySpec(1 / c, (), (0.0, 1.0)), 32)
    assert rep.target == pytest.approx(1 / c, rel=1e-13)
    assert rep.achieved_rel_err < 1e-12


def test_interval_limits():
    cheb = widom_interval_limit(DensitySpec(1 / math.pi, ((-1.0, -0.5), (1.0, -0.5))), -1, 1, 20)
    assert cheb.target == pytest.approx(2, rel=1e-12)
    assert np.allclose(cheb.tail_values, 2, rtol=1e-12)
    leg = widom_interval_limit(DensitySpec(0.5), -1, 1, 40)
    assert leg.target == pytest.approx(math.pi / 2, rel=1e-13)
    assert leg.achieved_rel_err <= 0.05 and leg.monotone
    assert leg.n_values[0] == 30


@pytest.mark.parametrize("a,b", [(0.0, 1.0), (-7.0, 3.0), (2.0, 2.5)])
def test_interval_limit_affine_invariant(a, b):
    base = widom_interval_limit(DensitySpec(0.5), -1, 1, 40)
    rep = widom_interval_limit(DensitySpec(1 / (b - a)), a, b, 40)
    assert rep.target == pytest.approx(math.pi / 2, rel=1e-12)
    assert np.allclose(rep.tail_values, base.tail_values, rtol=1e-10)


def test_interval_limit_jacobi_weight():
    # f = (1 + x)/2: exp(int log f d mu_K) = 1/4, target pi/4
    rep = widom_interval_limit(DensitySpec(0.5, ((-1.0, 1.0),)), -1, 1, 40)
    assert rep.target == pytest.approx(math.pi / 4, rel=1e-12)
    assert rep.achieved_rel_err < 0.05 and rep.monotone


def test_condition_report_examples():
    const = widom_condition_report([1.0] * 20)
    assert const["limsup_proxy"] == const["liminf_proxy"] == 1
    assert const["satisfies_ii_prime"] and const["satisfies_ii_doubleprime"] and const["heuristic"]
    root2 = widom_condition_report([math.sqrt(2)] * 12, 3)
    assert root2["limsup_proxy"] == pytest.approx(math.sqrt(2))
    decay = widom_condition_report([1 / n for n in range(1, 101)])
    assert not decay["satisfies_ii_prime"] and not decay["satisfies_ii_doubleprime"]
    with pytest.raises(ValueError):
        widom_condition_report([])
    with pytest.raises(ValueError):
        widom_condition_report([1.0, 2.0], 3)


def test_cantor_stage_zero_is_interval():
    (row,) = cantor_study(0, 20)
    assert np.allclose(row.widom[1:], math.sqrt(2), rtol=1e-12)
    assert row.capacity == pytest.approx(0.25, rel=1e-14)
    assert row.pw_sum == 0


def test_cantor_study_structure():
    rows = cantor_study(5, 30)
    caps = [r.capacity for r in rows[1:]]
    pws = [r.pw_sum for r in rows[1:]]
    assert all(b < a for a, b in zip(caps, caps[1:]))
    assert all(b > a for a, b in zip(pws, pws[1:]))
    assert min(r.min_widom for r in rows) >= 1
    text = cantor_csv(rows, {"seed": 0})
    assert text.splitlines()[1].startswith("m,capacity,log_capacity,pw_sum,min_W,W_1")
    assert len(text.splitlines()) == 2 + len(rows)


def test_cantor_lebesgue_measure():
    rows = cantor_study(3, 20, which="cantor_lebesgue")
    for row in rows:
        assert np.all(np.isfinite(row.widom)) and row.min_widom > 0
    # stage 0 is Lebesgue measure on [0, 1]: Legendre norms
    n = 10
    log_exact = 0.5 * (4 * n * math.log(2) + 4 * math.lgamma(n + 1) - 2 * math.lgamma(2 * n + 1)
                       - math.log(2 * n + 1))
    assert math.log(rows[0].widom[n]) == pytest.approx(log_exact, abs=1e-12)


def test_cantor_lebesgue_density_is_uniform():
    from widomlab.measures import integrate
    from widomlab.sets import cantor_approximant
    E = equilibrium_measure(cantor_approximant(2))
    mu = normalize(E, cantor_lebesgue_density(E))
    # each band carries mass 1/4 and the density is flat: mean of x on band [0, 1/9] is 1/18
    first = integrate(mu, lambda x: np.where(x < 0.2, x, 0.0), [1 / 9, 2 / 9])
    assert first == pytest.approx(0.25 / 18, rel=1e-10)


def test_cantor_study_limits():
    with pytest.raises(ValueError):
        cantor_study(9, 10)
    with pytest.raises(ValueError):
        cantor_study(2, 41)
    with pytest.raises(ValueError):
        cantor_study(2, 10, which="hausdorff")
