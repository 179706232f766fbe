import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special

from widomlab.measures import (AtomList, DensitySpec, MeasureError, QuadratureError, TabulatedDensity,
                               discretize, integrate, normalize, szego_integral)
from widomlab.potential import equilibrium_measure
from widomlab.sets import make_interval_union, unit_circle
from widomlab.suite import random_atoms, random_density, random_set

E1 = equilibrium_measure(make_interval_union([(-1, 1)]))
C = equilibrium_measure(unit_circle())
ABS_X = DensitySpec(1.0, ((0.0, 1.0),))


def test_equilibrium_measure_is_unit():
    mu = normalize(E1)
    assert mu.normalization == pytest.approx(1, abs=1e-14)
    assert szego_integral(mu) == pytest.approx(0, abs=1e-14)


def test_atom_splits_mass():
    mu = normalize(E1, DensitySpec(), [(5.0, 1.0)])
    assert mu.normalization == pytest.approx(0.5, rel=1e-14)
    assert mu.continuous_mass == pytest.approx(0.5, rel=1e-14)
    assert mu.atomic_mass == pytest.approx(0.5, rel=1e-14)


def test_abs_density_normalization():
    assert normalize(E1, ABS_X).normalization == pytest.approx(math.pi / 2, rel=1e-13)


def test_integrate_examples():
    mu = normalize(E1)
    assert integrate(mu, lambda x: np.ones_like(x)) == pytest.approx(1, abs=1e-14)
    assert integrate(mu, lambda x: x**2) == pytest.approx(0.5, rel=1e-14)
    sym = normalize(equilibrium_measure(make_interval_union([(-2, -1), (1, 2)])), DensitySpec(1, ((0, 2),)))
    assert integrate(sym, lambda x: x) == pytest.approx(0, abs=1e-14)


def test_log_singular_integral():
    # int log|x| d mu_[-1,1] = -log 2
    assert integrate(normalize(E1), lambda x: np.log(np.abs(x)), [0.0]) == pytest.approx(-math.log(2),
                                                                                         rel=1e-12)


def test_szego_integral_examples():
    mu = normalize(E1, DensitySpec(math.pi / 2, ((0.0, 1.0),)))
    assert szego_integral(mu) == pytest.approx(math.log(math.pi / 4), rel=1e-13)
    w = DensitySpec(0.5, ((1.0, 2.0),))  # 1 - cos(theta) = |z - 1|^2 / 2
    assert szego_integral(normalize(C, w)) == pytest.approx(-math.log(2), rel=1e-13)


def test_circle_exponential_weight():
    mu = normalize(C, DensitySpec(1.0, (), (0.0, 1.0)))
    assert mu.normalization == pytest.approx(1 / special.i0(1), rel=1e-14)
    assert szego_integral(mu) == pytest.approx(-math.log(special.i0(1)), rel=1e-13)


def test_zero_density_sentinel():
    mu = normalize(E1, DensitySpec(0.0), [(3.0, 1.0)])
    assert szego_integral(mu) == -math.inf
    with pytest.raises(MeasureError):
        normalize(E1, DensitySpec(0.0))


@pytest.mark.parametrize("density", [DensitySpec(1, ((0.0, -0.2),)), DensitySpec(1, ((1.0, -0.5),)),
                                     DensitySpec(1, ((-1.0, -0.7),))])
def test_grammar_violations_rejected(density):
    with pytest.raises(MeasureError):
        normalize(E1, density)


def test_atom_limit():
    with pytest.raises(MeasureError):
        AtomList(tuple((2.0 + k, 0.1) for k in range(65)))
    with pytest.raises(MeasureError):
        AtomList(((2.0, -1.0),))


def test_quadrature_failure_reports_estimates():
    mu = normalize(E1)
    with pytest.raises(QuadratureError) as info:
        integrate(mu, lambda x: np.sign(x - 0.123), max_nodes=64)
    assert len(info.value.estimates) == 2


def test_tabulated_constant_matches_equilibrium():
    x = np.linspace(-1, 1, 11)
    mu = normalize(E1, TabulatedDensity(tuple(x), tuple(np.full(11, 2.0))))
    assert mu.normalization == pytest.approx(0.5, rel=1e-13)
    assert szego_integral(mu) == pytest.approx(0, abs=1e-13)


def test_extended_precision_moments():
    E = equilibrium_measure(make_interval_union([(-1, 1)]), 30)
    mu = normalize(E)
    nodes, weights = discretize(mu, 10)
    x2 = sum(w * t * t for t, w in zip(nodes, weights))
    assert abs(x2 - E.arith.scalar(1) / 2) < 1e-25


def test_jensen_and_perturbation():
    E = equilibrium_measure(make_interval_union([(-1, 0.5), (1, 2)]))
    h = DensitySpec(1.3, ((0.0, 1.0), (2.0, 0.5)), (0.2, -0.4))
    mu = normalize(E, h)
    M = szego_integral(mu)
    assert M <= 0  # Jensen, continuous part of unit mass
    base = normalize(E)
    raw = M - math.log(mu.normalization)  # int log h d mu_K before renormalization
    eps = [2.0 ** -k for k in range(7)]
    vals = [integrate(base, lambda x, e=e: np.log(h(x) + e), [0.0, 2.0], tol=1e-10) for e in eps]
    assert all(b <= a + 1e-13 for a, b in zip(vals, vals[1:]))
    assert all(v >= raw for v in vals)
    gaps = [v - raw for v in vals]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 0.1


def test_atoms_shift_szego_integral_exactly():
    E = equilibrium_measure(make_interval_union([(0, 1), (2, 4)]))
    h = DensitySpec(0.7, ((1.0, 0.3), (1.5, -1.0)))
    plain = normalize(E, h)
    with_atoms = normalize(E, h, [(5.0, 0.2), (1.7, 0.05)])
    assert szego_integral(with_atoms) == pytest.approx(
        szego_integral(plain) + math.log(1 - with_atoms.atomic_mass), rel=1e-13)


@given(st.integers(0, 2**31 - 1))
def test_random_measures_are_unit(seed):
    rng = np.random.default_rng(seed)
    K = random_set(rng)
    E = equilibrium_measure(K)
    mu = normalize(E, random_density(rng, K), random_atoms(rng, K))
    assert mu.continuous_mass + mu.atomic_mass == pytest.approx(1, abs=1e-12)
    assert integrate(mu, lambda x: np.ones_like(x)) == pytest.approx(1, abs=1e-12)
    # h d mu_K with unit continuous mass obeys Jensen
    assert szego_integral(normalize(E, mu.density)) <= 1e-12


def test_coincident_roots_use_summed_exponent():
    with pytest.raises(MeasureError):
        normalize(E1, DensitySpec(1, ((1.0, -0.3), (1.0, -0.3))))
    with pytest.raises(MeasureError):
        normalize(E1, DensitySpec(1, ((0.0, 1.0), (0.0, -1.5))))
    mu = normalize(E1, DensitySpec(1, ((0.0, 1.5), (0.0, -0.5))))
    assert mu.normalization == pytest.approx(math.pi / 2, rel=1e-13)
