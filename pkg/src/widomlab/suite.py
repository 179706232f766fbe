"""Seeded random sets, densities, atoms and affine maps for property suites."""
from __future__ import annotations

import numpy as np

from .measures import DensitySpec
from .sets import CompactSetSpec, make_interval_union

MIN_FEATURE = 0.05


def random_set(rng: np.random.Generator, max_bands: int = 4) -> CompactSetSpec:
    """1..max_bands bands inside a random window, bands and gaps >= 0.05 wide."""
    k = int(rng.integers(1, max_bands + 1))
    lo = rng.uniform(-3.0, 1.0)
    width = rng.uniform(1.0, 4.0)
    # 2k - 1 alternating band/gap lengths, each at least MIN_FEATURE
    parts = rng.dirichlet(np.ones(2 * k - 1)) * (width - (2 * k - 1) * MIN_FEATURE) + MIN_FEATURE
    edges = lo + np.concatenate([[0.0], np.cumsum(parts)])
    bands = [(float(edges[2 * j]), float(edges[2 * j + 1])) for j in range(k)]
    return make_interval_union(bands)


def _gap_points(K: CompactSetSpec, rng, count):
    """Points off K: inside gaps or within distance 1 outside the hull."""
    lo, hi = K.hull
    slots = [(float(a), float(b)) for a, b in K.gaps] + [(float(lo) - 1.0, float(lo)), (float(hi), float(hi) + 1.0)]
    out = []
    for _ in range(count):
        a, b = slots[int(rng.integers(len(slots)))]
        out.append(float(a + (b - a) * rng.uniform(0.1, 0.9)))
    return out


def random_density(rng: np.random.Generator, K: CompactSetSpec) -> DensitySpec:
    """Random grammar density: 0-3 power factors and an exponential of degree <= 2.

    Roots on K get exponents keeping log h integrable and h d mu_K finite:
    gamma > -1/2 at band ends, gamma >= 0 inside bands; roots off K get any
    moderate exponent.
    """
    powers = []
    for _ in range(int(rng.integers(0, 4))):
        where = rng.integers(3)
        band = K.bands[int(rng.integers(K.n_bands))]
        lo, hi = float(band.lo), float(band.hi)
        if where == 0:
            end = lo if rng.random() < 0.5 else hi
            gamma = float(rng.uniform(-0.4, 2.0))
            if any(r == end for r, _ in powers):
                continue  # one factor per endpoint keeps the summed exponent above -1/2
            powers.append((end, gamma))
        elif where == 1:
            powers.append((float(lo + (hi - lo) * rng.uniform(0.1, 0.9)), float(rng.uniform(0.0, 2.0))))
        else:
            powers.append((_gap_points(K, rng, 1)[0], float(rng.uniform(-2.0, 2.0))))
    deg = int(rng.integers(0, 3))
    poly = tuple(float(c) for c in rng.uniform(-1.0, 1.0, size=deg + 1)) if deg else ()
    return DensitySpec(float(rng.uniform(0.5, 2.0)), tuple(powers), poly)


def random_atoms(rng: np.random.Generator, K: CompactSetSpec, max_atoms: int = 3) -> tuple:
    count = int(rng.integers(0, max_atoms + 1))
    return tuple((x, float(rng.uniform(0.01, 0.5))) for x in _gap_points(K, rng, count))


def random_affine(rng: np.random.Generator) -> tuple[float, float]:
    """x -> alpha x + beta with |alpha| in [0.2, 5], either sign."""
    alpha = float(np.exp(rng.uniform(np.log(0.2), np.log(5.0))))
    if rng.random() < 0.5:
        alpha = -alpha
    return alpha, float(rng.uniform(-5.0, 5.0))
