"""Equilibrium measures, capacity and Green functions of finite interval unions.

For a union of p bands with endpoints a_1 < b_1 < ... < a_p < b_p the
equilibrium density is

    rho(x) = |Q(x)| / (pi * sqrt|R(x)|),   R(x) = prod_j (x - a_j)(x - b_j),

with Q monic of degree p - 1 and one zero in every gap, fixed by requiring
that Q / sqrt|R| integrates to zero over each gap.

All work happens in normalized coordinates u = (x - shift) / scale that map
the convex hull onto [-1, 1].  On band j, with t = c_j - r_j cos(theta),

    d mu_K = f_j(theta) d theta / pi,   f_j = |Q(t)| / sqrt|R_j(t)|,

where R_j omits the two endpoints of band j, so f_j is smooth and its cosine
series ``f_j = c_0 + sum c_k cos(k theta)`` converges geometrically.  The
logarithmic potential of band j then has the closed form

    int log|z - t| d mu_j(t) = c_0 log(r_j |zeta| / 2) - sum_k (c_k / k) Re zeta^-k,

with zeta + 1/zeta = 2 (c_j - z) / r_j and |zeta| >= 1, so no singular
quadrature is ever needed for potentials, capacity or the Green function.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._arith import Arith, get_arith
from .sets import CompactSetSpec

MAX_HEIGHT_BOUND = 100
MAX_SEARCH_SIZE = 5_000_000
_MIN_NODES = 32
_MAX_NODES_FLOAT = 1 << 15
_MAX_NODES_MP = 1 << 12


class EquilibriumError(RuntimeError):
    """Internal failure while constructing an equilibrium measure."""


class CriticalPointError(RuntimeError):
    """The derivative of the Green function does not change sign in a gap."""


class _BandPotential:
    """Cosine-series data of the equilibrium measure, in normalized coordinates."""

    def __init__(self, ar: Arith, a, b, m, beta):
        self.ar = ar
        self.a = a
        self.b = b
        self.m = m
        self.beta = beta
        self.centers = (a + b) / 2
        self.radii = (b - a) / 2
        self.coeffs: list = []

    @property
    def n_bands(self) -> int:
        return len(self.a)

    # ---- algebraic pieces ----------------------------------------------
    def q(self, t):
        """Q(t) = prod(t - m_i) + sum_l beta_l prod_{i != l}(t - m_i)."""
        t = np.asarray(t)
        if len(self.m) == 0:
            return t * 0 + 1
        d = t[:, None] - self.m[None, :]
        ones = d[:, :1] * 0 + 1
        prefix = np.cumprod(np.concatenate([ones, d[:, :-1]], axis=1), axis=1)
        suffix = np.cumprod(np.concatenate([ones, d[:, :0:-1]], axis=1), axis=1)[:, ::-1]
        full = prefix[:, -1] * d[:, -1]
        return full + (prefix * suffix).dot(self.beta)

    def _excluded_products(self, t):
        """Columns prod_{i != l}(t - m_i) and the full product."""
        d = t[:, None] - self.m[None, :]
        ones = d[:, :1] * 0 + 1
        prefix = np.cumprod(np.concatenate([ones, d[:, :-1]], axis=1), axis=1)
        suffix = np.cumprod(np.concatenate([ones, d[:, :0:-1]], axis=1), axis=1)[:, ::-1]
        return prefix * suffix, prefix[:, -1] * d[:, -1]

    def endpoint_product(self, t, skip: tuple[int, ...]):
        """prod |t - e| over all band endpoints e except those indexed in ``skip``.

        Endpoint 2j is a_j and 2j + 1 is b_j.
        """
        ends = np.empty(2 * self.n_bands, dtype=self.a.dtype)
        ends[0::2] = self.a
        ends[1::2] = self.b
        keep = np.ones(len(ends), dtype=bool)
        keep[list(skip)] = False
        ends = ends[keep]
        if len(ends) == 0:
            return np.asarray(t) * 0 + 1
        return np.abs(np.asarray(t)[:, None] - ends[None, :]).prod(axis=1)

    def band_factor(self, t, j: int):
        """f_j(t) = |Q(t)| / sqrt|R_j(t)| on band j."""
        return np.abs(self.q(t)) / self.ar.sqrt(self.endpoint_product(t, (2 * j, 2 * j + 1)))

    # ---- potentials -----------------------------------------------------
    def finalize(self):
        """Pad the per-band coefficient lists into one matrix for vectorized sums."""
        kmax = max(len(c) for c in self.coeffs)
        mat = self.ar.zeros((self.n_bands, kmax))
        for j, c in enumerate(self.coeffs):
            mat[j, :len(c)] = c
        self.cmat = mat
        self.series = mat / np.maximum(np.arange(kmax), 1)

    def _zeta(self, z, real: bool):
        """zeta with |zeta| >= 1 for every band (rows) and point (columns)."""
        ar = self.ar
        xi = (self.centers[:, None] - np.asarray(z)[None, :]) / self.radii[:, None]
        if real:
            xf = xi.astype(float) if ar.multiprecision else xi
            inside = np.abs(xf) <= 1
            root = ar.sqrt(np.abs((xi - 1) * (xi + 1)))
            sgn = np.where(xf > 0, 1, -1)
            if inside.all():
                return xi + 1j * root, xi
            if not inside.any():
                return xi + sgn * root, xi
            return np.where(inside, xi + 1j * root, xi + sgn * root), xi
        s = ar.csqrt((xi - 1) * (xi + 1))
        zp, zm = xi + s, xi - s
        pick = np.abs(zp).astype(float) >= np.abs(zm).astype(float)
        return np.where(pick, zp, zm), xi

    def potential(self, z, real: bool = False):
        """U(z) = int log|z - t| d mu_K(t) in normalized coordinates."""
        ar = self.ar
        zeta, _ = self._zeta(z, real)
        w = 1 / zeta
        coef = self.series
        acc = zeta * 0
        for k in range(coef.shape[1] - 1, 0, -1):
            acc = (acc + coef[:, k:k + 1]) * w
        terms = coef[:, :1] * ar.log(np.abs(zeta) * self.radii[:, None] / 2) - ar.real(acc)
        return terms.sum(axis=0)

    def dpotential(self, x):
        """d/dx of U at real points x outside every band."""
        ar = self.ar
        zeta, xi = self._zeta(x, True)
        w = 1 / zeta
        coef = self.cmat
        acc = zeta * 0
        for k in range(coef.shape[1] - 1, 0, -1):
            acc = (acc + coef[:, k:k + 1]) * w
        total = -((coef[:, :1] + acc) / (self.radii[:, None] * (zeta - xi))).sum(axis=0)
        return ar.real(total) if (np.iscomplexobj(total) or ar.multiprecision) else total

    def on(self, fa) -> "_BandPotential":
        """The algebraic data (a, b, m, beta) carried over to arithmetic ``fa``."""
        if fa is self.ar:
            return self
        cache = self.__dict__.setdefault("_twins", {})
        key = (id(fa), id(self.beta))
        if key not in cache:
            cache[key] = _BandPotential(fa, fa.array(self.a), fa.array(self.b), fa.array(self.m),
                                        fa.array(self.beta))
        return cache[key]

    def to_float(self) -> "_BandPotential":
        f = get_arith(None)
        out = _BandPotential(f, f.array(self.ar.to_float(self.a)), f.array(self.ar.to_float(self.b)),
                             f.array(self.ar.to_float(self.m)), f.array(self.ar.to_float(self.beta)))
        out.coeffs = [f.array(self.ar.to_float(c)) for c in self.coeffs]
        out.finalize()
        return out


@dataclass(frozen=True, eq=False)
class EquilibriumData:
    """Equilibrium measure of a compact set with its derived constants."""

    set: CompactSetSpec
    capacity: float
    robin_constant: float
    gap_zeros: tuple[float, ...]
    band_masses: tuple[float, ...]
    quadrature_orders: dict = field(default_factory=dict)
    precision: int | None = None
    shift: object = 0.0
    scale: object = 1.0
    log_capacity_unit: object = 0.0
    pot: _BandPotential | None = field(default=None, repr=False)

    @property
    def log_capacity(self) -> float:
        return -self.robin_constant

    @property
    def arith(self) -> Arith:
        return get_arith(self.precision)

    def log_capacity_exact(self):
        """log Cap(K) in the working precision of this object."""
        if self.set.is_circle:
            return self.arith.scalar(0)
        return self.log_capacity_unit + self.arith.log(self.scale)

    def to_unit(self, x):
        return (x - self.shift) / self.scale

    def from_unit(self, u):
        return u * self.scale + self.shift

    def density(self, x):
        """Equilibrium density rho(x) with respect to dx (zero off K)."""
        if self.set.is_circle:
            raise ValueError("the circle's equilibrium measure is d theta / 2 pi")
        ar = self.arith
        x = np.atleast_1d(np.asarray(x, dtype=float))
        u = ar.array((x - float(self.shift)) / float(self.scale))
        out = np.zeros(len(x))
        for j in range(self.pot.n_bands):
            a, b = self.pot.a[j], self.pot.b[j]
            inside = np.array([a < v < b for v in u], dtype=bool)
            if not inside.any():
                continue
            t = u[inside]
            num = np.abs(self.pot.q(t))
            den = ar.sqrt(np.abs(self.pot.endpoint_product(t, ())))
            out[inside] = ar.to_float(num / den / ar.pi / self.scale)
        return out

    def potential(self, z, exact: bool = False):
        """int log|z - t| d mu_K(t) for scalar or array ``z``."""
        scalar = np.isscalar(z)
        zz = np.atleast_1d(np.asarray(z))
        ar = self.arith
        if self.set.is_circle:
            vals = np.log(np.maximum(1.0, np.abs(zz.astype(complex))))
            return float(vals[0]) if scalar else vals
        real = not np.iscomplexobj(zz) or bool(np.all(np.imag(zz) == 0))
        if real:
            u = ar.array((np.real(zz).astype(float) - float(self.shift)) / float(self.scale))
            if ar.multiprecision:
                u = (ar.array(np.real(zz).astype(float)) - self.shift) / self.scale
        else:
            u = ar.array((zz.astype(complex) - float(self.shift)) / float(self.scale))
        vals = self.pot.potential(u, real=real) + ar.log(self.scale)
        if not exact:
            vals = ar.to_float(vals)
            vals = np.asarray(vals, dtype=float)
        return vals[0] if scalar else vals


@dataclass(frozen=True)
class GreenEvaluation:
    point: complex
    value: float


def _orders_for(ar: Arith, func, start: int, accept) -> tuple[int, object]:
    n = start
    cap = _MAX_NODES_MP if ar.multiprecision else _MAX_NODES_FLOAT
    prev = func(n)
    while True:
        n2 = 2 * n
        if n2 > cap:
            raise EquilibriumError(f"quadrature did not converge with {n} nodes")
        cur = func(n2)
        if accept(prev, cur):
            return n2, cur
        n, prev = n2, cur


def equilibrium_measure(K: CompactSetSpec, precision: int | None = None) -> EquilibriumData:
    """Equilibrium measure, capacity and gap zeros of ``K``.

    ``precision`` is a number of decimal digits for multiprecision work;
    ``None`` uses binary64.
    """
    ar = get_arith(precision)
    if K.is_circle:
        return EquilibriumData(set=K, capacity=1.0, robin_constant=0.0, gap_zeros=(),
                               band_masses=(1.0,), quadrature_orders={}, precision=precision,
                               shift=ar.scalar(0), scale=ar.scalar(1),
                               log_capacity_unit=ar.scalar(0), pot=None)
    lo, hi = K.hull
    shift = (ar.scalar(lo) + ar.scalar(hi)) / 2
    scale = (ar.scalar(hi) - ar.scalar(lo)) / 2
    a = (ar.array([b.lo for b in K.bands]) - shift) / scale
    b = (ar.array([b.hi for b in K.bands]) - shift) / scale
    p = len(a)
    m = (b[:-1] + a[1:]) / 2
    tol = ar.tol
    gap_orders: list[int] = []
    beta = ar.zeros(p - 1)

    if p > 1:
        pot0 = _BandPotential(ar, a, b, m, beta)
        rows = []
        for k in range(p - 1):
            gc, gr = m[k], (a[k + 1] - b[k]) / 2

            def row(n, k=k, gc=gc, gr=gr):
                th = ar.chebyshev_angles(n)
                t = ar.cos(th) * (-gr) + gc
                with ar.fast() as fa:
                    fp, tf = pot0.on(fa), fa.array(t)
                    excl, full = fp._excluded_products(tf)
                    wt = 1 / fa.sqrt(fp.endpoint_product(tf, (2 * k + 1, 2 * k + 2)))
                    return fa.back(np.concatenate([(excl * wt[:, None]).sum(axis=0), [(full * wt).sum()]]) / n)

            def close(r0, r1):
                size = max(abs(v) for v in r1)
                return max(abs(u - v) for u, v in zip(r0, r1)) <= tol * size

            nk, r = _orders_for(ar, row, _MIN_NODES, close)
            gap_orders.append(nk)
            size = max(abs(v) for v in r)
            rows.append(r / size)
        mat = np.array([r[:-1] for r in rows], dtype=rows[0].dtype)
        rhs = -np.array([r[-1] for r in rows], dtype=rows[0].dtype)
        try:
            beta = ar.solve(mat, rhs)
        except (np.linalg.LinAlgError, ZeroDivisionError) as exc:
            raise EquilibriumError("singular gap system") from exc

    pot = _BandPotential(ar, a, b, m, beta)
    band_orders = []
    for j in range(p):
        cj, rj = pot.centers[j], pot.radii[j]

        def coeffs(n, j=j, cj=cj, rj=rj):
            t = ar.cos(ar.chebyshev_angles(n)) * (-rj) + cj
            with ar.fast() as fa:
                vals = fa.back(pot.on(fa).band_factor(fa.array(t), j))
            return ar.cosine_coefficients(vals)

        def decayed(c0, c1):
            tail = max(abs(v) for v in c1[len(c1) // 2:])
            return tail <= tol * abs(c1[0]) and abs(c1[0] - c0[0]) <= 10 * tol * abs(c1[0])

        nj, c = _orders_for(ar, coeffs, 16, decayed)
        band_orders.append(nj)
        keep = len(c)
        thresh = tol * abs(c[0]) * 1e-3
        while keep > 1 and abs(c[keep - 1]) <= thresh:
            keep -= 1
        pot.coeffs.append(c[:keep])
    pot.finalize()

    masses = [c[0] for c in pot.coeffs]
    total = sum(masses)
    if abs(total - 1) > max(1e-10, 1e3 * tol):
        raise EquilibriumError(f"equilibrium masses sum to {float(total)!r}")

    x0 = ar.array([pot.centers[0]])
    log_cap_u = pot.potential(x0, real=True)[0]
    log_cap = log_cap_u + ar.log(scale)

    zeros = _bracketed_roots(ar, pot.q, b[:-1], a[1:]) if p > 1 else []
    gap_zeros = tuple(float(shift + scale * z) for z in zeros)

    return EquilibriumData(
        set=K,
        capacity=float(ar.exp(log_cap)) if ar.multiprecision else math.exp(log_cap),
        robin_constant=-float(log_cap),
        gap_zeros=gap_zeros,
        band_masses=tuple(float(v) for v in masses),
        quadrature_orders={"bands": band_orders, "gaps": gap_orders},
        precision=precision,
        shift=shift,
        scale=scale,
        log_capacity_unit=log_cap_u,
        pot=pot,
    )


def _as_eq(K_or_E, precision=None) -> EquilibriumData:
    if isinstance(K_or_E, EquilibriumData):
        return K_or_E
    return equilibrium_measure(K_or_E, precision)


def capacity(K_or_E, precision: int | None = None) -> float:
    """Logarithmic capacity of a set (or of precomputed equilibrium data)."""
    return _as_eq(K_or_E, precision).capacity


def log_capacity(K_or_E, precision: int | None = None, exact: bool = False):
    E = _as_eq(K_or_E, precision)
    return E.log_capacity_exact() if exact else E.log_capacity


def green(E: EquilibriumData, z, exact: bool = False):
    """Green function of the unbounded complement with pole at infinity.

    Returns a :class:`GreenEvaluation` for scalar ``z`` and an array of values
    for array input.
    """
    if np.isscalar(z):
        value = green_values(E, np.array([z]), exact=exact)[0]
        return GreenEvaluation(complex(z), value)
    return green_values(E, z, exact=exact)


def green_values(E: EquilibriumData, z, exact: bool = False):
    z = np.atleast_1d(np.asarray(z))
    vals = E.potential(z, exact=exact) - (E.log_capacity_exact() if exact else E.log_capacity)
    if exact:
        return vals
    vals = np.asarray(vals, dtype=float)
    on_k = np.array([E.set.contains(v, tol=1e-14 * max(1.0, E.set.diameter)) for v in z])
    vals[on_k & (np.abs(vals) <= 1e-10)] = 0.0
    return vals


def _bracketed_roots(ar: Arith, f, lo, hi, iters: int = 400):
    """Roots of f in each bracket [lo_i, hi_i] (sign change assumed), all at once.

    Illinois-type regula falsi; converges superlinearly in any precision.
    """
    lo, hi = np.array(lo, dtype=lo.dtype), np.array(hi, dtype=hi.dtype)
    flo, fhi = f(lo), f(hi)
    xtol = 16 * ar.eps
    x = (lo + hi) / 2
    side = np.zeros(len(lo), dtype=int)
    for _ in range(iters):
        x = (lo * fhi - hi * flo) / (fhi - flo)
        fx = f(x)
        same_lo = np.array([(u > 0) == (v > 0) for u, v in zip(fx, flo)], dtype=bool)
        lo = np.where(same_lo, x, lo)
        flo_new = np.where(same_lo, fx, flo)
        hi = np.where(same_lo, hi, x)
        fhi_new = np.where(same_lo, fhi, fx)
        # halve the stale endpoint value when the same side is kept twice
        fhi_new = np.where(same_lo & (side == 1), fhi_new / 2, fhi_new)
        flo_new = np.where(~same_lo & (side == -1), flo_new / 2, flo_new)
        side = np.where(same_lo, 1, -1)
        flo, fhi = flo_new, fhi_new
        width = np.abs(hi - lo)
        if all(float(w_) <= xtol * max(1.0, abs(float(v))) for w_, v in zip(width, x)) or \
                all(v == 0 for v in fx):
            break
    return list(x)


def critical_points(E: EquilibriumData, exact: bool = False) -> list:
    """Critical points of the Green function, one per gap.

    In a gap the derivative of the Green function is +-Q/sqrt|R|, so the
    critical points are the gap zeros of Q.  Each is bracketed by its gap
    and found by regula falsi at working precision.
    """
    if E.set.is_circle or E.pot.n_bands == 1:
        return []
    pot = E.pot
    ar = E.arith
    lo, hi = pot.b[:-1], pot.a[1:]
    qlo, qhi = ar.to_float(pot.q(lo)), ar.to_float(pot.q(hi))
    if not np.all(np.sign(qlo) * np.sign(qhi) < 0):
        raise CriticalPointError("derivative of the Green function does not change sign in a gap")
    roots = _bracketed_roots(ar, pot.q, lo, hi)
    pts = [E.shift + E.scale * r for r in roots]
    return pts if exact else [float(v) for v in pts]


def pw_sum(E: EquilibriumData, exact: bool = False):
    """Sum of Green function values over the critical points."""
    if E.set.is_circle or E.pot.n_bands == 1:
        return E.arith.scalar(0) if exact else 0.0
    crit = critical_points(E, exact=exact)
    if exact:
        ar = E.arith
        vals = green_values(E, ar.array(crit), exact=True) if ar.multiprecision else \
            green_values(E, np.array(crit), exact=True)
        return sum(vals)
    return float(np.sum(green_values(E, np.array(crit))))


def band_measures(E: EquilibriumData) -> list[float]:
    """Equilibrium mass of each band."""
    return list(E.band_masses)


@dataclass(frozen=True)
class DependenceReport:
    found: bool
    witness: tuple[int, ...] | None
    height_bound: int
    tolerance: float


def rational_dependence(E: EquilibriumData, height_bound: int = 20) -> DependenceReport:
    """Search integers q_0..q_{l-1}, |q_j| <= height_bound, with sum_{j>=1} q_j mu(K_j) = q_0.

    K_1..K_l are the bands; the last band is omitted since the masses sum to 1.
    Witnesses are scanned by increasing height max|q_j|, then lexicographically
    over (q_1, ..., q_{l-1}) with the first nonzero entry positive; the
    returned witness is ``(q_0, q_1, ..., q_{l-1})``.
    """
    if height_bound < 1:
        raise ValueError("height_bound must be positive")
    if height_bound > MAX_HEIGHT_BOUND:
        raise ValueError(f"height_bound {height_bound} exceeds the cap {MAX_HEIGHT_BOUND}")
    masses = np.array(E.band_masses[:-1], dtype=float)
    tol = 1e-9 * height_bound
    dim = len(masses)
    if dim == 0:
        return DependenceReport(False, None, height_bound, tol)
    if (2 * height_bound + 1) ** dim > MAX_SEARCH_SIZE:
        raise ValueError("integer search box too large; lower height_bound")
    axes = [np.arange(-height_bound, height_bound + 1)] * dim
    grid = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")])
    nonzero = grid != 0
    first = grid[nonzero.argmax(axis=0), np.arange(grid.shape[1])]
    sums = masses @ grid
    q0 = np.rint(sums)
    ok = (first > 0) & (np.abs(q0) <= height_bound) & (np.abs(sums - q0) <= tol)
    if ok.any():
        cand = np.flatnonzero(ok)
        height = np.abs(grid[:, cand]).max(axis=0)
        # meshgrid order is already lexicographic; stable sort keeps it within a height
        best = cand[np.argsort(height, kind="stable")[0]]
        return DependenceReport(True, (int(q0[best]), *map(int, grid[:, best])), height_bound, tol)
    return DependenceReport(False, None, height_bound, tol)


def to_dict(E: EquilibriumData) -> dict:
    return {
        "capacity": E.capacity,
        "robin_constant": E.robin_constant,
        "gap_zeros": list(E.gap_zeros),
        "band_masses": list(E.band_masses),
        "quadrature_orders": E.quadrature_orders,
        "precision_digits": E.precision,
    }
