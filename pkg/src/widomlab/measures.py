"""Unit measures d mu = h d mu_K + (finitely many atoms) and their quadrature.

The density grammar is

    h(x) = const * prod_i |x - r_i|^gamma_i * exp(poly(x)),

with ``poly`` in increasing-degree coefficient order, evaluated at x (at
Re z on the unit circle).  Because every singular point of h is declared,
each band is split at interior roots and integrated with Gauss-Jacobi rules
whose endpoint exponents absorb both the equilibrium square-root
singularities and the density's power factors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from ._arith import Arith, get_arith
from .potential import EquilibriumData

MAX_ATOMS = 64
_ROOT_SNAP = 1e-14
_GRADE_RATIO = 0.15
_GRADE_LEVELS = 14


class MeasureError(ValueError):
    """Invalid measure description or zero/non-finite mass."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature hit its node cap; ``estimates`` holds the last two values."""

    def __init__(self, message, estimates=()):
        super().__init__(message)
        self.estimates = tuple(estimates)


@dataclass(frozen=True)
class DensitySpec:
    const: float = 1.0
    powers: tuple = ()
    exp_poly: tuple = ()

    def __post_init__(self):
        if not (math.isfinite(self.const) and self.const >= 0):
            raise MeasureError("const must be finite and nonnegative")
        powers = tuple((complex(r) if isinstance(r, complex) and r.imag != 0 else float(np.real(r)),
                        float(g)) for r, g in self.powers)
        for _, g in powers:
            if not math.isfinite(g):
                raise MeasureError("exponents must be finite")
        object.__setattr__(self, "powers", powers)
        poly = tuple(float(c) for c in self.exp_poly)
        if not all(math.isfinite(c) for c in poly):
            raise MeasureError("exp_poly coefficients must be finite")
        object.__setattr__(self, "exp_poly", poly)

    @property
    def is_zero(self) -> bool:
        return self.const == 0

    def log_value(self, x):
        """log h(x) for real or complex points (no singularity handling)."""
        x = np.asarray(x)
        out = np.full(x.shape, math.log(self.const) if self.const > 0 else -np.inf)
        for r, g in self.powers:
            out = out + g * np.log(np.abs(x - r))
        if self.exp_poly:
            out = out + P.polyval(np.real(x), self.exp_poly)
        return out

    def __call__(self, x):
        return np.exp(self.log_value(x))

    def with_factor(self, const=1.0, powers=(), exp_poly=()) -> "DensitySpec":
        """Product of this density with another grammar term; equal roots merge."""
        merged: dict = {}
        for r, g in list(self.powers) + [(r, g) for r, g in powers]:
            merged[r] = merged.get(r, 0.0) + g
        poly = P.polyadd(self.exp_poly or (0.0,), exp_poly or (0.0,))
        poly = tuple(np.trim_zeros(np.asarray(poly, float), "b")) if np.any(poly) else ()
        return DensitySpec(self.const * const, tuple((r, g) for r, g in merged.items() if g != 0),
                           poly)


@dataclass(frozen=True)
class TabulatedDensity:
    """Sampled density values on a real set, interpolated with a cubic spline.

    ``smoothness`` 1 selects linear interpolation.  No singularities allowed.
    """

    x: tuple
    values: tuple
    smoothness: int = 3

    def __post_init__(self):
        x = np.asarray(self.x, float)
        v = np.asarray(self.values, float)
        if x.ndim != 1 or x.shape != v.shape or len(x) < 2 or np.any(np.diff(x) <= 0):
            raise MeasureError("tabulated density needs increasing abscissae and matching values")
        if np.any(v <= 0) or not np.all(np.isfinite(v)):
            raise MeasureError("tabulated values must be positive and finite")

    @property
    def is_zero(self) -> bool:
        return False

    @property
    def powers(self):
        return ()

    def __call__(self, x):
        x = np.real(np.asarray(x, dtype=complex))
        if self.smoothness == 1:
            return np.interp(x, self.x, self.values)
        from scipy.interpolate import CubicSpline

        return CubicSpline(self.x, self.values, extrapolate=True)(x)

    def log_value(self, x):
        return np.log(self(x))


@dataclass(frozen=True)
class AtomList:
    atoms: tuple = ()

    def __post_init__(self):
        atoms = tuple((complex(z) if complex(z).imag != 0 else float(np.real(z)), float(m))
                      for z, m in self.atoms)
        if len(atoms) > MAX_ATOMS:
            raise MeasureError(f"at most {MAX_ATOMS} atoms are supported")
        if any(not (m > 0 and math.isfinite(m)) for _, m in atoms):
            raise MeasureError("atom masses must be positive and finite")
        object.__setattr__(self, "atoms", atoms)

    @property
    def total_mass(self) -> float:
        return float(sum(m for _, m in self.atoms))

    def __len__(self):
        return len(self.atoms)


@dataclass(frozen=True, eq=False)
class MeasureSpec:
    base: EquilibriumData
    density: DensitySpec | TabulatedDensity
    atoms: AtomList
    normalization: float
    continuous_mass: float
    atomic_mass: float
    quadrature_order: int = 0
    _cache: dict = field(default_factory=dict, repr=False)
    exact_normalization: object = None  # working-precision copy of ``normalization``

    @property
    def norm_factor(self):
        return self.normalization if self.exact_normalization is None else self.exact_normalization

    @property
    def set(self):
        return self.base.set

    @property
    def real_support(self) -> bool:
        """True when every atom lies on the real line (interval sets only)."""
        return not self.set.is_circle and all(not isinstance(z, complex) for z, _ in self.atoms.atoms)

    @property
    def circle_support(self) -> bool:
        """True for circle measures whose atoms all lie on the unit circle."""
        return self.set.is_circle and all(abs(abs(complex(z)) - 1) <= 1e-14 for z, _ in self.atoms.atoms)


# ---------------------------------------------------------------------------
# validation and rule construction

def _validate(E: EquilibriumData, density) -> None:
    if isinstance(density, TabulatedDensity):
        if E.set.is_circle:
            raise MeasureError("tabulated densities are supported on interval sets only")
        return
    K = E.set
    tol = _ROOT_SNAP * max(1.0, K.diameter)
    # factors sharing a root act through their summed exponent
    merged: list = []
    for r, g in density.powers:
        for item in merged:
            if abs(item[0] - r) <= tol:
                item[1] += g
                break
        else:
            merged.append([r, g])
    for r, g in merged:
        if K.is_circle:
            if abs(abs(complex(r)) - 1) <= tol and g < 0:
                raise MeasureError(f"negative exponent {g} at a point of the circle")
            continue
        if isinstance(r, complex):
            continue
        for band in K.bands:
            at_end = abs(r - float(band.lo)) <= tol or abs(r - float(band.hi)) <= tol
            if at_end and g <= -0.5:
                raise MeasureError(f"exponent {g} at band endpoint {r} must exceed -1/2")
            if not at_end and float(band.lo) < r < float(band.hi) and g < 0:
                raise MeasureError(f"negative exponent {g} at interior point {r}")


@dataclass
class _Piece:
    u0: object
    u1: object
    beta: float  # exponent at u0
    alpha: float  # exponent at u1
    grade_left: bool = False
    grade_right: bool = False


def _interval_pieces(E: EquilibriumData, density, singular=()) -> tuple[list, list]:
    """Pieces in normalized coordinates plus the roots as ``(u, gamma, is_real)``.

    Roots within a relative 1e-14 of a band endpoint are snapped onto it so the
    singular factor cancels exactly against the Jacobi weight.
    """
    ar = E.arith
    pot = E.pot
    tol = _ROOT_SNAP * 2
    roots = []
    for r, g in getattr(density, "powers", ()):
        if isinstance(r, complex):
            roots.append(((ar.scalar(r) - E.shift) / E.scale, g, False))
        else:
            roots.append(((ar.scalar(r) - E.shift) / E.scale, g, True))
    sing_u = [(ar.scalar(s) - E.shift) / E.scale for s in singular]
    pieces = []
    for j in range(pot.n_bands):
        a, b = pot.a[j], pot.b[j]
        exp_a = exp_b = -0.5
        cuts: dict = {}
        for idx, (u, g, is_real) in enumerate(roots):
            if not is_real:
                continue
            if abs(u - a) <= tol:
                roots[idx] = (a, g, True)
                exp_a += g
            elif abs(u - b) <= tol:
                roots[idx] = (b, g, True)
                exp_b += g
            elif a < u < b:
                cuts.setdefault(float(u), [u, 0.0, False])[1] += g
        for sp in sing_u:
            if a < sp < b and all(abs(sp - v[0]) > tol for v in cuts.values()):
                cuts.setdefault(float(sp), [sp, 0.0, False])
            for v in cuts.values():
                if abs(sp - v[0]) <= tol:
                    v[2] = True
        grade_a = any(abs(sp - a) <= tol for sp in sing_u)
        grade_b = any(abs(sp - b) <= tol for sp in sing_u)
        nodes = [(a, exp_a, grade_a)] + [tuple(cuts[k]) for k in sorted(cuts)] + [(b, exp_b, grade_b)]
        for (u0, e0, g0), (u1, e1, g1) in zip(nodes, nodes[1:]):
            if g0 and g1:
                mid = (u0 + u1) / 2
                pieces.append(_Piece(u0, mid, e0, 0.0, grade_left=True))
                pieces.append(_Piece(mid, u1, 0.0, e1, grade_right=True))
            else:
                pieces.append(_Piece(u0, u1, e0, e1, grade_left=g0, grade_right=g1))
    return pieces, roots


def _log_integrand_interval(E, density, roots, t, ar):
    """log of h(x) * rho(t) in normalized coordinates, all factors included."""
    pot = E.pot.on(ar)
    shift, scale = ar.scalar(E.shift), ar.scalar(E.scale)
    logq = ar.log(np.abs(pot.q(t)))
    logends = ar.log(pot.endpoint_product(t, ()))
    out = logq - logends / 2 - ar.log(ar.pi)
    if isinstance(density, TabulatedDensity):
        x = ar.to_float(t * scale + shift)
        return out + ar.array(density.log_value(np.asarray(x, float)))
    out = out + ar.log(ar.scalar(density.const))
    log_scale = ar.log(scale)
    for u, g, _ in roots:
        out = out + g * (ar.log(np.abs(t - ar.scalar(u))) + log_scale)
    if density.exp_poly:
        x = t * scale + shift
        acc = x * 0
        for coef in reversed(density.exp_poly):
            acc = acc * x + coef
        out = out + acc
    return out


def _piece_rule(ar: Arith, piece: _Piece, n: int, logf: Callable):
    """Nodes and weights for int_{u0}^{u1} exp(logf(t)) dt on one piece."""
    segs = [piece]
    if piece.grade_left or piece.grade_right:
        segs = _graded(piece)
    xs, ws = [], []
    for seg in segs:
        s, w = ar.gauss_jacobi(n, seg.alpha, seg.beta)
        u0, u1 = ar.scalar(seg.u0), ar.scalar(seg.u1)
        half = (u1 - u0) / 2
        t = (s + 1) * half + u0
        with np.errstate(divide="ignore", invalid="ignore"):
            lf = logf(t)
            if seg.beta:
                lf = lf - seg.beta * ar.log(t - u0)
            if seg.alpha:
                lf = lf - seg.alpha * ar.log(u1 - t)
            wt = w * ar.exp(lf) * half ** (1 + seg.alpha + seg.beta)
        if not ar.multiprecision:
            # nodes of the innermost graded cells can round onto the end in float
            wt = np.where(np.isfinite(wt), wt, 0.0)
        xs.append(t)
        ws.append(wt)
    return np.concatenate(xs), np.concatenate(ws)


def _graded(piece: _Piece) -> list:
    """Geometric subdivision toward a declared singular end."""
    u0, u1 = piece.u0, piece.u1
    length = u1 - u0
    fracs = [_GRADE_RATIO ** k for k in range(_GRADE_LEVELS, 0, -1)]
    if piece.grade_left:
        cuts = [u0] + [u0 + length * f for f in fracs] + [u1]
        segs = [_Piece(x0, x1, 0.0, 0.0) for x0, x1 in zip(cuts, cuts[1:])]
        segs[0].beta = piece.beta
        segs[-1].alpha = piece.alpha
    else:
        cuts = [u0] + [u1 - length * f for f in reversed(fracs)] + [u1]
        segs = [_Piece(x0, x1, 0.0, 0.0) for x0, x1 in zip(cuts, cuts[1:])]
        segs[0].beta = piece.beta
        segs[-1].alpha = piece.alpha
    return segs


def _circle_rule(ar: Arith, density, n: int, singular=()):
    """Nodes z on the circle and weights for int f h d theta / 2 pi.

    Without singular points on the circle this is the n-point trapezoid rule;
    otherwise the circle is cut into arcs at those angles.
    """
    twopi = 2 * ar.pi
    on_circle: dict = {}
    off_circle = []
    for r, g in getattr(density, "powers", ()):
        if abs(abs(complex(r)) - 1) <= _ROOT_SNAP * 2:
            phi = ar.ctx.arg(ar.scalar(complex(r))) if ar.multiprecision else np.angle(complex(r))
            phi = phi % twopi
            entry = on_circle.setdefault(round(float(phi), 13), [phi, 0.0, False])
            entry[1] += g
        else:
            off_circle.append((ar.scalar(r), g))
    for sp in singular:
        phi = np.angle(complex(sp)) % (2 * math.pi)
        entry = on_circle.setdefault(round(float(phi), 13), [ar.scalar(phi), 0.0, False])
        entry[2] = True
    log_const = ar.log(ar.scalar(density.const))

    def logh(theta):
        out = theta * 0 + log_const
        if off_circle:
            z = ar.cos(theta) + 1j * ar.sin(theta)
            for r, g in off_circle:
                out = out + g * ar.log(np.abs(z - r))
        for phi, g, _ in on_circle.values():
            if g:
                out = out + g * ar.log(np.abs(2 * ar.sin((theta - phi) / 2)))
        if density.exp_poly:
            x = ar.cos(theta)
            acc = x * 0
            for coef in reversed(density.exp_poly):
                acc = acc * x + coef
            out = out + acc
        return out

    if not on_circle:
        theta = ar.array(np.arange(n)) * twopi / n
        return ar.cos(theta) + 1j * ar.sin(theta), ar.exp(logh(theta)) / n
    marks = [on_circle[k] for k in sorted(on_circle)]
    xs, ws = [], []
    for i, (phi0, g0, s0) in enumerate(marks):
        phi1, g1, s1 = marks[(i + 1) % len(marks)]
        if i + 1 == len(marks):
            phi1 = phi1 + twopi
        pieces = [_Piece(phi0, phi1, g0, g1, grade_left=s0, grade_right=s1)]
        if s0 and s1:
            mid = (phi0 + phi1) / 2
            pieces = [_Piece(phi0, mid, g0, 0.0, grade_left=True),
                      _Piece(mid, phi1, 0.0, g1, grade_right=True)]
        for piece in pieces:
            t, w = _piece_rule(ar, piece, n, logh)
            xs.append(t)
            ws.append(w / twopi)
    theta = np.concatenate(xs)
    return ar.cos(theta) + 1j * ar.sin(theta), np.concatenate(ws)


def continuous_rule(E: EquilibriumData, density, n: int, singular=()):
    """Nodes (normalized coordinates) and weights for int f h d mu_K.

    ``n`` is the number of Gauss nodes per piece.  On the circle nodes are
    points z of the unit circle.
    """
    ar = E.arith
    if E.set.is_circle:
        return _circle_rule(ar, density, n, singular)
    with ar.fast() as fa:
        x, w = _interval_rule(E, density, n, singular, fa)
        return fa.back(x), fa.back(w)


def _interval_rule(E, density, n, singular, ar):
    """:func:`continuous_rule` on K in the real arithmetic ``ar``."""
    pieces, roots = _interval_pieces(E, density, singular)
    logf = lambda t: _log_integrand_interval(E, density, roots, t, ar)
    xs, ws = [], []
    for piece in pieces:
        t, w = _piece_rule(ar, piece, n, logf)
        xs.append(t)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


def _moments(ar: Arith, nodes, weights, degree: int, circle: bool):
    if circle:
        z = nodes
        vals = []
        zk = z * 0 + 1
        for _ in range(degree + 1):
            vals.append((weights * zk).sum())
            zk = zk * z
        return vals
    t = nodes
    vals = []
    t0, t1 = t * 0 + 1, t
    vals.append((weights * t0).sum())
    if degree >= 1:
        vals.append((weights * t1).sum())
    for _ in range(2, degree + 1):
        t0, t1 = t1, 2 * t * t1 - t0
        vals.append((weights * t1).sum())
    return vals


def converged_rule(E: EquilibriumData, density, degree: int = 0, singular=(), start: int | None = None):
    """Continuous rule whose Chebyshev moments through ``degree`` are converged."""
    ar = E.arith
    tol = ar.tol
    cap = 4096 if not ar.multiprecision else 1024
    base = start or (24 if not ar.multiprecision else 48)
    circle = E.set.is_circle
    with ar.fast() as fa:
        if circle:
            fa, rule = ar, lambda n: _circle_rule(ar, density, n, singular)
        else:
            rule = lambda n: _interval_rule(E, density, n, singular, fa)
        n = degree // 2 + 1 + base
        prev = rule(n)
        mprev = _moments(fa, *prev, degree, circle)
        while True:
            base *= 2
            n = degree // 2 + 1 + base
            if n > cap:
                raise QuadratureError("moments did not converge at the node cap",
                                      (float(fa.to_float(mprev[0])),))
            cur = rule(n)
            mcur = _moments(fa, *cur, degree, circle)
            size = abs(mcur[0])
            if max(abs(u - v) for u, v in zip(mprev, mcur)) <= 10 * tol * size:
                return (fa.back(cur[0]), fa.back(cur[1])), n
            prev, mprev = cur, mcur


# ---------------------------------------------------------------------------
# public operations

def normalize(base: EquilibriumData, density=None, atoms=()) -> MeasureSpec:
    """Scale h d mu_K + atoms to unit total mass."""
    density = DensitySpec() if density is None else density
    atoms = atoms if isinstance(atoms, AtomList) else AtomList(tuple(atoms))
    _validate(base, density)
    ar = base.arith
    if density.is_zero:
        cont_exact, order = ar.scalar(0), 0
    else:
        (nodes, weights), order = converged_rule(base, density, 0)
        cont_exact = weights.sum()
    cont = float(ar.to_float(cont_exact))
    total = cont + atoms.total_mass
    if not (math.isfinite(total) and total > 0):
        raise MeasureError(f"total mass {total!r} is not positive and finite")
    norm = 1.0 / total
    exact = None
    if ar.multiprecision:
        exact = 1 / (cont_exact + sum(ar.scalar(m) for _, m in atoms.atoms))
    return MeasureSpec(base=base, density=density, atoms=atoms, normalization=norm,
                       continuous_mass=cont * norm, atomic_mass=atoms.total_mass * norm,
                       quadrature_order=order, exact_normalization=exact)


def discretize(mu: MeasureSpec, degree: int):
    """Discrete measure (normalized coordinates) integrating polynomials to ``degree``.

    Returns ``(nodes, weights)`` with total weight 1: the converged continuous
    rule scaled by the normalization, followed by the atoms.
    """
    key = ("disc", degree)
    hit = mu._cache.get(key)
    if hit is not None:
        return hit
    E = mu.base
    ar = E.arith
    parts_x, parts_w = [], []
    if not mu.density.is_zero:
        (nodes, weights), _ = converged_rule(E, mu.density, degree)
        parts_x.append(nodes)
        parts_w.append(weights * mu.norm_factor)
    if len(mu.atoms):
        locs = [(ar.scalar(z) - E.shift) / E.scale for z, _ in mu.atoms.atoms]
        parts_x.append(np.array(locs, dtype=object if ar.multiprecision else
                                (complex if any(isinstance(z, complex) for z, _ in mu.atoms.atoms)
                                 or E.set.is_circle else float)))
        parts_w.append(ar.array([ar.scalar(m) * mu.norm_factor for _, m in mu.atoms.atoms]))
    if not ar.multiprecision and any(np.iscomplexobj(x) for x in parts_x):
        parts_x = [np.asarray(x, dtype=complex) for x in parts_x]
    res = (np.concatenate(parts_x), np.concatenate(parts_w))
    mu._cache[key] = res
    return res


def integrate(mu: MeasureSpec, f: Callable, singular_points: Sequence = (), max_nodes: int = 4096,
              tol: float = 1e-13):
    """int f d mu for a vectorized integrand ``f`` of the original variable.

    Nodes are doubled until two successive estimates agree to ``tol``
    relative to int |f| d mu; ``singular_points`` lists abscissae where f
    has integrable logarithmic or power singularities (or sharp peaks, such
    as log|x - z| for z just off the line); they receive graded subdivision.
    """
    E = mu.base
    ar = E.arith
    tol = max(ar.tol, tol)
    atom_part = sum(m * complex(np.asarray(f(np.array([z])))[0]) for z, m in mu.atoms.atoms)
    if mu.density.is_zero:
        return _realify(atom_part * mu.normalization)

    def estimate(n):
        nodes, weights = continuous_rule(E, mu.density, n, singular_points)
        x = ar.to_float(nodes) if E.set.is_circle else ar.to_float(nodes * E.scale + E.shift)
        x = np.asarray(x)
        w = np.asarray(ar.to_float(weights))
        # graded nodes that round onto a singular point carry negligible weight
        for sp in singular_points:
            w = np.where(np.abs(x - sp) <= 1e-15 * max(1.0, abs(sp)), 0.0, w)
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = f(x)
            terms = np.where(w == 0, 0.0, w * vals)
        return complex(np.sum(terms)), float(np.sum(np.abs(terms)))

    n = 16
    prev, _ = estimate(n)
    while True:
        n *= 2
        cur, size = estimate(n)
        if abs(cur - prev) <= tol * size:
            break
        if 2 * n > max_nodes or not np.isfinite(cur):
            raise QuadratureError("integral did not converge at the node cap", (prev, cur))
        prev = cur
    return _realify((cur + atom_part) * mu.normalization)


def _realify(v):
    v = complex(v)
    return v.real if v.imag == 0 else v


def equilibrium_integral(E: EquilibriumData, f: Callable, degree: int = 64) -> float:
    """int f d mu_K for a smooth vectorized integrand."""
    (nodes, weights), _ = converged_rule(E, DensitySpec(), degree)
    ar = E.arith
    x = ar.to_float(nodes) if E.set.is_circle else ar.to_float(nodes * E.scale + E.shift)
    return _realify(np.sum(np.asarray(ar.to_float(weights)) * f(np.asarray(x))))


def szego_integral(mu: MeasureSpec, exact: bool = False):
    """M = int log(normalization * h) d mu_K, or ``-inf`` when h vanishes identically.

    Power factors are integrated exactly through the equilibrium potential,
    int log|x - r| d mu_K(x) = U(r), and the exponential polynomial through
    quadrature of a smooth integrand.
    """
    E = mu.base
    ar = E.arith
    density = mu.density
    if density.is_zero:
        return -math.inf
    if isinstance(density, TabulatedDensity):
        val = math.log(mu.normalization) + equilibrium_integral(E, density.log_value, degree=128)
        return float(val)
    total = ar.log(ar.scalar(mu.norm_factor)) + ar.log(ar.scalar(density.const))
    for r, g in density.powers:
        total = total + g * E.potential(r, exact=True)
    if density.exp_poly:
        total = total + _poly_equilibrium_integral(E, density.exp_poly)
    return total if exact else float(ar.to_float(total))


def _poly_equilibrium_integral(E: EquilibriumData, coeffs):
    """int poly(x) d mu_K (poly of Re z on the circle), exact up to rounding."""
    ar = E.arith
    deg = len(coeffs) - 1
    if E.set.is_circle:
        n = deg + 2
        theta = ar.array(np.arange(n)) * 2 * ar.pi / n
        x = ar.cos(theta)
        w = 1 / ar.scalar(n)
    else:
        parts_x, parts_w = [], []
        pot = E.pot
        for j in range(pot.n_bands):
            # exact once the node count exceeds half the degree plus the series length
            m = deg // 2 + 2 + len(pot.coeffs[j])
            t = ar.cos(ar.chebyshev_angles(m)) * (-pot.radii[j]) + pot.centers[j]
            parts_x.append(t)
            parts_w.append(pot.band_factor(t, j) / m)
        x = np.concatenate(parts_x) * E.scale + E.shift
        w = np.concatenate(parts_w)
    acc = x * 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return (acc * w).sum()
