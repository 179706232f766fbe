"""Chebyshev (minimax monic) polynomials on interval unions by Remez exchange.

The levelled polynomial on a reference u_0 < ... < u_n is the monic
degree-n interpolant of the values (-1)^i h.  With barycentric weights
w_i = 1 / prod_{j != i} (u_i - u_j) the leading coefficient of that
interpolant is h * sum (-1)^i w_i, so h = 1 / sum (-1)^i w_i and the
polynomial is evaluated by the barycentric formula.  No monomial or
Chebyshev-basis solve is involved, which keeps high degrees and small sets
well conditioned.

Everything runs in the hull coordinates u = (x - shift) / scale of the
equilibrium data, where the hull is [-1, 1].
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .potential import EquilibriumData

MAX_DEGREE = 64
POINTS_PER_BAND = 200
MAX_ITERATIONS = 200
RELATIVE_TOL = 1e-10
_GOLDEN = (math.sqrt(5) - 1) / 2
_GOLDEN_STEPS = 60


class RemezError(RuntimeError):
    """Exchange failed to converge; ``best`` holds the best iterate found."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class ChebyshevResult:
    n: int
    coeffs: tuple  # monic, increasing degree, original variable
    sup_norm: float
    alternation_points: tuple  # (abscissa, sign) pairs
    m_factor: float
    log_sup_norm: float = 0.0
    levelled_history: tuple = ()
    iterations: int = 0
    converged: bool = True
    reference: tuple = field(default=(), repr=False)
    alternation_values: tuple = field(default=(), repr=False)


def _weights(ref):
    # scale each factor by 2 so products stay near unity on [-1, 1]
    diff = 2.0 * (ref[:, None] - ref[None, :])
    np.fill_diagonal(diff, 1.0)
    return 1.0 / np.prod(diff, axis=1)


class _Levelled:
    """Monic degree-n polynomial with p(u_i) = (-1)^i h."""

    def __init__(self, ref):
        self.ref = np.asarray(ref, float)
        n = len(ref) - 1
        w = _weights(self.ref)
        signs = (-1.0) ** np.arange(n + 1)
        # weights were scaled by 2^-n, so undo it in the leading coefficient
        self.h = 1.0 / (np.sum(signs * w) * 2.0**n)
        self.w = w
        self.values = signs * self.h

    def __call__(self, u):
        u = np.asarray(u, float)
        d = u[..., None] - self.ref
        hit = d == 0
        d[hit] = 1.0
        t = self.w / d
        out = (t @ self.values) / t.sum(axis=-1)
        rows = hit.any(axis=-1)
        if np.any(rows):
            out = np.array(out, copy=True)
            out[rows] = self.values[np.argmax(hit[rows], axis=-1)]
        return out


def _grid(bands, n):
    m = max(POINTS_PER_BAND * n, 16)
    t = np.cos(np.linspace(math.pi, 0.0, m))
    return [(a + b) / 2 + (b - a) / 2 * t for a, b in bands]


def _golden_max(f, lo, hi):
    """Vectorized golden-section maximization of f on each [lo_k, hi_k]."""
    lo, hi = lo.copy(), hi.copy()
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(_GOLDEN_STEPS):
        left = f1 >= f2
        hi = np.where(left, x2, hi)
        lo = np.where(left, lo, x1)
        x2n = np.where(left, x1, lo + _GOLDEN * (hi - lo))
        x1n = np.where(left, hi - _GOLDEN * (hi - lo), x2)
        new = np.where(left, x1n, x2n)
        fn = f(new)
        f1, f2 = np.where(left, fn, f2), np.where(left, f1, fn)
        x1, x2 = x1n, x2n
    return (lo + hi) / 2


def _extrema(p, grids):
    """Local maxima of |p| on each band grid, refined, with their values."""
    xs, vals = [], []
    absp = lambda u: np.abs(p(u))
    for g in grids:
        e = np.abs(p(g))
        m = len(g)
        left = np.concatenate([[-1.0], e[:-1]])
        right = np.concatenate([e[1:], [-1.0]])
        idx = np.nonzero((e >= left) & (e >= right))[0]
        interior = idx[(idx > 0) & (idx < m - 1)]
        pts = g[idx].copy()
        if len(interior):
            refined = _golden_max(absp, g[interior - 1], g[interior + 1])
            better = absp(refined) > e[interior]
            pos = np.searchsorted(idx, interior)
            pts[pos] = np.where(better, refined, g[interior])
        xs.append(pts)
        vals.append(p(pts))
    x = np.concatenate(xs)
    v = np.concatenate(vals)
    order = np.argsort(x, kind="stable")
    return x[order], v[order]


def _exchange(x, v, level, n):
    """New reference from the extremal set, or None if it cannot alternate."""
    keep = np.abs(v) >= level * (1 - 1e-12)
    x, v = x[keep], v[keep]
    if len(x) == 0:
        return None
    # merge runs of equal sign, keeping the largest value of each run
    sx, sv = [x[0]], [v[0]]
    for xi, vi in zip(x[1:], v[1:]):
        if np.sign(vi) == np.sign(sv[-1]):
            if abs(vi) > abs(sv[-1]):
                sx[-1], sv[-1] = xi, vi
        else:
            sx.append(xi)
            sv.append(vi)
    while len(sx) > n + 1:
        if abs(sv[0]) < abs(sv[-1]):
            sx.pop(0), sv.pop(0)
        else:
            sx.pop(), sv.pop()
    if len(sx) < n + 1:
        return None
    return np.array(sx)


def _single_exchange(ref, p, xmax, vmax):
    """Classical one-point exchange keeping the sign alternation."""
    ref = list(ref)
    pv = p(np.array(ref))
    k = int(np.searchsorted(ref, xmax))
    s = np.sign(vmax)
    if k == 0:
        if np.sign(pv[0]) == s:
            ref[0] = xmax
        else:
            ref = [xmax] + ref[:-1]
    elif k == len(ref):
        if np.sign(pv[-1]) == s:
            ref[-1] = xmax
        else:
            ref = ref[1:] + [xmax]
    else:
        if np.sign(pv[k - 1]) == s:
            ref[k - 1] = xmax
        else:
            ref[k] = xmax
    return np.array(ref)


def _initial_reference(E: EquilibriumData, bands, n):
    """Chebyshev extrema of the hull moved to the nearest point of K.

    Falls back to per-band Chebyshev extrema with counts proportional to
    the band masses if two points collide.
    """
    t = -np.cos(np.pi * np.arange(n + 1) / n)
    ends = np.array(bands)
    snapped = []
    for u in t:
        inside = (ends[:, 0] <= u) & (u <= ends[:, 1])
        if inside.any():
            snapped.append(u)
        else:
            cand = ends.ravel()
            snapped.append(cand[np.argmin(np.abs(cand - u))])
    ref = np.array(snapped)
    if np.all(np.diff(ref) > 0):
        return ref
    masses = np.array(E.band_masses, float)
    counts = np.floor(masses * (n + 1)).astype(int)
    rest = (n + 1) - counts.sum()
    order = np.argsort(-(masses * (n + 1) - counts), kind="stable")
    counts[order[:rest]] += 1
    pts = []
    for (a, b), c in zip(bands, counts):
        if c == 1:
            pts.append((a + b) / 2)
        elif c > 1:
            s = -np.cos(np.pi * np.arange(c) / (c - 1))
            pts.extend((a + b) / 2 + (b - a) / 2 * s)
    return np.array(pts)


def _monomial_coeffs(p, E: EquilibriumData, n):
    """Monic coefficients in x from Chebyshev interpolation on the hull."""
    cheb_pts = np.cos(np.pi * (np.arange(n + 1) + 0.5) / (n + 1))
    cu = np.polynomial.chebyshev.chebfit(cheb_pts, p(cheb_pts), n)
    pu = np.polynomial.chebyshev.cheb2poly(cu)
    pu[-1] = 1.0
    shift, scale = float(E.shift), float(E.scale)
    # P(x) = scale^n p((x - shift) / scale)
    poly = np.polynomial.Polynomial(pu)
    lin = np.polynomial.Polynomial([-shift / scale, 1.0 / scale])
    out = poly(lin).coef * scale**n
    out = np.concatenate([out, np.zeros(n + 1 - len(out))])
    out[-1] = 1.0
    return tuple(float(c) for c in out)


def chebyshev_poly(E: EquilibriumData, n: int, max_degree: int = MAX_DEGREE) -> ChebyshevResult:
    """Minimax monic polynomial of degree ``n`` on the set of ``E``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if n > max_degree:
        raise ValueError(f"degree {n} exceeds the configured cap {max_degree}")
    log_cap = float(E.log_capacity)
    if E.set.is_circle:
        coeffs = tuple([0.0] * n + [1.0])
        return ChebyshevResult(n, coeffs, 1.0, (), 1.0, 0.0, (1.0,), 0, True, ())
    pot = E.pot
    bands = [(float(a), float(b)) for a, b in zip(pot.a, pot.b)]
    grids = _grid(bands, n)
    ref = _initial_reference(E, bands, n)
    history = []
    best = None
    converged = False
    for it in range(1, MAX_ITERATIONS + 1):
        p = _Levelled(ref)
        level = abs(p.h)
        history.append(level)
        x, v = _extrema(p, grids)
        k = int(np.argmax(np.abs(v)))
        emax = abs(v[k])
        if best is None or emax < best[1]:
            best = (p, emax, x, v)
        if (emax - level) / level <= RELATIVE_TOL:
            converged = True
            break
        new = _exchange(x, v, level, n)
        if new is None:
            new = _single_exchange(ref, p, x[k], v[k])
        if np.array_equal(new, ref):
            break
        ref = new
    p, emax, x, v = best
    alt = _alternation(x, v, emax, n)
    scale = float(E.scale)
    log_sup = math.log(emax) + n * math.log(scale)
    res = ChebyshevResult(
        n=n,
        coeffs=_monomial_coeffs(p, E, n),
        sup_norm=math.exp(log_sup),
        alternation_points=tuple((float(float(E.shift) + scale * xi), int(np.sign(vi))) for xi, vi in alt),
        m_factor=math.exp(log_sup - n * log_cap),
        log_sup_norm=log_sup,
        levelled_history=tuple(history),
        iterations=len(history),
        converged=converged,
        reference=tuple(float(float(E.shift) + scale * r) for r in p.ref),
        alternation_values=tuple(float(vi) * scale**n for _, vi in alt),
    )
    if not converged:
        raise RemezError(f"Remez exchange stalled after {len(history)} iterations", best=res)
    return res


def _alternation(x, v, emax, n):
    """Alternating near-extremal points (within 1e-8 of the sup norm)."""
    keep = np.abs(v) >= emax * (1 - 1e-8)
    out = []
    for xi, vi in zip(x[keep], v[keep]):
        if out and np.sign(vi) == np.sign(out[-1][1]):
            continue
        out.append((xi, vi))
    return out


def m_factor(E: EquilibriumData, n: int) -> float:
    """M_n = ||T_n||_K / Cap(K)^n."""
    return chebyshev_poly(E, n).m_factor


def verify_alternation(res: ChebyshevResult, tol: float = 1e-8) -> bool:
    """Equioscillation certificate: n+1 alternating points at the sup norm."""
    if not res.alternation_points and res.coeffs == tuple([0.0] * res.n + [1.0]):
        return True  # circle: z^n
    pts = res.alternation_points
    if len(pts) < res.n + 1:
        return False
    signs = [s for _, s in pts]
    xs = [x for x, _ in pts]
    alternating = all(a == -b for a, b in zip(signs, signs[1:]))
    ordered = all(a < b for a, b in zip(xs, xs[1:]))
    vals = np.abs(np.array(res.alternation_values))
    return alternating and ordered and bool(np.all(vals >= res.sup_norm * (1 - tol)))
