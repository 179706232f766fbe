"""Monic orthogonal polynomials, their norms and Widom factors.

Three routes, chosen from where the measure lives:

* real line: discretized Stieltjes procedure on a converged quadrature of
  the measure (three-term recurrence coefficients a_k, b_k);
* unit circle: Szego recursion driven by the trigonometric moments
  (Verblunsky coefficients);
* anything else (atoms off the real line or off the circle): Arnoldi
  orthogonalization of multiplication by z on the discretized measure.

Norms are carried as logarithms throughout, so Cap(K)^n never underflows.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._arith import default_dps, get_arith
from .measures import MeasureSpec, discretize, normalize
from .potential import equilibrium_measure

_PRECISION_LOG_THRESHOLD = 300 * math.log(10)
_TINY_B = 1e-250


class RecurrenceError(ArithmeticError):
    """Loss of positivity in the recurrence; rerun at higher precision."""


@dataclass(frozen=True)
class OrthoResult:
    n_max: int
    kind: str  # "real", "circle" or "complex"
    a: tuple = ()
    b: tuple = ()
    verblunsky: tuple = ()
    log_norm_sq: tuple = ()
    widom_log: tuple = ()
    log_capacity: float = 0.0
    precision: int | None = None

    @property
    def widom(self) -> np.ndarray:
        return np.exp(np.asarray(self.widom_log))

    @property
    def norms(self) -> np.ndarray:
        return np.exp(np.asarray(self.log_norm_sq) / 2)


def with_precision(mu: MeasureSpec, precision: int | None) -> MeasureSpec:
    """The same measure rebuilt on equilibrium data of the given precision."""
    if mu.base.precision == precision:
        return mu
    E = equilibrium_measure(mu.set, precision)
    return normalize(E, mu.density, mu.atoms)


def _needs_precision(mu: MeasureSpec, N: int) -> bool:
    return N * abs(mu.base.log_capacity) > _PRECISION_LOG_THRESHOLD


def recurrence(mu: MeasureSpec, N: int, precision: int | None = None) -> OrthoResult:
    """Recurrence data of the monic orthogonal polynomials P_0..P_N.

    Extended precision is used when requested, when the measure itself was
    built at extended precision, or automatically when N |log Cap| exceeds
    300 log 10 or a b_k falls below 1e-250.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    dps = precision if precision is not None else mu.base.precision
    if dps is None and _needs_precision(mu, N):
        dps = default_dps()
    mu = with_precision(mu, dps)
    res = _recurrence(mu, N)
    if dps is None and res.kind == "real" and len(res.b) and min(res.b) < _TINY_B:
        res = _recurrence(with_precision(mu, default_dps()), N)
    return res


def _recurrence(mu: MeasureSpec, N: int) -> OrthoResult:
    E = mu.base
    ar = E.arith
    nodes, weights = discretize(mu, 2 * N + 2)
    if mu.real_support:
        kind = "real"
        with ar.fast() as fa:
            a_u, b_u = _stieltjes(fa, fa.array(nodes), fa.array(weights), N)
            a_u, b_u = [fa.back(v) for v in a_u], [fa.back(v) for v in b_u]
        log_ratio = [ar.log(v) for v in b_u]
    elif mu.circle_support:
        kind = "circle"
        alphas = _szego(ar, nodes, weights, N)
        log_ratio = [ar.log(1 - abs(al) ** 2) for al in alphas]
    else:
        kind = "complex"
        h = _arnoldi(ar, nodes, weights, N)
        log_ratio = [2 * ar.log(v) for v in h]
    log_scale = ar.log(E.scale)
    log_cap = E.log_capacity_exact()
    lns, wl = [ar.scalar(0)], [ar.scalar(0)]
    acc = ar.scalar(0)
    for n in range(1, N + 1):
        acc = acc + log_ratio[n - 1]
        lns.append(acc + 2 * n * log_scale)
        wl.append(lns[-1] / 2 - n * log_cap)
    to_f = lambda v: float(ar.to_float(v))
    out = dict(n_max=N, kind=kind, log_norm_sq=tuple(map(to_f, lns)), widom_log=tuple(map(to_f, wl)),
               log_capacity=to_f(log_cap), precision=E.precision)
    if kind == "real":
        out["a"] = tuple(to_f(E.shift + E.scale * v) for v in a_u)
        out["b"] = tuple(to_f(E.scale * E.scale * v) for v in b_u)
    elif kind == "circle":
        out["verblunsky"] = tuple(complex(ar.to_float(v)) for v in alphas)
    return OrthoResult(**out)


def _stieltjes(ar, x, w, N):
    """Discretized Stieltjes procedure in normalized (Lanczos) form.

    Float runs reorthogonalize against all previous vectors.
    """
    x = np.asarray(x)
    q = ar.sqrt(w)
    q_prev = q * 0
    basis = [q]
    a, b = [], []
    sqrt_b = 0
    for k in range(N):
        ak = (x * q * q).sum()
        v = (x - ak) * q - sqrt_b * q_prev
        if not ar.multiprecision:
            Qm = np.array(basis)
            for _ in range(2):
                v = v - Qm.T @ (Qm @ v)
        bk = (v * v).sum()
        if not bk > 0:
            raise RecurrenceError(f"b_{k + 1} lost positivity; raise the precision")
        a.append(ak)
        b.append(bk)
        sqrt_b = ar.sqrt(bk)
        q_prev, q = q, v / sqrt_b
        basis.append(q)
    return a, b


def _szego(ar, z, w, N):
    """Verblunsky coefficients from the moments int z^j d mu (Levinson form)."""
    z = np.asarray(z)
    mom = []
    zj = z * 0 + 1
    for _ in range(N + 1):
        mom.append((w * zj).sum())
        zj = zj * z
    phi = [ar.scalar(1)]
    norm2 = mom[0]
    alphas = []
    conj = (lambda v: v.conjugate())
    for n in range(N):
        s = sum(phi[k] * mom[k + 1] for k in range(n + 1))
        abar = s / norm2
        alphas.append(conj(abar))
        star = [conj(c) for c in reversed(phi)]
        phi = [-abar * star[0]] + [phi[k - 1] - abar * star[k] for k in range(1, n + 1)] + [phi[n]]
        norm2 = norm2 * (1 - abs(abar) ** 2)
        if not norm2 > 0:
            raise RecurrenceError("Verblunsky coefficient reached the unit circle")
    return alphas


def _arnoldi(ar, z, w, N):
    """Subdiagonal h_{k+1,k} = ||P_{k+1}|| / ||P_k|| of the Arnoldi process."""
    if ar.multiprecision:
        z = np.asarray(z, dtype=object)
    else:
        z = np.asarray(z, dtype=complex)
    q = ar.sqrt(w) + 0j if not ar.multiprecision else ar.sqrt(w) * ar.ctx.mpc(1)
    basis = [q]
    subdiag = []
    for _ in range(N):
        v = z * basis[-1]
        for _ in range(2):
            for u in basis:
                coef = (np.conj(u) * v).sum() if not ar.multiprecision else \
                    sum(ui.conjugate() * vi for ui, vi in zip(u, v))
                v = v - coef * u
        h = ar.sqrt(ar.real((np.conj(v) * v).sum() if not ar.multiprecision else
                            sum(abs(vi) ** 2 for vi in v)))
        if not h > 0:
            raise RecurrenceError("Arnoldi breakdown: the measure has too few support points")
        subdiag.append(h)
        basis.append(v / h)
    return subdiag


def widom_factors(mu: MeasureSpec, N: int, precision: int | None = None) -> np.ndarray:
    """W_n = ||P_n|| / Cap(supp mu)^n for n = 0..N (W_0 = 1)."""
    return recurrence(mu, N, precision).widom


def monic_coefficients(mu: MeasureSpec, n: int, res: OrthoResult | None = None) -> np.ndarray:
    """Monomial coefficients (increasing degree) of P_n in the original variable."""
    res = res or recurrence(mu, max(n, 1))
    if res.kind == "real":
        p_prev, p = np.zeros(1), np.ones(1)
        for k in range(n):
            nxt = np.concatenate([[0.0], p]) - res.a[k] * np.concatenate([p, [0.0]])
            if k:
                nxt[: len(p_prev)] -= res.b[k - 1] * p_prev
            p_prev, p = p, nxt
        return p
    if res.kind == "circle":
        phi = np.ones(1, dtype=complex)
        for k in range(n):
            abar = np.conj(res.verblunsky[k])
            star = np.conj(phi[::-1])
            phi = np.concatenate([[0], phi]) - abar * np.concatenate([star, [0]])
        return phi
    # least squares against the discretized measure
    ar = mu.base.arith
    nodes, weights = discretize(mu, 2 * n + 2)
    z = np.asarray(ar.to_float(nodes * mu.base.scale + mu.base.shift) if not mu.set.is_circle
                   else ar.to_float(nodes), dtype=complex)
    sw = np.sqrt(np.asarray(ar.to_float(weights), float))
    V = np.vander(z, n + 1, increasing=True) * sw[:, None]
    c, *_ = np.linalg.lstsq(V[:, :n], -V[:, n], rcond=None)
    return np.concatenate([c, [1.0]])


def poly_norm(mu: MeasureSpec, coeffs) -> float:
    """||Q||_{L^2(mu)} for monomial coefficients (increasing degree)."""
    coeffs = np.asarray(coeffs)
    deg = len(coeffs) - 1
    ar = mu.base.arith
    nodes, weights = discretize(mu, 2 * deg + 2)
    E = mu.base
    z = ar.to_float(nodes) if mu.set.is_circle else ar.to_float(nodes * E.scale + E.shift)
    z = np.asarray(z)
    vals = np.polynomial.polynomial.polyval(z, coeffs)
    return float(np.sqrt(np.sum(np.asarray(ar.to_float(weights), float) * np.abs(vals) ** 2)))


@dataclass(frozen=True)
class MinimalityReport:
    n: int
    trials: int
    seed: int
    norm: float
    min_margin: float
    margins: tuple
    passed: bool


def minimality_check(mu: MeasureSpec, n: int, trials: int = 100, seed: int = 0,
                     tol: float = 1e-10) -> MinimalityReport:
    """Compare ||P_n|| with random monic competitors P_n + (noise of degree < n).

    The lower coefficients of each competitor are P_n's plus independent
    uniform draws in [-2, 2].
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    res = recurrence(mu, max(n, 1))
    pn = monic_coefficients(mu, n, res)
    norm = math.exp(res.log_norm_sq[n] / 2)
    rng = np.random.default_rng(seed)
    margins = []
    for _ in range(trials):
        q = pn.astype(complex if np.iscomplexobj(pn) else float).copy()
        q[:n] += rng.uniform(-2.0, 2.0, size=n)
        margins.append(poly_norm(mu, q) - norm)
    margins = tuple(margins)
    return MinimalityReport(n, trials, seed, norm, min(margins), margins, min(margins) >= -tol)
