"""Experiments around the Szego-type lower bound for Widom factors.

* verify_lower_bound: inf_n W_n(mu)^2 against e^M, M the Szego integral of
  mu relative to the equilibrium measure;
* circle_szego_limit / widom_interval_limit: the classical limits of the
  norms on the circle and on one interval;
* widom_condition_report: heuristic tail proxies for a W_n sequence;
* cantor_study: capacity, Parreau-Widom sum and Widom factors on
  middle-thirds approximants.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import io
from .measures import DensitySpec, MeasureSpec, normalize, szego_integral
from .orthopoly import recurrence
from .potential import equilibrium_measure, pw_sum
from .sets import cantor_approximant, make_interval_union, unit_circle

BOUND_TOL = 1e-8


@dataclass(frozen=True)
class BoundReport:
    set_id: str
    measure_id: str
    M: float
    e_M: float
    min_Wn_sq: float
    n_range: int
    verdict: bool
    argmin_n: int = 0
    precision: int | None = None


@dataclass(frozen=True)
class LimitReport:
    target: float
    tail_values: tuple
    achieved_rel_err: float
    n_values: tuple = ()
    monotone: bool = True


def verify_lower_bound(mu: MeasureSpec, N: int, tol: float = BOUND_TOL) -> BoundReport:
    """Check min_{1<=n<=N} W_n(mu)^2 >= e^M (1 - tol)."""
    M = szego_integral(mu)
    if M == -math.inf:
        raise ValueError("the Szego integral diverges; the bound is void")
    res = recurrence(mu, N)
    wsq = np.exp(2 * np.asarray(res.widom_log[1:]))
    k = int(np.argmin(wsq))
    e_M = math.exp(M)
    return BoundReport(io.set_id(mu.set), io.measure_id(mu), M, e_M, float(wsq[k]), N,
                       bool(wsq[k] >= e_M * (1 - tol)), k + 1, res.precision)


def _tail_start(N):
    return max(1, math.ceil(3 * N / 4))


def _monotone_toward(vals, target):
    d = np.abs(np.asarray(vals) - target)
    return bool(np.all(np.diff(d) <= 1e-12 * max(abs(target), 1.0)))


def circle_szego_limit(w: DensitySpec, N: int) -> LimitReport:
    """||P_n||^2 for the circle weight w(theta) dtheta/2pi against exp(int log w)."""
    mu = normalize(equilibrium_measure(unit_circle()), w)
    target = math.exp(szego_integral(mu))
    res = recurrence(mu, N)
    ns = tuple(range(_tail_start(N), N + 1))
    tail = tuple(math.exp(res.log_norm_sq[n]) for n in ns)
    return LimitReport(target, tail, abs(tail[-1] - target) / target, ns, _monotone_toward(tail, target))


def interval_measure(f: DensitySpec, a: float, b: float) -> MeasureSpec:
    """f(x) dx on [a, b] written as h d mu_K, h = pi f |x-a|^1/2 |x-b|^1/2."""
    E = equilibrium_measure(make_interval_union([(a, b)]))
    h = f.with_factor(const=math.pi, powers=((float(a), 0.5), (float(b), 0.5)))
    return normalize(E, h)


def widom_interval_limit(f: DensitySpec, a: float, b: float, N: int) -> LimitReport:
    """W_n^2 for f dx on [a, b] against 2 pi R(inf) Cap(K).

    With f rescaled to unit mass, R(inf) = exp(int log f d mu_K) and the
    target reduces to 2 exp(M) for the density h of :func:`interval_measure`.
    """
    mu = interval_measure(f, a, b)
    target = 2 * math.exp(szego_integral(mu))
    res = recurrence(mu, N)
    ns = tuple(range(_tail_start(N), N + 1))
    tail = tuple(math.exp(2 * res.widom_log[n]) for n in ns)
    return LimitReport(target, tail, abs(tail[-1] - target) / target, ns, _monotone_toward(tail, target))


def widom_condition_report(values, window: int | None = None) -> dict:
    """Heuristic tail proxies for limsup / liminf of a W_n sequence.

    The proxies are the max and min over the trailing ``window`` values
    (default: the last quarter).  A flag is set when its proxy exceeds half
    the minimum over the leading ``window`` values.  Finite data cannot
    decide the asymptotic conditions; the output says so.
    """
    vals = np.asarray(values, float)
    if vals.size == 0:
        raise ValueError("values must be nonempty")
    window = window or max(1, len(vals) // 4)
    if not 1 <= window <= len(vals):
        raise ValueError("window must lie in [1, len(values)]")
    tail = vals[-window:]
    threshold = 0.5 * float(np.min(vals[:window]))
    hi, lo = float(np.max(tail)), float(np.min(tail))
    return {"limsup_proxy": hi, "liminf_proxy": lo, "threshold": threshold, "window": window,
            "satisfies_ii_prime": hi > threshold, "satisfies_ii_doubleprime": lo > threshold,
            "heuristic": True}


# ---------------------------------------------------------------------------
# Cantor approximants

@dataclass(frozen=True)
class CantorRow:
    m: int
    capacity: float
    log_capacity: float
    pw_sum: float
    widom: tuple  # W_0..W_N
    precision: int | None

    @property
    def min_widom(self) -> float:
        return float(min(self.widom[1:]))


def cantor_lebesgue_density(E) -> DensitySpec:
    """Density of the uniform measure on the stage-m bands relative to mu_K.

    Uniform Lebesgue density divided by the equilibrium density is
    const * prod |x - e|^1/2 / prod |x - c| over band ends e and gap zeros c.
    """
    ends = [float(v) for b in E.set.bands for v in (b.lo, b.hi)]
    powers = [(e, 0.5) for e in ends] + [(c, -1.0) for c in E.gap_zeros]
    return DensitySpec(1.0, tuple(powers))


def _cantor_row(args) -> CantorRow:
    m, N, which, precision = args
    E = equilibrium_measure(cantor_approximant(m), precision)
    if which == "equilibrium":
        mu = normalize(E)
    elif which == "cantor_lebesgue":
        mu = normalize(E, cantor_lebesgue_density(E))
    else:
        raise ValueError(f"unknown measure {which!r}")
    res = recurrence(mu, N)
    return CantorRow(m, float(E.capacity), float(E.log_capacity), float(pw_sum(E)),
                     tuple(float(w) for w in res.widom), E.precision)


def cantor_study(m_max: int, N: int, which: str = "equilibrium", precision: int | None = None,
                 workers: int = 1, m_min: int = 0) -> list[CantorRow]:
    """One row per stage m = m_min..m_max; tabulation only, no verdicts."""
    if not 0 <= m_max <= 8:
        raise ValueError("m_max must lie in [0, 8]")
    if not 1 <= N <= 40:
        raise ValueError("N must lie in [1, 40]")
    if which not in ("equilibrium", "cantor_lebesgue"):
        raise ValueError(f"unknown measure {which!r}")
    jobs = [(m, N, which, precision) for m in range(m_min, m_max + 1)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_cantor_row, jobs))
    return [_cantor_row(j) for j in jobs]


def cantor_csv(rows, meta: dict | None = None) -> str:
    N = len(rows[0].widom) - 1 if rows else 0
    header = ["m", "capacity", "log_capacity", "pw_sum", "min_W"] + [f"W_{n}" for n in range(1, N + 1)]
    return io.csv_text(header, [[r.m, r.capacity, r.log_capacity, r.pw_sum, r.min_widom, *r.widom[1:]]
                                for r in rows], meta)
