"""Acceptance checks shared by the test suite and ``widomlab verify-all``.

Each check returns a :class:`CheckResult` with the worst observed value,
so a failure reports how far off it was.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .chebyshev import chebyshev_poly
from .measures import DensitySpec, integrate, normalize, szego_integral
from .orthopoly import recurrence
from .potential import equilibrium_measure, log_capacity, pw_sum
from .sets import cantor_approximant, make_interval_union, unit_circle
from .suite import random_affine, random_atoms, random_density, random_set
from .szego import circle_szego_limit, widom_interval_limit

# case counts per suite: (bound cases, Widom sets, Frostman sets, affine sets, Cantor stages)
SUITES = {
    "default": dict(bound_cases=200, widom_sets=50, frostman_sets=20, affine_sets=5, cantor_m=6),
    "quick": dict(bound_cases=20, widom_sets=8, frostman_sets=4, affine_sets=2, cantor_m=4),
}


@dataclass(frozen=True)
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} [{self.number}] {self.name}: {self.detail} ({self.seconds:.1f}s)"


def _map(fn, jobs, workers):
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, jobs))
    return [fn(j) for j in jobs]


def check_circle_sharpness(N: int = 64):
    mu = normalize(equilibrium_measure(unit_circle()))
    W = recurrence(mu, N).widom
    err = float(np.max(np.abs(W[1:] - 1)))
    return err <= 1e-12, f"max |W_n - 1| = {err:.2e} for n <= {N}"


def check_interval_widom(N: int = 40):
    mu = normalize(equilibrium_measure(make_interval_union([(-1, 1)])))
    wsq = np.exp(2 * np.asarray(recurrence(mu, N).widom_log[1:]))
    err = float(np.max(np.abs(wsq - 2) / 2))
    return err <= 1e-9, f"max rel err of W_n^2 vs 2 = {err:.2e} for n <= {N}"


def _bound_case(args):
    seed, N = args
    rng = np.random.default_rng(seed)
    K = random_set(rng)
    E = equilibrium_measure(K)
    mu = normalize(E, random_density(rng, K), random_atoms(rng, K))
    M = szego_integral(mu)
    wsq = np.exp(2 * np.asarray(recurrence(mu, N).widom_log[1:]))
    # slack relative to e^M; positive means the bound holds
    return float((wsq.min() - math.exp(M)) / math.exp(M))


def check_lower_bound(seed: int = 0, cases: int = 200, N: int = 30, workers: int = 1):
    ss = np.random.SeedSequence(seed).spawn(cases)
    slack = _map(_bound_case, [(s, N) for s in ss], workers)
    worst = min(slack)
    return worst >= -1e-8, f"{cases} cases, worst (min W_n^2 - e^M)/e^M = {worst:.3e}"


def _widom_set_case(args):
    seed, N, n_cheb = args
    K = random_set(np.random.default_rng(seed))
    E = equilibrium_measure(K)
    W = recurrence(normalize(E), N).widom
    gaps, mins = [], []
    for n in range(1, n_cheb + 1):
        Mn = chebyshev_poly(E, n).m_factor
        gaps.append(Mn + 1e-8 - W[n])
        mins.append(Mn)
    return float(W[1:].min()), float(min(gaps)), float(min(mins))


def _widom_sets(seed, count, N, n_cheb, workers):
    ss = np.random.SeedSequence(seed + 1).spawn(count)
    return _map(_widom_set_case, [(s, N, n_cheb) for s in ss], workers)


def check_equilibrium_bound(rows):
    worst = min(r[0] for r in rows)
    return worst >= 1 - 1e-10, f"{len(rows)} sets, min W_n(mu_K) = {worst:.12f} (n <= 30)"


def check_chebyshev_chain(rows):
    gap = min(r[1] for r in rows)
    mmin = min(r[2] for r in rows)
    ok = gap >= 0 and mmin >= 1 - 1e-9
    return ok, f"{len(rows)} sets, min (M_n + 1e-8 - W_n) = {gap:.3e}, min M_n = {mmin:.6f} (n <= 20)"


def check_remez_exactness(N: int = 16):
    E = equilibrium_measure(make_interval_union([(-1, 1)]))
    err = max(abs(chebyshev_poly(E, n).m_factor - 2) for n in range(1, N + 1))
    C = equilibrium_measure(unit_circle())
    circ = max(abs(chebyshev_poly(C, n).m_factor - 1) for n in range(1, N + 1))
    return err <= 1e-6 and circ == 0, f"max |M_n - 2| = {err:.2e} on [-1,1], circle max |M_n - 1| = {circ}"


def check_circle_limit():
    rep = circle_szego_limit(DensitySpec(0.5, ((1.0, 2.0),)), 64)
    err = abs(rep.tail_values[-1] - 0.5) / 0.5
    return err <= 0.02, f"||P_64||^2 = {rep.tail_values[-1]:.10f}, rel err vs 1/2 = {err:.4f}"


def check_interval_limit():
    rep = widom_interval_limit(DensitySpec(0.5), -1.0, 1.0, 40)
    err = abs(rep.tail_values[-1] - math.pi / 2) / (math.pi / 2)
    # tail covers n = 30..40
    ok = err <= 0.05 and rep.monotone and rep.n_values[0] == 30
    return ok, f"W_40^2 = {rep.tail_values[-1]:.10f}, rel err vs pi/2 = {err:.4f}, monotone n=30..40: {rep.monotone}"


def _cantor_stage(args):
    m, N, dps = args
    E = equilibrium_measure(cantor_approximant(m), dps)
    W = recurrence(normalize(E), N).widom
    return m, log_capacity(E, exact=True), pw_sum(E, exact=True), float(W[1:].min())


def check_cantor(m_max: int = 6, N: int = 30, dps: int = 50, workers: int = 1):
    rows = sorted(_map(_cantor_stage, [(m, N, dps) for m in range(1, m_max + 1)], workers))
    caps = [r[1] for r in rows]
    pws = [r[2] for r in rows]
    dec = all(b < a for a, b in zip(caps, caps[1:]))
    inc = all(b > a for a, b in zip(pws, pws[1:]))
    wmin = min(r[3] for r in rows)
    ok = dec and inc and wmin >= 1
    return ok, (f"m=1..{m_max} at {dps} digits: Cap decreasing {dec}, pw_sum increasing {inc}, "
                f"min W_n = {wmin:.6f}")


def _frostman_case(args):
    seed, n_tau = args
    rng = np.random.default_rng(seed)
    K = random_set(rng)
    E = equilibrium_measure(K)
    mu = normalize(E)
    lo, hi = (float(v) for v in K.hull)
    worst = math.inf
    for k in range(n_tau):
        kind = k % 3
        if kind == 0:
            b = K.bands[int(rng.integers(K.n_bands))]
            tau = float(b.lo + (b.hi - b.lo) * rng.random())
        elif kind == 1:
            tau = float(rng.uniform(lo - 1, hi + 1))
        else:
            tau = complex(rng.uniform(lo - 1, hi + 1), rng.uniform(-1, 1))
        # a complex tau close to K makes the integrand sharply peaked at Re tau
        sing = [tau.real] if isinstance(tau, complex) else [tau]
        val = integrate(mu, lambda t: np.log(np.abs(t - tau)), singular_points=sing)
        worst = min(worst, float(np.real(val)) - E.log_capacity)
    return worst


def check_frostman(seed: int = 0, sets: int = 20, n_tau: int = 100, workers: int = 1):
    ss = np.random.SeedSequence(seed + 2).spawn(sets)
    worst = min(_map(_frostman_case, [(s, n_tau) for s in ss], workers))
    return worst >= -1e-8, f"{sets} sets x {n_tau} points, min (U(tau) - log Cap) = {worst:.3e}"


def _affine_case(args):
    seed, maps, N, n_cheb = args
    rng = np.random.default_rng(seed)
    K = random_set(rng)
    E = equilibrium_measure(K)
    W = recurrence(normalize(E), N).widom
    Mf = np.array([chebyshev_poly(E, n).m_factor for n in range(1, n_cheb + 1)])
    worst = 0.0
    for _ in range(maps):
        alpha, beta = random_affine(rng)
        E2 = equilibrium_measure(K.affine_image(alpha, beta))
        W2 = recurrence(normalize(E2), N).widom
        M2 = np.array([chebyshev_poly(E2, n).m_factor for n in range(1, n_cheb + 1)])
        worst = max(worst, float(np.max(np.abs(W2 - W) / W)), float(np.max(np.abs(M2 - Mf) / Mf)))
    return worst


def check_affine(seed: int = 0, sets: int = 5, maps: int = 10, N: int = 20, n_cheb: int = 10,
                 workers: int = 1):
    ss = np.random.SeedSequence(seed + 3).spawn(sets)
    worst = max(_map(_affine_case, [(s, maps, N, n_cheb) for s in ss], workers))
    return worst <= 1e-9, f"{sets} sets x {maps} maps, max rel deviation = {worst:.2e}"


def run_all(seed: int = 0, suite: str = "default", workers: int = 1, only=None):
    """Run the acceptance checks in order; yields CheckResult objects."""
    cfg = SUITES[suite]
    widom_rows = {}

    def widom_rows_once():
        if "rows" not in widom_rows:
            widom_rows["rows"] = _widom_sets(seed, cfg["widom_sets"], 30, 20, workers)
        return widom_rows["rows"]

    checks = [
        (1, "circle sharpness", lambda: check_circle_sharpness()),
        (2, "interval Widom factor", lambda: check_interval_widom()),
        (3, "Szego-type lower bound", lambda: check_lower_bound(seed, cfg["bound_cases"], 30, workers)),
        (4, "equilibrium lower bound", lambda: check_equilibrium_bound(widom_rows_once())),
        (5, "Chebyshev chain", lambda: check_chebyshev_chain(widom_rows_once())),
        (6, "Remez exactness", lambda: check_remez_exactness()),
        (7, "circle Szego limit", lambda: check_circle_limit()),
        (8, "interval Widom limit", lambda: check_interval_limit()),
        (9, "Cantor structure", lambda: check_cantor(cfg["cantor_m"], 30, 50, workers)),
        (10, "Frostman property", lambda: check_frostman(seed, cfg["frostman_sets"], 100, workers)),
        (11, "affine invariance", lambda: check_affine(seed, cfg["affine_sets"], 10, 20, 10, workers)),
    ]
    for number, name, fn in checks:
        if only and number not in only:
            continue
        t = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # a crash is a failed criterion, reported as such
            ok, detail = False, f"error: {type(exc).__name__}: {exc}"
        yield CheckResult(number, name, bool(ok), detail, time.perf_counter() - t)
