"""Switch between binary64 and multiprecision arithmetic on numpy arrays.

Multiprecision values live in numpy object arrays holding ``mpf``/``mpc``
numbers of a private :class:`mpmath.MPContext`, so the global mpmath
precision is never touched.
"""
from __future__ import annotations

import math
import os
import threading
from contextlib import contextmanager
from fractions import Fraction

import gmpy2
import mpmath
import numpy as np
from mpmath.libmp import from_man_exp
from scipy import fft, special

DEFAULT_DPS = 50

_lock = threading.Lock()
_arith_cache: dict = {}


def default_dps() -> int:
    """Decimal digits used when extended precision is requested without a value."""
    env = os.environ.get("WIDOMLAB_PRECISION")
    if env:
        return int(env)
    return DEFAULT_DPS


def get_arith(dps: int | None = None) -> "Arith":
    with _lock:
        if dps not in _arith_cache:
            _arith_cache[dps] = Arith(dps)
        return _arith_cache[dps]


class Arith:
    """Elementwise math for float64 (``dps=None``) or mpmath at ``dps`` digits."""

    def __init__(self, dps: int | None = None):
        self.dps = dps
        if dps is None:
            self.ctx = None
            self.eps = np.finfo(float).eps
            self.pi = math.pi
        else:
            ctx = mpmath.MPContext()
            ctx.dps = int(dps)
            self.ctx = ctx
            self.eps = float(ctx.mpf(10) ** (-int(dps)))
            self.pi = ctx.pi
            self._log = np.frompyfunc(ctx.log, 1, 1)
            self._exp = np.frompyfunc(ctx.exp, 1, 1)
            self._sqrt = np.frompyfunc(ctx.sqrt, 1, 1)
            self._cos = np.frompyfunc(ctx.cos, 1, 1)
            self._sin = np.frompyfunc(ctx.sin, 1, 1)
            self._re = np.frompyfunc(ctx.re, 1, 1)
            self._im = np.frompyfunc(ctx.im, 1, 1)
            self._conv = np.frompyfunc(self.scalar, 1, 1)
            self._fast = _FastReal(self)
        self._gj_cache: dict = {}

    @property
    def multiprecision(self) -> bool:
        return self.ctx is not None

    @property
    def tol(self) -> float:
        """Convergence target for adaptive procedures."""
        if self.ctx is None:
            return 1e-13
        return 10.0 ** (-(self.dps - 5))

    # conversions -----------------------------------------------------
    def scalar(self, x):
        if self.ctx is None:
            if isinstance(x, complex):
                return x
            return complex(x) if isinstance(x, (np.complexfloating,)) else float(x)
        if isinstance(x, Fraction):
            return self.ctx.mpf(x.numerator) / x.denominator
        if isinstance(x, (complex, np.complexfloating)):
            return self.ctx.mpc(x)
        if isinstance(x, (np.floating, np.integer)):
            x = x.item()
        return self.ctx.convert(x)

    def array(self, x):
        if self.ctx is None:
            arr = np.asarray(x)
            if np.iscomplexobj(arr):
                return arr.astype(complex)
            if arr.dtype == object:
                arr = np.vectorize(float, otypes=[float])(arr) if arr.size else arr.astype(float)
            return arr.astype(float)
        arr = np.asarray(x, dtype=object)
        if arr.size == 0:
            return arr
        return self._conv(arr).astype(object)

    def zeros(self, shape):
        if self.ctx is None:
            return np.zeros(shape)
        out = np.empty(shape, dtype=object)
        out.fill(self.ctx.zero)
        return out

    def to_float(self, x):
        if self.ctx is None:
            return x
        if isinstance(x, np.ndarray):
            if x.size and any(isinstance(v, mpmath.ctx_mp_python.mpc) for v in x.flat):
                return np.array([complex(v) for v in x.flat]).reshape(x.shape)
            return np.array([float(v) for v in x.flat], dtype=float).reshape(x.shape)
        if isinstance(x, mpmath.ctx_mp_python.mpc):
            return complex(x)
        return float(x)

    # elementwise functions --------------------------------------------
    def log(self, x):
        return np.log(x) if self.ctx is None else self._apply(self._log, x)

    def exp(self, x):
        return np.exp(x) if self.ctx is None else self._apply(self._exp, x)

    def sqrt(self, x):
        return np.sqrt(x) if self.ctx is None else self._apply(self._sqrt, x)

    def cos(self, x):
        return np.cos(x) if self.ctx is None else self._apply(self._cos, x)

    def sin(self, x):
        return np.sin(x) if self.ctx is None else self._apply(self._sin, x)

    def real(self, x):
        return np.real(x) if self.ctx is None else self._apply(self._re, x)

    def imag(self, x):
        return np.imag(x) if self.ctx is None else self._apply(self._im, x)

    def csqrt(self, x):
        """Principal complex square root."""
        if self.ctx is None:
            return np.sqrt(np.asarray(x, dtype=complex))
        return self._apply(self._sqrt, self._apply(np.frompyfunc(self.ctx.mpc, 1, 1), x))

    @staticmethod
    def _apply(ufunc, x):
        return ufunc(x)

    # bulk real arithmetic ------------------------------------------------
    @contextmanager
    def fast(self):
        """Arithmetic twin for heavy real elementwise work.

        In multiprecision mode this is a gmpy2 backend at the same binary
        precision (about ten times faster on object arrays); convert with
        ``.array`` on the way in and ``.back`` on the way out.  In binary64
        it is this object itself.
        """
        if self.ctx is None:
            yield self
            return
        with gmpy2.context(precision=self.ctx.prec):
            yield self._fast

    def back(self, x):
        return x

    # linear algebra ------------------------------------------------------
    def solve(self, a, b):
        if self.ctx is None:
            return np.linalg.solve(a, b)
        ctx = self.ctx
        sol = ctx.lu_solve(ctx.matrix(a.tolist()), ctx.matrix(list(b)))
        return np.array([sol[i] for i in range(sol.rows)], dtype=object)

    # quadrature rules ------------------------------------------------------
    def chebyshev_angles(self, n: int):
        """Gauss-Chebyshev angles (2j+1)pi/(2n), j = 0..n-1."""
        if self.ctx is None:
            return (2.0 * np.arange(n) + 1.0) * math.pi / (2 * n)
        return np.array([(2 * j + 1) * self.pi / (2 * n) for j in range(n)], dtype=object)

    def cosine_coefficients(self, values):
        """Coefficients c_k of sum_k c_k cos(k theta) interpolating at Chebyshev angles.

        ``values`` are samples at :meth:`chebyshev_angles`; the constant term is
        returned halved so that the series reads ``c_0 + sum_{k>=1} c_k cos(k theta)``.
        """
        n = len(values)
        if self.ctx is None:
            c = fft.dct(np.asarray(values, dtype=float), type=2) / n
            c[0] /= 2.0
            return c
        key = ("cos-fast", n)
        with self.fast() as fa:
            table = self._gj_cache.get(key)
            if table is None:
                table = self._gj_cache[key] = fa.array(self._cosine_table(n))
            out = table.dot(fa.array(values)) * 2 / n
            out[0] = out[0] / 2
            return fa.back(out)

    def _cosine_table(self, n: int):
        key = ("cos", n)
        table = self._gj_cache.get(key)
        if table is None:
            # cos(k (2j+1) pi / 2n) takes only 4n distinct values
            base = np.array([self.ctx.cospi(self.ctx.mpf(m) / (2 * n)) for m in range(4 * n)],
                            dtype=object)
            k = np.arange(n)[:, None]
            j = np.arange(n)[None, :]
            table = base[(k * (2 * j + 1)) % (4 * n)]
            self._gj_cache[key] = table
        return table

    def gauss_jacobi(self, n: int, alpha, beta):
        """Nodes and weights on [-1, 1] for the weight (1 - s)^alpha (1 + s)^beta."""
        key = (n, float(alpha), float(beta))
        hit = self._gj_cache.get(key)
        if hit is not None:
            return hit
        if self.ctx is None:
            if alpha == 0 and beta == 0:
                x, w = special.roots_legendre(n)
            elif alpha == -0.5 and beta == -0.5:
                x = -np.cos(self.chebyshev_angles(n))
                w = np.full(n, math.pi / n)
            else:
                x, w = _polished_jacobi(n, float(alpha), float(beta))
            res = (np.asarray(x, float), np.asarray(w, float))
        else:
            ctx = self.ctx
            if alpha == -0.5 and beta == -0.5:
                x = np.array(list(self._cos(self.chebyshev_angles(n)))[::-1], dtype=object)
                w = np.array([ctx.pi / n] * n, dtype=object)
            else:
                qtype = "legendre" if alpha == 0 and beta == 0 else "jacobi"
                X, W = ctx.gauss_quadrature(n, qtype, ctx.convert(alpha), ctx.convert(beta))
                x = np.array([X[i] for i in range(n)], dtype=object)
                w = np.array([W[i] for i in range(n)], dtype=object)
            res = (x, w)
        self._gj_cache[key] = res
        return res


def _mpf_to_mpfr(v):
    if isinstance(v, gmpy2.mpfr):
        return v
    raw = getattr(v, "_mpf_", None)
    if raw is None:
        return gmpy2.mpfr(v)
    sign, man, exp, bc = raw
    if not man:
        return gmpy2.mpfr(float(v))  # zero, inf or nan
    out = gmpy2.mul_2exp(gmpy2.mpfr(man), exp)
    return -out if sign else out


class _FastReal:
    """gmpy2 mirror of a multiprecision :class:`Arith` (real values only).

    Only valid inside :meth:`Arith.fast`, which sets the gmpy2 precision.
    """

    multiprecision = True

    def __init__(self, parent: Arith):
        self.parent = parent
        self.dps = parent.dps
        self.ctx = parent.ctx
        self.eps = parent.eps
        self._to = np.frompyfunc(_mpf_to_mpfr, 1, 1)
        self._from = np.frompyfunc(self._back_scalar, 1, 1)
        self._log = np.frompyfunc(gmpy2.log, 1, 1)
        self._exp = np.frompyfunc(gmpy2.exp, 1, 1)
        self._sqrt = np.frompyfunc(gmpy2.sqrt, 1, 1)

    @property
    def tol(self):
        return self.parent.tol

    def _back_scalar(self, v):
        if not gmpy2.is_finite(v):
            return self.ctx.mpf(float(v))
        man, exp = v.as_mantissa_exp()
        return self.ctx.make_mpf(from_man_exp(int(man), int(exp), self.ctx.prec, "n"))

    @property
    def pi(self):
        return gmpy2.const_pi()

    def scalar(self, x):
        return _mpf_to_mpfr(x)

    def to_float(self, x):
        if isinstance(x, np.ndarray):
            return np.array([float(v) for v in x.flat], dtype=float).reshape(x.shape)
        return float(x)

    def gauss_jacobi(self, n: int, alpha, beta):
        key = ("fast", n, float(alpha), float(beta))
        cache = self.parent._gj_cache
        if key not in cache:
            x, w = self.parent.gauss_jacobi(n, alpha, beta)
            cache[key] = (self.array(x), self.array(w))
        return cache[key]

    def array(self, x):
        arr = np.asarray(x, dtype=object)
        return self._to(arr).astype(object) if arr.size else arr

    def back(self, x):
        if isinstance(x, np.ndarray):
            return self._from(x).astype(object) if x.size else x
        return self._back_scalar(x)

    def zeros(self, shape):
        out = np.empty(shape, dtype=object)
        out.fill(gmpy2.mpfr(0))
        return out

    def log(self, x):
        return self._log(x)

    def exp(self, x):
        return self._exp(x)

    def sqrt(self, x):
        return self._sqrt(x)


def _jacobi_recurrence(n: int, a: float, b: float):
    """Diagonal and off-diagonal of the Jacobi matrix for (1-s)^a (1+s)^b."""
    k = np.arange(n, dtype=float)
    s = 2 * k + a + b
    with np.errstate(divide="ignore", invalid="ignore"):
        diag = (b * b - a * a) / (s * (s + 2))
    diag[0] = (b - a) / (a + b + 2)
    k = np.arange(1, n, dtype=float)
    s = 2 * k + a + b
    with np.errstate(divide="ignore", invalid="ignore"):
        off = 4 * k * (k + a) * (k + b) * (k + a + b) / (s * s * (s + 1) * (s - 1))
    if n > 1:
        off[0] = 4 * (1 + a) * (1 + b) / ((2 + a + b) ** 2 * (3 + a + b))
    return diag, np.sqrt(off)


def _polished_jacobi(n: int, a: float, b: float):
    """Gauss-Jacobi rule: scipy's nodes refined by Newton on the orthonormal
    recurrence, weights from the Christoffel function 1 / sum_k p_k(x)^2."""
    x, _ = special.roots_jacobi(n, a, b)
    diag, off = _jacobi_recurrence(n + 1, a, b)
    mass = 2.0 ** (a + b + 1) * math.exp(special.betaln(a + 1, b + 1))
    for _ in range(3):
        p_prev, p = np.zeros(n), np.full(n, 1 / math.sqrt(mass))
        dp_prev, dp = np.zeros(n), np.zeros(n)
        christ = p * p
        for k in range(n):
            sub = off[k - 1] if k else 0.0
            p_next = ((x - diag[k]) * p - sub * p_prev) / off[k]
            dp_next = (p + (x - diag[k]) * dp - sub * dp_prev) / off[k]
            p_prev, p, dp_prev, dp = p, p_next, dp, dp_next
            if k < n - 1:
                christ = christ + p * p
        x = x - p / dp
    return x, 1.0 / christ
