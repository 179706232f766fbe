"""Compact sets: finite unions of real intervals and the unit circle."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from typing import Iterable, Sequence

MAX_CANTOR_STAGE = 12


class SetValidationError(ValueError):
    """Raised for malformed set descriptions."""


@dataclass(frozen=True)
class Interval:
    lo: Real
    hi: Real

    def __post_init__(self):
        if not self.lo < self.hi:
            raise SetValidationError(f"degenerate interval [{self.lo}, {self.hi}]")

    @property
    def length(self):
        return self.hi - self.lo

    def contains(self, x, tol: float = 0.0) -> bool:
        return self.lo - tol <= x <= self.hi + tol


@dataclass(frozen=True)
class CompactSetSpec:
    """A compact set K: ``kind`` is ``"intervals"`` (with ``bands``) or ``"circle"``.

    Construct interval unions through :func:`make_interval_union`, which sorts
    and merges the input.
    """

    kind: str
    bands: tuple[Interval, ...] = ()

    def __post_init__(self):
        if self.kind == "circle":
            if self.bands:
                raise SetValidationError("the unit circle carries no bands")
            return
        if self.kind != "intervals":
            raise SetValidationError(f"unknown set kind {self.kind!r}")
        if not self.bands:
            raise SetValidationError("an interval union needs at least one band")
        for left, right in zip(self.bands, self.bands[1:]):
            if not left.hi < right.lo:
                raise SetValidationError("bands must be sorted with positive gaps")

    @property
    def is_circle(self) -> bool:
        return self.kind == "circle"

    @property
    def n_bands(self) -> int:
        return len(self.bands)

    @property
    def endpoints(self) -> list[tuple[Real, Real]]:
        return [(b.lo, b.hi) for b in self.bands]

    @property
    def gaps(self) -> list[tuple[Real, Real]]:
        return [(l.hi, r.lo) for l, r in zip(self.bands, self.bands[1:])]

    @property
    def hull(self) -> tuple[Real, Real]:
        if self.is_circle:
            return (-1, 1)
        return (self.bands[0].lo, self.bands[-1].hi)

    @property
    def diameter(self) -> float:
        if self.is_circle:
            return 2.0
        lo, hi = self.hull
        return float(hi - lo)

    @property
    def total_length(self):
        return sum((b.length for b in self.bands), 0)

    def contains(self, z, tol: float = 0.0) -> bool:
        if self.is_circle:
            return abs(abs(complex(z)) - 1.0) <= tol
        z = complex(z)
        if abs(z.imag) > tol:
            return False
        return any(b.contains(z.real, tol) for b in self.bands)

    def band_index(self, x, tol: float = 0.0) -> int | None:
        for j, b in enumerate(self.bands):
            if b.contains(x, tol):
                return j
        return None

    def issubset(self, other: "CompactSetSpec") -> bool:
        if self.is_circle or other.is_circle:
            return self.is_circle and other.is_circle
        return all(any(o.lo <= b.lo and b.hi <= o.hi for o in other.bands) for b in self.bands)

    def affine_image(self, alpha, beta) -> "CompactSetSpec":
        """Image under x -> alpha*x + beta (alpha != 0)."""
        if self.is_circle:
            raise SetValidationError("affine images of the circle are not supported")
        if alpha == 0:
            raise SetValidationError("alpha must be nonzero")
        images = [Interval(*sorted((alpha * b.lo + beta, alpha * b.hi + beta))) for b in self.bands]
        return make_interval_union(images)


def unit_circle() -> CompactSetSpec:
    return CompactSetSpec("circle")


def make_interval_union(intervals: Iterable) -> CompactSetSpec:
    """Sort intervals and merge overlapping or touching ones.

    Accepts :class:`Interval` objects or ``(lo, hi)`` pairs.
    """
    items = [iv if isinstance(iv, Interval) else Interval(*iv) for iv in intervals]
    if not items:
        raise SetValidationError("empty interval list")
    items.sort(key=lambda iv: (iv.lo, iv.hi))
    merged = [items[0]]
    for iv in items[1:]:
        last = merged[-1]
        if iv.lo <= last.hi:
            merged[-1] = Interval(last.lo, max(last.hi, iv.hi))
        else:
            merged.append(iv)
    return CompactSetSpec("intervals", tuple(merged))


def cantor_approximant(m: int, limit: int = MAX_CANTOR_STAGE) -> CompactSetSpec:
    """Stage ``m`` of the middle-thirds construction on [0, 1].

    Endpoints are exact ternary rationals (:class:`fractions.Fraction`).
    """
    if m < 0:
        raise SetValidationError("stage must be nonnegative")
    if m > limit:
        raise SetValidationError(f"stage {m} exceeds the limit {limit} ({2**m} bands)")
    bands: list[tuple[Fraction, Fraction]] = [(Fraction(0), Fraction(1))]
    for _ in range(m):
        bands = [(lo / 3 + shift, hi / 3 + shift) for shift in (Fraction(0), Fraction(2, 3))
                 for lo, hi in bands]
    bands.sort()
    return CompactSetSpec("intervals", tuple(Interval(lo, hi) for lo, hi in bands))


def from_dict(data: dict) -> CompactSetSpec:
    kind = data.get("kind")
    if kind == "circle":
        return unit_circle()
    if kind == "intervals":
        bands = data.get("bands")
        if not isinstance(bands, Sequence) or not bands:
            raise SetValidationError("'bands' must be a nonempty list of [lo, hi] pairs")
        return make_interval_union([tuple(b) for b in bands])
    raise SetValidationError(f"unknown set kind {kind!r}")


def to_dict(K: CompactSetSpec) -> dict:
    if K.is_circle:
        return {"kind": "circle"}
    return {"kind": "intervals", "bands": [[float(b.lo), float(b.hi)] for b in K.bands]}
