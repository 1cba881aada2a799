"""Certified real enclosures with dyadic endpoints."""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from math import isqrt

from .matrix import as_rational, norm_sq


def is_dyadic(q: Fraction) -> bool:
    d = q.denominator
    return d & (d - 1) == 0


def dyadic_floor(q: Fraction, e: int) -> Fraction:
    """Largest multiple of 2^-e that is <= q."""
    return Fraction((q.numerator << e) // q.denominator, 1 << e) if e >= 0 else \
        Fraction((q.numerator // (q.denominator << -e)) << -e)


def dyadic_ceil(q: Fraction, e: int) -> Fraction:
    return -dyadic_floor(-q, e)


def sqrt_floor(x: Fraction, e: int) -> Fraction:
    """Dyadic lower bound of sqrt(x) on the 2^-e grid (exact when representable)."""
    if x < 0:
        raise ValueError("sqrt of negative number")
    scaled = (x.numerator << (2 * e)) // x.denominator
    return Fraction(isqrt(scaled), 1 << e)


def sqrt_ceil(x: Fraction, e: int) -> Fraction:
    if x < 0:
        raise ValueError("sqrt of negative number")
    num = x.numerator << (2 * e)
    scaled = -((-num) // x.denominator)
    s = isqrt(scaled)
    if s * s < scaled:
        s += 1
    return Fraction(s, 1 << e)


def format_dyadic(q: Fraction) -> str:
    if not is_dyadic(q):
        raise ValueError(f"{q} is not dyadic")
    e = q.denominator.bit_length() - 1
    return f"{q.numerator}*2^-{e}"


_DYADIC_RE = re.compile(r"^\s*(-?\d+)\s*\*\s*2\^(-?\d+)\s*$")


def parse_dyadic(s) -> Fraction:
    if not isinstance(s, str):
        return as_rational(s)
    m = _DYADIC_RE.match(s)
    if not m:
        return as_rational(s)
    mant, exp = int(m.group(1)), int(m.group(2))
    return Fraction(mant) * (Fraction(2) ** exp)


@dataclass(frozen=True)
class DyadicInterval:
    """Closed interval [lo, hi] with dyadic endpoints.

    ``precision`` is the requested exponent p; certified operations return
    intervals with ``hi - lo <= 2**-p``.
    """

    lo: Fraction
    hi: Fraction
    precision: int = 0

    def __post_init__(self):
        lo, hi = as_rational(self.lo), as_rational(self.hi)
        if not (is_dyadic(lo) and is_dyadic(hi)):
            raise ValueError(f"non-dyadic endpoints [{lo}, {hi}]")
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, q, precision: int = 0) -> DyadicInterval:
        q = as_rational(q)
        return cls(q, q, precision)

    @classmethod
    def around(cls, q, precision: int) -> DyadicInterval:
        """Tightest enclosure of the rational q on the 2^-precision grid."""
        q = as_rational(q)
        if is_dyadic(q):
            return cls(q, q, precision)
        return cls(dyadic_floor(q, precision), dyadic_ceil(q, precision), precision)

    @classmethod
    def sqrt_of(cls, x, precision: int) -> DyadicInterval:
        """Enclosure of sqrt(x) for rational x >= 0, width <= 2^-precision."""
        x = as_rational(x)
        lo = sqrt_floor(x, precision)
        if lo * lo == x:
            return cls(lo, lo, precision)
        return cls(lo, lo + Fraction(1, 1 << precision), precision)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    def certified(self) -> bool:
        return self.width <= Fraction(2) ** -self.precision

    def contains(self, x) -> bool:
        x = as_rational(x)
        return self.lo <= x <= self.hi

    def overlaps(self, other: DyadicInterval) -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def __add__(self, other: DyadicInterval) -> DyadicInterval:
        return DyadicInterval(self.lo + other.lo, self.hi + other.hi,
                              min(self.precision, other.precision))

    def sqrt(self, precision: int) -> DyadicInterval:
        """Outward-rounded sqrt of a nonnegative interval."""
        if self.lo < 0:
            raise ValueError("sqrt of interval with negative part")
        return DyadicInterval(sqrt_floor(self.lo, precision),
                              sqrt_ceil(self.hi, precision), precision)

    def with_precision(self, precision: int) -> DyadicInterval:
        return DyadicInterval(self.lo, self.hi, precision)

    def __float__(self) -> float:
        return float(self.mid)

    def __repr__(self) -> str:
        return f"DyadicInterval([{float(self.lo):.10g}, {float(self.hi):.10g}], p={self.precision})"

    def to_json(self) -> dict:
        return {"lo": format_dyadic(self.lo), "hi": format_dyadic(self.hi),
                "p": self.precision}

    @classmethod
    def from_json(cls, d: dict) -> DyadicInterval:
        return cls(parse_dyadic(d["lo"]), parse_dyadic(d["hi"]), int(d.get("p", 0)))


def norm_enclosure(v, precision: int) -> DyadicInterval:
    """Enclosure of the Euclidean norm of a rational vector."""
    return DyadicInterval.sqrt_of(norm_sq([as_rational(x) for x in v]), precision)


class Ordering(IntEnum):
    LT = -1
    EQ = 0
    GT = 1


def compare_norm(v, q) -> Ordering:
    """Exact three-way comparison of |v| with q >= 0."""
    q = as_rational(q)
    if q < 0:
        raise ValueError("compare_norm needs q >= 0")
    s = norm_sq([as_rational(x) for x in v])
    t = q * q
    return Ordering((s > t) - (s < t))
