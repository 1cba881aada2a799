"""JSON encodings shared by every module.

Rationals are written as ``"num/den"`` strings, matrices as row-major nested
arrays of such strings, and intervals as ``{lo, hi, p}`` with ``m*2^-e``
endpoints.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .exactcore.interval import DyadicInterval, parse_dyadic
from .exactcore.matrix import RatMatrix, as_rational


def fmt_q(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def parse_q(x) -> Fraction:
    if isinstance(x, str) and "*2^" in x:
        return parse_dyadic(x)
    return as_rational(x)


def vector_to_json(v) -> list[str]:
    return [fmt_q(as_rational(x)) for x in v]


def vector_from_json(v) -> tuple[Fraction, ...]:
    return tuple(parse_q(x) for x in v)


def matrix_to_json(m: RatMatrix) -> list[list[str]]:
    return [[fmt_q(x) for x in m.row(i)] for i in range(m.rows)]


def matrix_from_json(rows) -> RatMatrix:
    return RatMatrix.from_rows([[parse_q(x) for x in r] for r in rows])


def interval_to_json(iv: DyadicInterval) -> dict:
    return iv.to_json()


def interval_from_json(d) -> DyadicInterval:
    return DyadicInterval.from_json(d)


def dumps(obj: Any, **kw) -> str:
    """Deterministic JSON (sorted keys, no trailing whitespace)."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":") if kw.pop("compact", False)
                      else (", ", ": "), **kw)
