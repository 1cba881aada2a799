"""Dyadic box counting and log-slope dimension estimates.

Upper box dimension over a finite window of scales stands in for packing
dimension throughout; it is an upper-flavoured proxy, so lower-bound checks
built on it test consistency rather than sharpness.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

from . import _kernels
from .errors import InsufficientScales, PreconditionViolation
from .exactcore import as_vector


@dataclass(frozen=True)
class CountProfile:
    scales: tuple[int, ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        if len(self.scales) != len(self.counts):
            raise ValueError("scales and counts differ in length")

    def window(self, lo: int, hi: int) -> CountProfile:
        pairs = [(r, c) for r, c in zip(self.scales, self.counts) if lo <= r <= hi]
        return CountProfile(tuple(r for r, _ in pairs), tuple(c for _, c in pairs))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r", "N"])
        w.writerows(zip(self.scales, self.counts))
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> CountProfile:
        rows = list(csv.DictReader(io.StringIO(text)))
        return cls(tuple(int(r["r"]) for r in rows), tuple(int(r["N"]) for r in rows))


@dataclass(frozen=True)
class DimEstimate:
    slope: float
    stderr: float
    window: tuple[int, int]
    residual_max: float

    def to_json(self) -> dict:
        return {"slope": self.slope, "stderr": self.stderr, "window": list(self.window),
                "residual_max": self.residual_max}


@dataclass(frozen=True)
class GridSample:
    """Points already snapped to the 2^-exponent grid: cells[i] = floor(x_i * 2^exponent)."""

    cells: np.ndarray
    exponent: int

    def __len__(self) -> int:
        return len(self.cells)


def snap(points: Iterable, exponent: int) -> GridSample:
    """Exact floor(x * 2^exponent) of rational points, as an integer grid sample."""
    rows = []
    for p in points:
        v = as_vector(p)
        rows.append([(x.numerator << exponent) // x.denominator for x in v])
    if not rows:
        raise PreconditionViolation("box counting needs a nonempty point set")
    if max(abs(x) for r in rows for x in r) >= 1 << 62:
        raise PreconditionViolation("coordinates too large for the integer grid")
    return GridSample(np.array(rows, dtype=np.int64), exponent)


def _as_grid(points, exponent: int) -> GridSample:
    if isinstance(points, GridSample):
        if points.exponent < exponent:
            raise PreconditionViolation(
                f"sample snapped at 2^-{points.exponent}, finer scale {exponent} requested")
        return points
    return snap(points, exponent)


def box_count_points(points, r: int) -> int:
    """Number of dyadic cells of side 2^-r meeting the point set."""
    g = _as_grid(points, r)
    return int(_kernels.cell_counts(g.cells, [g.exponent - r])[0])


def count_profile(points, scales: Sequence[int]) -> CountProfile:
    scales = tuple(sorted(int(r) for r in scales))
    g = _as_grid(points, scales[-1])
    shifts = [g.exponent - r for r in scales]
    counts = _kernels.cell_counts(g.cells, shifts)
    return CountProfile(scales, tuple(int(c) for c in counts))


def box_count_planes(planes, net) -> int:
    """Distinct canonical representatives of the planes in the net."""
    from .nets import canonical_index
    return len({canonical_index(net, p) for p in planes})


def estimate_dim(profile: CountProfile, window: tuple[int, int] | None = None) -> DimEstimate:
    """Least-squares slope of log2 N(r) against r over the window."""
    if window is not None:
        profile = profile.window(*window)
    if len(profile.scales) < 3:
        raise InsufficientScales(f"{len(profile.scales)} scales in window, need >= 3")
    x = np.array(profile.scales, dtype=float)
    y = np.log2(np.array(profile.counts, dtype=float))
    fit = stats.linregress(x, y)
    resid = y - (fit.intercept + fit.slope * x)
    return DimEstimate(float(fit.slope), float(fit.stderr),
                       (int(profile.scales[0]), int(profile.scales[-1])),
                       float(np.max(np.abs(resid))))


def unique_rows(cells: np.ndarray) -> np.ndarray:
    """Distinct rows of an integer array (sorted by packed key when it fits in 63 bits)."""
    cells = np.asarray(cells, dtype=np.int64)
    if len(cells) == 0:
        return cells
    lo = cells.min(axis=0)
    span = cells - lo
    bits = max(int(span.max()).bit_length(), 1)
    d = cells.shape[1]
    if bits * d > 63:
        return np.unique(cells, axis=0)
    key = np.zeros(len(cells), dtype=np.int64)
    for j in range(d):
        key = (key << bits) | span[:, j]
    key = np.unique(key)
    mask = (1 << bits) - 1
    out = np.empty((len(key), d), dtype=np.int64)
    for j in range(d - 1, -1, -1):
        out[:, j] = key & mask
        key = key >> bits
    return out + lo


def unit_cube_grid(n: int, side_exponent: int) -> GridSample:
    """All 2^(n*e) lattice points of [0,1)^n with spacing 2^-e."""
    m = 1 << side_exponent
    axes = np.meshgrid(*[np.arange(m, dtype=np.int64)] * n, indexing="ij")
    return GridSample(np.stack([a.ravel() for a in axes], axis=1), side_exponent)


def as_fraction_points(sample: GridSample) -> list[tuple[Fraction, ...]]:
    s = 1 << sample.exponent
    return [tuple(Fraction(int(x), s) for x in row) for row in sample.cells]
