"""Greedy separated covering nets on G(n,k) and bounded regions of A(n,k).

A net at scale r has pairwise distances >= 2^-(r+1) (certified) and covers
an audit sample of probe points within 2^-r (certified per probe; the
sample itself is statistical, not a proof of covering).

Distances are screened in floating point first.  For two projections of
equal rank k the operator norm of their difference lies between
F / sqrt(2k) and F / sqrt(2), where F is the Frobenius distance, so a float
value of F^2 decides most comparisons outright; the float error in F^2 for
n <= 4 with entries in [-1, 1] is far below ``FLOAT_MARGIN``.  Anything in
the ambiguous band is decided exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Iterator

import numpy as np
from scipy.stats import qmc

from . import _kernels
from .affine import AffinePlane, complement_basis, rho_affine
from .errors import BudgetExhausted, DimensionMismatch, NotCovered, PreconditionViolation
from .exactcore import Ordering
from .grassmann import GrassPoint, rho, spectral_norm_compare, span_to_projection
from .serialize import fmt_q

FLOAT_MARGIN = 1e-9
AUDIT_PROBES = 1000
AUDIT_SEED = 20240917
MAX_EXACT_PRECISION = 96


@dataclass(frozen=True)
class Space:
    """G(n,k), or A(n,k) with complement coordinates restricted to [0,1]^(n-k)."""

    kind: str
    n: int
    k: int

    def __post_init__(self):
        if self.kind not in ("G", "A"):
            raise ValueError(f"unknown space kind {self.kind!r}")
        if not 1 <= self.k < self.n:
            raise PreconditionViolation(f"need 1 <= k < n, got n={self.n}, k={self.k}")
        if self.n > 4:
            raise PreconditionViolation("nets are supported for n <= 4")

    @property
    def affine(self) -> bool:
        return self.kind == "A"

    def label(self) -> str:
        return f"{self.kind}({self.n},{self.k})"

    def to_json(self) -> dict:
        d = {"kind": self.kind, "n": self.n, "k": self.k}
        if self.affine:
            d["region"] = [[0, 1]] * (self.n - self.k)
        return d

    @classmethod
    def parse(cls, text: str) -> Space:
        kind, rest = text.strip()[0].upper(), text.strip()[1:]
        n, k = (int(x) for x in rest.strip("() ").split(","))
        return cls(kind, n, k)


# --- float images of exact elements ---------------------------------------------------


def _as_plane(x):
    if isinstance(x, AffinePlane):
        return x.direction, x.translation
    return x, None


def _float_image(x) -> tuple[np.ndarray, np.ndarray | None]:
    v, t = _as_plane(x)
    p = np.array([float(e) for e in v.proj.entries])
    return p, (None if t is None else np.array([float(e) for e in t]))


def _float_bounds(fsq, tsq, k: int):
    """Certified lower / upper bounds of the distance from float squared norms."""
    lo = np.sqrt(np.maximum(fsq - FLOAT_MARGIN, 0.0) / (2 * k))
    hi = np.sqrt(fsq / 2 + FLOAT_MARGIN)
    if tsq is not None:
        lo = lo + np.sqrt(np.maximum(tsq - FLOAT_MARGIN, 0.0))
        hi = hi + np.sqrt(tsq + FLOAT_MARGIN)
    return lo - 1e-12, hi + 1e-12


def exact_compare(x, y, q: Fraction) -> Ordering | None:
    """Compare the distance of x and y with q; None if undecided (affine ties)."""
    vx, tx = _as_plane(x)
    vy, ty = _as_plane(y)
    if tx is None:
        return spectral_norm_compare(vx.proj - vy.proj, q)
    p = 16
    while p <= MAX_EXACT_PRECISION:
        d = rho_affine(x, y, p).value
        if d.hi < q:
            return Ordering.LT
        if d.lo > q:
            return Ordering.GT
        if d.is_exact and d.lo == q:
            return Ordering.EQ
        p *= 2
    return None


def distance(x, y, precision: int = 24):
    if isinstance(x, AffinePlane):
        return rho_affine(x, y, precision)
    return rho(x, y, precision)


# --- candidate and probe generation -----------------------------------------------------


def chart_plane(n: int, k: int, chart: tuple[int, ...], entries) -> GrassPoint:
    """Column span of the matrix that is the identity on rows ``chart`` and
    ``entries`` (row-major, (n-k) x k) on the remaining rows."""
    others = [i for i in range(n) if i not in chart]
    cols = []
    for j in range(k):
        col = [Fraction(0)] * n
        col[chart[j]] = Fraction(1)
        for a, i in enumerate(others):
            col[i] = entries[a * k + j]
        cols.append(col)
    return span_to_projection(cols)


def _dyadic_grid(depth: int, lo: int, hi: int) -> list[Fraction]:
    """All values j / 2^depth in [lo, hi]."""
    scale = 1 << depth
    return [Fraction(j, scale) for j in range(lo * scale, hi * scale + 1)]


def _new_at_depth(vals: tuple[Fraction, ...], depth: int) -> bool:
    return depth == 0 or any(v.denominator == 1 << depth for v in vals)


def candidates(space: Space, depth: int) -> Iterator:
    """Elements whose dyadic parameters first appear at ``depth``.

    Directions are graph charts with entries in [-1, 1]; translations (for
    A(n,k)) are complement coordinates in [0, 1].  Order: chart, then
    entries lexicographic, then translation coordinates lexicographic.
    """
    n, k = space.n, space.k
    ent = _dyadic_grid(depth, -1, 1)
    charts = list(combinations(range(n), k))
    m = (n - k) * k
    if not space.affine:
        for chart in charts:
            for e in product(ent, repeat=m):
                if _new_at_depth(e, depth):
                    yield chart_plane(n, k, chart, e)
        return
    tr = _dyadic_grid(depth, 0, 1)
    for chart in charts:
        for e in product(ent, repeat=m):
            v = None
            for c in product(tr, repeat=n - k):
                if _new_at_depth(e + c, depth):
                    if v is None:
                        v = chart_plane(n, k, chart, e)
                    basis = complement_basis(v)
                    yield AffinePlane(v, c, basis)


def audit_probes(space: Space, count: int = AUDIT_PROBES, seed: int = AUDIT_SEED) -> list:
    """Fixed quasi-random probe elements (scrambled Halton, exact dyadic values)."""
    n, k = space.n, space.k
    m = (n - k) * k
    dim = 1 + m + (n - k if space.affine else 0)
    pts = qmc.Halton(d=dim, scramble=True, seed=seed).random(count)
    charts = list(combinations(range(n), k))
    out = []
    for row in pts:
        vals = [Fraction(math.floor(x * (1 << 30)), 1 << 30) for x in row]
        chart = charts[min(int(row[0] * len(charts)), len(charts) - 1)]
        entries = tuple(2 * x - 1 for x in vals[1:1 + m])
        v = chart_plane(n, k, chart, entries)
        if space.affine:
            out.append(AffinePlane(v, tuple(vals[1 + m:]), complement_basis(v)))
        else:
            out.append(v)
    return out


# --- nets -------------------------------------------------------------------------


@dataclass
class Net:
    space: Space
    r: int
    elements: list = field(default_factory=list)
    audit: dict = field(default_factory=dict)
    _proj: list = field(default_factory=list, repr=False)
    _trans: list = field(default_factory=list, repr=False)

    @property
    def separation(self) -> Fraction:
        return Fraction(1, 1 << (self.r + 1))

    @property
    def cover_radius(self) -> Fraction:
        return Fraction(1, 1 << self.r)

    def __len__(self) -> int:
        return len(self.elements)

    def _add(self, x) -> None:
        p, t = _float_image(x)
        self.elements.append(x)
        self._proj.append(p)
        if t is not None:
            self._trans.append(t)

    def arrays(self):
        proj = np.array(self._proj) if self._proj else np.zeros((0, self.space.n ** 2))
        trans = None
        if self.space.affine:
            trans = np.array(self._trans) if self._trans else np.zeros((0, self.space.n - self.space.k))
        return proj, trans

    def bounds_to(self, x):
        """Float-certified lower/upper distance bounds from x to every element."""
        p, t = _float_image(x)
        proj, trans = self.arrays()
        fsq = _kernels.sq_dists(proj, p)
        tsq = None
        if trans is not None:
            tsq = _kernels.sq_dists(trans, t) if len(trans) else np.zeros(0)
        return _float_bounds(fsq, tsq, self.space.k)

    def to_json(self) -> dict:
        return {"space": self.space.to_json(), "r": self.r,
                "separation": fmt_q(self.separation),
                "elements": [e.to_json() for e in self.elements],
                "audit": dict(self.audit)}


def _accepts(net: Net, x, sep: Fraction) -> bool:
    """True iff x is certified at distance >= sep from every element of net."""
    if not net.elements:
        return True
    q = float(sep)
    if not net.space.affine:
        # fast reject: some element is certainly closer than sep
        thr = 2 * (q - 1e-12) ** 2 - 2 * FLOAT_MARGIN
        proj, _ = net.arrays()
        if thr > 0 and _kernels.first_within(proj, _float_image(x)[0], thr) >= 0:
            return False
    lo, hi = net.bounds_to(x)
    if np.any(hi < q):
        return False
    for i in np.flatnonzero(lo < q):
        if exact_compare(x, net.elements[int(i)], sep) in (Ordering.LT, None):
            return False
    return True


def _first_cover(net: Net, x, radius: Fraction):
    """Index of the first element certified within ``radius`` of x, else None."""
    if not net.elements:
        return None
    lo, hi = net.bounds_to(x)
    q = float(radius)
    for i in np.flatnonzero(lo <= q):
        i = int(i)
        if hi[i] <= q:
            return i
        if exact_compare(x, net.elements[i], radius) in (Ordering.LT, Ordering.EQ):
            return i
    return None


def run_audit(net: Net, probes) -> dict:
    covered = 0
    worst = 0.0
    for x in probes:
        i = _first_cover(net, x, net.cover_radius)
        if i is None:
            continue
        covered += 1
        _, hi = net.bounds_to(x)
        d = min(float(hi[i]), float(distance(x, net.elements[i], 30).hi))
        worst = max(worst, d)
    return {"probes": len(probes), "covered": covered, "max_rep_distance": worst,
            "certificate": "statistical"}


def build_net(space: Space, r: int, candidate_budget: int = 200_000,
              max_depth: int | None = None, probes: int = AUDIT_PROBES,
              audit_seed: int = AUDIT_SEED) -> Net:
    """Greedy net at scale r over depth-ordered dyadic candidates.

    After each depth the audit probes are checked; the net is returned once
    all of them are covered within 2^-r.
    """
    if r < 1:
        raise PreconditionViolation("scale r must be >= 1")
    net = Net(space, r)
    sample = audit_probes(space, probes, audit_seed)
    seen = 0
    depth = 0
    if max_depth is None:
        max_depth = r + 6
    while depth <= max_depth:
        for x in candidates(space, depth):
            seen += 1
            if seen > candidate_budget:
                raise BudgetExhausted(f"{space.label()} r={r}: {candidate_budget} candidates "
                                      f"examined without a covering certificate")
            if _accepts(net, x, net.separation):
                net._add(x)
        audit = run_audit(net, sample)
        audit["depth"] = depth
        audit["candidates"] = seen
        net.audit = audit
        if audit["covered"] == audit["probes"]:
            return net
        depth += 1
    raise BudgetExhausted(f"{space.label()} r={r}: depth {max_depth} reached without covering")


# --- counts and representatives -------------------------------------------------------


@dataclass(frozen=True)
class BallCount:
    center: object = field(repr=False)
    l: int
    count: int
    upper: int

    @property
    def ambiguous(self) -> int:
        return self.upper - self.count


def ball_count(net: Net, x, l: int) -> BallCount:
    """Net elements within 2^-(r-l) of x (certified count and upper variant)."""
    if net.r - l < 1:
        raise PreconditionViolation("need r - l >= 1")
    radius = Fraction(1, 1 << (net.r - l))
    lo, hi = net.bounds_to(x)
    q = float(radius)
    sure = int(np.count_nonzero(hi <= q))
    maybe = 0
    for i in np.flatnonzero((lo <= q) & (hi > q)):
        c = exact_compare(x, net.elements[int(i)], radius)
        if c is None:
            maybe += 1
        elif c is not Ordering.GT:
            sure += 1
    return BallCount(x, l, sure, sure + maybe)


def canonical_rep(net: Net, x):
    """First element of the net (insertion order) within 2^-r of x."""
    i = _first_cover(net, x, net.cover_radius)
    if i is None:
        raise NotCovered(f"no element of the {net.space.label()} net within 2^-{net.r}")
    return net.elements[i]


def canonical_index(net: Net, x) -> int:
    i = _first_cover(net, x, net.cover_radius)
    if i is None:
        raise NotCovered(f"no element of the {net.space.label()} net within 2^-{net.r}")
    return i


def check_separation(net: Net) -> tuple[int, int]:
    """(pairs checked, pairs violating) for the certified separation property."""
    sep = net.separation
    bad = 0
    pairs = 0
    proj, trans = net.arrays()
    for i, x in enumerate(net.elements[1:], start=1):
        p, t = _float_image(x)
        fsq = _kernels.sq_dists(proj[:i], p)
        tsq = None if trans is None else _kernels.sq_dists(trans[:i], t)
        lo, _ = _float_bounds(fsq, tsq, net.space.k)
        pairs += i
        for j in np.flatnonzero(lo < float(sep)):
            if exact_compare(x, net.elements[int(j)], sep) in (Ordering.LT, None):
                bad += 1
    return pairs, bad


def element_from_json(space: Space, d):
    if space.affine:
        return AffinePlane.from_json(d)
    return GrassPoint.from_json(d)


def net_from_json(d) -> Net:
    sp = d["space"]
    space = Space(sp["kind"], int(sp["n"]), int(sp["k"]))
    net = Net(space, int(d["r"]))
    for e in d["elements"]:
        net._add(element_from_json(space, e))
    net.audit = dict(d.get("audit", {}))
    return net


def same_space(space: Space, x) -> None:
    v, t = _as_plane(x)
    if (v.n, v.k) != (space.n, space.k) or (t is None) == space.affine:
        raise DimensionMismatch(f"element does not belong to {space.label()}")
