"""Linear k-planes in R^n as exact rational orthogonal projections.

A :class:`GrassPoint` stores the projection matrix P of a subspace V.  The two
distances supported are

* ``rho``: the operator norm of P_V - P_W (the sup over unit x of
  |P_V x - P_W x|), and
* ``m_dist``: the largest distance from a unit vector of V to the unit sphere
  of W.

Both are returned as certified :class:`MetricSample` enclosures.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Sequence

from .errors import (DependentSpan, DimensionMismatch, NotAGrassmannPoint,
                     PreconditionViolation)
from .exactcore import (DyadicInterval, Ordering, RatMatrix, RootIsolator, as_vector,
                        char_poly, compare_norm, rational_root_multiplicity, sigma_max,
                        sigma_min_nonzero, sqrt_ceil, sqrt_floor, strip_root, vsub)
from .serialize import matrix_from_json, matrix_to_json

ZERO = Fraction(0)
ONE = Fraction(1)
TWO = Fraction(2)

# Configured equivalence constant between rho and m.  For equal dimensions the
# ratio m/rho never exceeds sqrt(2), so 3/2 is a safe rational stand-in.
METRIC_CONSTANT = Fraction(3, 2)


def is_grassmann(q: RatMatrix, k: int) -> bool:
    """True iff q is symmetric, idempotent and has trace k, exactly."""
    if not q.is_square:
        return False
    return q.trace() == k and q.is_symmetric() and q @ q == q


@dataclass(frozen=True)
class GrassPoint:
    n: int
    k: int
    proj: RatMatrix
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        if self.proj.shape != (self.n, self.n):
            raise DimensionMismatch(f"projection of shape {self.proj.shape} for n={self.n}")
        if self.check and not is_grassmann(self.proj, self.k):
            raise NotAGrassmannPoint(f"matrix is not a rank-{self.k} orthogonal projection")

    def __hash__(self) -> int:
        return hash((self.n, self.k, self.proj))

    @classmethod
    def from_matrix(cls, q: RatMatrix, k: int | None = None) -> GrassPoint:
        if k is None:
            k = q.trace()
            if k.denominator != 1:
                raise NotAGrassmannPoint(f"trace {k} is not an integer")
            k = int(k)
        return cls(q.rows, k, q)

    def apply(self, x) -> tuple[Fraction, ...]:
        return self.proj.matvec(x)

    def complement_matrix(self) -> RatMatrix:
        return RatMatrix.identity(self.n) - self.proj

    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k, "proj": matrix_to_json(self.proj)}

    @classmethod
    def from_json(cls, d) -> GrassPoint:
        if isinstance(d, list):
            return cls.from_matrix(matrix_from_json(d))
        return cls(int(d["n"]), int(d["k"]), matrix_from_json(d["proj"]))


@dataclass(frozen=True)
class MetricSample:
    value: DyadicInterval
    method: str
    precision: int

    def __post_init__(self):
        if self.value.width > Fraction(2) ** -self.precision:
            raise ValueError("metric enclosure wider than its precision")

    @property
    def lo(self) -> Fraction:
        return self.value.lo

    @property
    def hi(self) -> Fraction:
        return self.value.hi

    def to_json(self) -> dict:
        return {"value": self.value.to_json(), "method": self.method,
                "precision": self.precision}

    @classmethod
    def from_json(cls, d) -> MetricSample:
        return cls(DyadicInterval.from_json(d["value"]), d["method"], int(d["precision"]))


# --- construction -----------------------------------------------------------


def span_to_projection(basis: Sequence[Sequence]) -> GrassPoint:
    """Projection A (A^T A)^{-1} A^T onto the span of independent rational vectors."""
    vecs = [as_vector(v) for v in basis]
    if not vecs:
        raise DependentSpan("empty basis")
    a = RatMatrix.from_columns(vecs)
    if a.rank() < len(vecs):
        raise DependentSpan(f"{len(vecs)} vectors span a space of rank {a.rank()}")
    p = a @ (a.T @ a).inverse() @ a.T
    return GrassPoint(a.rows, len(vecs), p, check=False)


def rational_grassmann_sample(n: int, k: int, seed, max_num: int = 8,
                              max_den: int = 8) -> GrassPoint:
    """Pseudo-random rational k-plane: a random small-height rational basis, projected."""
    if not 1 <= k < n:
        raise PreconditionViolation(f"need 1 <= k < n, got n={n}, k={k}")
    rng = random.Random(f"grass:{n}:{k}:{seed}")
    while True:
        basis = [[Fraction(rng.randint(-max_num, max_num), rng.randint(1, max_den))
                  for _ in range(n)] for _ in range(k)]
        if RatMatrix.from_columns(basis).rank() == k:
            return span_to_projection(basis)


def _same_n(v: GrassPoint, w: GrassPoint) -> None:
    if v.n != w.n:
        raise DimensionMismatch(f"ambient dimensions {v.n} and {w.n}")


def _same_nk(v: GrassPoint, w: GrassPoint) -> None:
    _same_n(v, w)
    if v.k != w.k:
        raise DimensionMismatch(f"subspace dimensions {v.k} and {w.k}")


# --- rho ---------------------------------------------------------------------


def rho(v: GrassPoint, w: GrassPoint, precision: int = 20,
        method: str = "spectral") -> MetricSample:
    """Enclosure of ||P_V - P_W||, width <= 2^-precision."""
    _same_nk(v, w)
    if method == "spectral":
        val = _rho_spectral(v.proj, w.proj, precision)
    elif method == "grid":
        val = rho_grid(v.proj - w.proj, precision)
    else:
        raise ValueError(f"unknown method {method!r}")
    return MetricSample(val, method, precision)


@lru_cache(maxsize=4096)
def _rho_spectral(p1: RatMatrix, p2: RatMatrix, precision: int) -> DyadicInterval:
    return sigma_max(p1 - p2, precision)


def rho_compare(v: GrassPoint, w: GrassPoint, q) -> Ordering:
    """Exact comparison of rho(v, w) with the rational q >= 0."""
    _same_nk(v, w)
    return spectral_norm_compare(v.proj - w.proj, Fraction(q))


def spectral_norm_compare(d: RatMatrix, q: Fraction) -> Ordering:
    """Exact comparison of the operator norm of the symmetric matrix d with q >= 0."""
    s = d @ d
    q2 = q * q
    fro = s.trace()
    if fro < q2:
        return Ordering.LT
    if fro > min(d.rows, d.rank()) * q2:
        return Ordering.GT
    iso = RootIsolator(char_poly(s))
    if iso.count_above(q2):
        return Ordering.GT
    return Ordering.EQ if iso.p(q2) == 0 else Ordering.LT


def _sqrt_up(x: Fraction, e: int) -> Fraction:
    return sqrt_ceil(x, e) if x > 0 else ZERO


def rho_grid(d: RatMatrix, precision: int, max_cells: int = 500_000) -> DyadicInterval:
    """Branch-and-bound over dyadic near-unit vectors for the norm of symmetric d.

    Unit directions are parametrised by the faces x_i = 1 of the cube
    [-1, 1]^n (antipodal symmetry covers the rest).  Each dyadic cell is
    scored at its center c: the Rayleigh value g = c'Sc/|c|^2 with S = d^2
    is a certified lower bound, and g + 2*dist*|grad| + dist^2*(tr S - g)
    bounds every unit vector in the cell's cone from above.
    """
    n = d.rows
    s = d @ d
    lip = s.trace()
    e = precision + 4
    tol = Fraction(1, 1 << precision)
    if lip == 0:
        return DyadicInterval.point(0, precision)
    den = 1
    for x in s.entries:
        den = den * x.denominator // gcd(den, x.denominator)
    rows = [[int(x * den) for x in s.row(i)] for i in range(n)]
    root_free = sqrt_ceil(Fraction(n - 1), 8)

    # cells are integer centers at exponent lvl: c = cint / 2^lvl, half-width 2^-lvl
    def score(cint, lvl):
        sc = [sum(r[j] * cint[j] for j in range(n)) for r in rows]
        cc = sum(x * x for x in cint)
        num = sum(a * b for a, b in zip(cint, sc))
        g = Fraction(num, cc * den)
        h2 = Fraction(sum(x * x for x in sc) * cc - num * num, cc * cc * den * den)
        dist = min(2 * root_free / (1 << lvl), TWO)
        upper = g + 2 * dist * _sqrt_up(h2, e) + dist * dist * (lip - g)
        return g, upper

    best = ZERO
    heap = []
    counter = 0
    for i in range(n):
        c = tuple(1 if j == i else 0 for j in range(n))
        g, up = score(c, 0)
        best = max(best, g)
        heapq.heappush(heap, (-up, counter, i, c, 0))
        counter += 1
    free_offsets = _sign_patterns(n - 1)
    while True:
        upper = max(-heap[0][0], best) if heap else best
        lo = sqrt_floor(best, e)
        hi = sqrt_ceil(upper, e)
        if hi - lo <= tol:
            return DyadicInterval(lo, hi, precision)
        if counter > max_cells:
            raise RuntimeError("grid refinement budget exceeded")
        _, _, i, c, lvl = heapq.heappop(heap)
        free = [j for j in range(n) if j != i]
        base = [2 * x for x in c]
        for signs in free_offsets:
            child = list(base)
            for j, sg in zip(free, signs):
                child[j] += sg
            child = tuple(child)
            g, up = score(child, lvl + 1)
            if g > best:
                best = g
            if up >= best:
                heapq.heappush(heap, (-up, counter, i, child, lvl + 1))
            counter += 1


@lru_cache(maxsize=None)
def _sign_patterns(m: int) -> tuple[tuple[int, ...], ...]:
    out = [()]
    for _ in range(m):
        out = [p + (s,) for p in out for s in (-1, 1)]
    return tuple(out)


# --- maximum distance m ------------------------------------------------------


def m_dist(v: GrassPoint, w: GrassPoint, precision: int = 20) -> MetricSample:
    """Enclosure of sup over unit v1 in V of the distance to W's unit sphere.

    For unit v1 the nearest unit vector of W is at squared distance
    2 - 2|P_W v1|, so m = sqrt(2 - 2 s) where s is the smallest singular
    value of P_W restricted to V.  Its square is the smallest root of
    det(x I - P_V P_W P_V) / x^(n - k_V).
    """
    _same_n(v, w)
    return MetricSample(_m_enclosure(v.proj, w.proj, v.n, v.k, precision), "spectral",
                        precision)


@lru_cache(maxsize=4096)
def _m_enclosure(p1: RatMatrix, p2: RatMatrix, n: int, k1: int,
                 precision: int) -> DyadicInterval:
    cp = char_poly(p1 @ p2 @ p1)
    reduced = strip_root(cp, 0, n - k1)
    if rational_root_multiplicity(reduced, 1) == k1:
        return DyadicInterval.point(0, precision)
    if reduced(0) == 0:
        return DyadicInterval.sqrt_of(2, precision)
    iso = RootIsolator(reduced)
    q = 2 * precision + 4
    target = Fraction(1, 1 << precision)
    while True:
        lam = iso.refine(0, q)
        s_lo = sqrt_floor(lam.lo, q)
        s_hi = min(sqrt_ceil(lam.hi, q), ONE)
        lo = sqrt_floor(max(TWO - 2 * s_hi, ZERO), precision + 2)
        hi = sqrt_ceil(TWO - 2 * s_lo, precision + 2)
        if hi - lo <= target:
            return DyadicInterval(lo, hi, precision)
        q *= 2


# --- perturbation bound ------------------------------------------------------


def perturbation_bound_check(basis, perturbed_basis, eps, max_precision: int = 256) -> bool:
    """Certify m(V, V') <= n * eps / sigma for perturbed spanning vectors.

    sigma is the smallest nonzero singular value of the column matrix of
    ``basis``.  Returns True only when the inequality is certified.
    """
    eps = Fraction(eps)
    basis = [as_vector(b) for b in basis]
    perturbed = [as_vector(b) for b in perturbed_basis]
    if len(basis) != len(perturbed):
        raise PreconditionViolation("bases of different sizes")
    for b, bp in zip(basis, perturbed):
        if compare_norm(vsub(b, bp), eps) is not Ordering.LT:
            raise PreconditionViolation("perturbation not strictly smaller than eps")
    v = span_to_projection(basis)
    vp = span_to_projection(perturbed)
    n = v.n
    p = 16
    while p <= max_precision:
        sig = sigma_min_nonzero(RatMatrix.from_columns(basis), p)
        m = m_dist(v, vp, p).value
        if m.hi * sig.hi <= n * eps:
            return True
        if sig.lo > 0 and m.lo * sig.lo > n * eps:
            return False
        p *= 2
    return False


def estimate_metric_constant(n: int, k: int, pairs: int, seed=0,
                             precision: int = 24) -> Fraction:
    """Largest certified ratio rho/m or m/rho over random rational pairs."""
    worst = ZERO
    for i in range(pairs):
        v = rational_grassmann_sample(n, k, (seed, i, 0))
        w = rational_grassmann_sample(n, k, (seed, i, 1))
        r = rho(v, w, precision).value
        m = m_dist(v, w, precision).value
        if r.lo > 0 and m.lo > 0:
            worst = max(worst, r.hi / m.lo, m.hi / r.lo)
    return worst
