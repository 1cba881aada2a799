"""Affine k-planes P = V + t with t in the orthogonal complement of V.

The translation is stored by its coordinates in a canonical basis of the
complement, which is a function of V alone (see :func:`complement_basis`).
Also here: reconstruction of planes from (approximate) points, points on
planes, the graph parametrisations of lines and hyperplanes, and
hyperplane intersection with a precision-loss report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from typing import Sequence

from .errors import (DegeneratePointSet, DependentSpan, DimensionMismatch,
                     IdenticalPlanes, ParallelPlanes, PreconditionViolation, VerticalHyperplane,
                     VerticalLine)
from .exactcore import (DyadicInterval, RatMatrix, RootIsolator, as_rational, as_vector,
                        char_poly, dot, norm_enclosure, norm_sq, rational_root_multiplicity,
                        sigma_min_nonzero, sqrt_ceil, vadd, vscale, vsub)
from .exactcore.interval import dyadic_ceil
from .grassmann import (METRIC_CONSTANT, GrassPoint, MetricSample, rho,
                        span_to_projection)
from .serialize import vector_from_json, vector_to_json

QUARTER = Fraction(1, 4)
FOUR = Fraction(4)


# --- complement basis ----------------------------------------------------------


@dataclass(frozen=True)
class ComplementBasis:
    vectors: tuple[tuple[Fraction, ...], ...]

    @property
    def matrix(self) -> RatMatrix:
        return RatMatrix.from_columns(self.vectors)

    def combine(self, coords) -> tuple[Fraction, ...]:
        coords = as_vector(coords)
        if len(coords) != len(self.vectors):
            raise DimensionMismatch(f"{len(coords)} coordinates for {len(self.vectors)} vectors")
        n = len(self.vectors[0])
        out = (Fraction(0),) * n
        for c, v in zip(coords, self.vectors):
            out = vadd(out, vscale(c, v))
        return out

    def to_json(self) -> list:
        return [vector_to_json(v) for v in self.vectors]


def gram_at_least(b: RatMatrix, bound: Fraction) -> bool:
    """Exact test that every eigenvalue of b^T b is >= bound."""
    cp = char_poly(b.T @ b)
    iso = RootIsolator(cp)
    at = 1 if rational_root_multiplicity(cp, bound) else 0
    return iso.count_above(bound) + at == len(iso)


def basis_conditions(vectors: Sequence[Sequence[Fraction]]) -> dict:
    """The three checks a complement basis must pass, each decided exactly."""
    vecs = [as_vector(v) for v in vectors]
    b = RatMatrix.from_columns(vecs)
    norms = all(QUARTER <= norm_sq(v) <= FOUR for v in vecs)
    independent = b.rank() == len(vecs)
    sigma = independent and gram_at_least(b, QUARTER)
    return {"norm_window": norms, "independent": independent, "sigma_min": sigma}


def _pow2_rescale(v: tuple[Fraction, ...]) -> tuple[Fraction, ...]:
    """Scale by a power of two so that |v|^2 lands in [1/4, 1)."""
    s = norm_sq(v)
    e = 0
    while s * Fraction(4) ** e < QUARTER:
        e += 1
    while s * Fraction(4) ** e >= 1:
        e -= 1
    return vscale(Fraction(2) ** e, v)


@lru_cache(maxsize=4096)
def _complement_basis(proj: RatMatrix, n: int, k: int) -> ComplementBasis:
    q = RatMatrix.identity(n) - proj
    cols = q.columns()
    best = None
    for subset in combinations(range(n), n - k):
        vecs = [cols[i] for i in subset]
        if all(QUARTER <= norm_sq(v) <= FOUR for v in vecs):
            b = RatMatrix.from_columns(vecs)
            if b.rank() == n - k and gram_at_least(b, QUARTER):
                return ComplementBasis(tuple(vecs))
        if best is None and RatMatrix.from_columns(vecs).rank() == n - k:
            best = vecs
    # Orthogonalise the first spanning subset; orthogonal vectors with norms
    # in [1/2, 1) satisfy all three conditions.
    ortho = []
    for v in best:
        w = v
        for u in ortho:
            w = vsub(w, vscale(dot(w, u) / norm_sq(u), u))
        ortho.append(w)
    return ComplementBasis(tuple(_pow2_rescale(w) for w in ortho))


def complement_basis(v: GrassPoint) -> ComplementBasis:
    """Deterministic basis of the orthogonal complement of V.

    Candidates are the columns e_i - V e_i taken over (n-k)-subsets in
    lexicographic order; the first subset whose vectors have norms in
    [1/2, 2], are independent and have smallest singular value >= 1/2 wins.
    """
    if not 1 <= v.k < v.n:
        raise PreconditionViolation(f"need 1 <= k < n, got n={v.n}, k={v.k}")
    return _complement_basis(v.proj, v.n, v.k)


def complement_projection_via_span(v: GrassPoint) -> GrassPoint:
    """Projection onto the span of the best-conditioned tuple of vectors e_i - V e_i."""
    q = RatMatrix.identity(v.n) - v.proj
    cols = q.columns()
    best, best_lo = None, None
    for subset in combinations(range(v.n), v.n - v.k):
        b = RatMatrix.from_columns([cols[i] for i in subset])
        if b.rank() < v.n - v.k:
            continue
        lo = sigma_min_nonzero(b, 16).lo
        if best_lo is None or lo > best_lo:
            best, best_lo = subset, lo
    return span_to_projection([cols[i] for i in best])


def complement_projection(v: GrassPoint, verify: bool = False) -> GrassPoint:
    """Projection onto the orthogonal complement, I - V."""
    if not 1 <= v.k < v.n:
        raise PreconditionViolation(f"need 1 <= k < n, got n={v.n}, k={v.k}")
    out = GrassPoint(v.n, v.n - v.k, RatMatrix.identity(v.n) - v.proj, check=False)
    if verify and complement_projection_via_span(v).proj != out.proj:
        raise ArithmeticError("complement projections disagree")
    return out


# --- affine planes -------------------------------------------------------------


@dataclass(frozen=True)
class AffinePlane:
    direction: GrassPoint
    coords: tuple[Fraction, ...]
    basis: ComplementBasis = field(compare=False, repr=False)

    @property
    def n(self) -> int:
        return self.direction.n

    @property
    def k(self) -> int:
        return self.direction.k

    @property
    def translation(self) -> tuple[Fraction, ...]:
        return self.basis.combine(self.coords)

    def contains(self, x) -> bool:
        d = vsub(as_vector(x), self.translation)
        return self.direction.apply(d) == d

    def to_json(self) -> dict:
        return {"direction": self.direction.to_json(), "basis": self.basis.to_json(),
                "coords": vector_to_json(self.coords)}

    @classmethod
    def from_json(cls, d) -> AffinePlane:
        v = GrassPoint.from_json(d["direction"])
        return cls(v, vector_from_json(d["coords"]), complement_basis(v))


def make_affine(v: GrassPoint, point) -> AffinePlane:
    """The plane V + point, with its translation expressed in the complement basis."""
    point = as_vector(point)
    if len(point) != v.n:
        raise DimensionMismatch(f"point of length {len(point)} in R^{v.n}")
    basis = complement_basis(v)
    t = vsub(point, v.apply(point))
    b = basis.matrix
    coords = (b.T @ b).solve(b.T.matvec(t))
    return AffinePlane(v, tuple(coords), basis)


def rho_affine(p1: AffinePlane, p2: AffinePlane, precision: int = 20) -> MetricSample:
    """rho(V1, V2) + |t1 - t2|, each part enclosed to half the requested width."""
    if (p1.n, p1.k) != (p2.n, p2.k):
        raise DimensionMismatch(f"A({p1.n},{p1.k}) vs A({p2.n},{p2.k})")
    lin = rho(p1.direction, p2.direction, precision + 1).value
    shift = norm_enclosure(vsub(p1.translation, p2.translation), precision + 1)
    return MetricSample((lin + shift).with_precision(precision), "spectral", precision)


# --- planes from points ----------------------------------------------------------


def plane_from_points(points) -> AffinePlane:
    """The unique k-plane through k+1 affinely independent rational points."""
    pts = [as_vector(p) for p in points]
    if len(pts) < 2:
        raise DegeneratePointSet("need at least two points")
    diffs = [vsub(p, pts[0]) for p in pts[1:]]
    try:
        v = span_to_projection(diffs)
    except DependentSpan as exc:
        raise DegeneratePointSet(str(exc)) from None
    if v.k >= v.n:
        raise DegeneratePointSet(f"{len(pts)} points span all of R^{v.n}")
    return make_affine(v, pts[0])


def _box_centers(boxes, r: int):
    centers = []
    for box in boxes:
        c = []
        for iv in box:
            if not isinstance(iv, DyadicInterval):
                iv = DyadicInterval(*iv)
            if iv.width > Fraction(1, 1 << r):
                raise PreconditionViolation(f"box side {iv.width} wider than 2^-{r}")
            c.append(iv.mid)
        centers.append(tuple(c))
    return centers


def plane_from_boxes(boxes, r: int, constant=METRIC_CONSTANT,
                     precision: int = 24) -> tuple[AffinePlane, DyadicInterval]:
    """Representative plane through the box centers and a certified error bound.

    Each box has sides of length <= 2^-r, so every center is within 2^-r of
    the true point it encloses (for n <= 4).  The bound on the affine
    distance between the true plane and the representative is

        (C n / s + 2 + 2 |p0| C^2 n / s) * 2^-(r-1)

    where s is a certified lower bound for the smallest singular value of the
    true difference vectors and |p0| an upper bound for the first point's norm.
    """
    centers = _box_centers(boxes, r)
    n = len(centers[0])
    k = len(centers) - 1
    if n > 4:
        raise PreconditionViolation("box reconstruction supports n <= 4")
    plane = plane_from_points(centers)
    step = Fraction(1, 1 << r)
    diffs = RatMatrix.from_columns([vsub(c, centers[0]) for c in centers[1:]])
    # each true difference is within 2 * 2^-r of the center difference
    slack = sqrt_ceil(Fraction(k), precision) * 2 * step
    sigma = sigma_min_nonzero(diffs, precision).lo - slack
    if sigma <= 0:
        raise DegeneratePointSet("boxes too coarse to certify independence")
    p0 = norm_enclosure(centers[0], precision).hi + step
    c = Fraction(constant)
    bound = (c * n / sigma + 2 + 2 * p0 * c * c * n / sigma) * 2 * step
    hi = dyadic_ceil(bound, precision + r)
    return plane, DyadicInterval(hi, hi, precision)


@lru_cache(maxsize=4096)
def _best_chart(proj: RatMatrix, n: int, k: int) -> tuple[int, ...]:
    best, best_lo = None, None
    for subset in combinations(range(n), k):
        b = RatMatrix.from_columns([proj.col(i) for i in subset])
        if b.rank() < k:
            continue
        lo = sigma_min_nonzero(b, 16).lo
        if best_lo is None or lo > best_lo:
            best, best_lo = subset, lo
    return best


def chart_of(p: AffinePlane) -> tuple[int, ...]:
    """Coordinate k-subset on which V is best conditioned (ties: lexicographic)."""
    return _best_chart(p.direction.proj, p.n, p.k)


def point_on_plane(p: AffinePlane, coords) -> tuple[Fraction, ...]:
    """V x' + t where x' places ``coords`` on the chart's coordinate axes."""
    coords = as_vector(coords)
    if len(coords) != p.k:
        raise DimensionMismatch(f"{len(coords)} coordinates for a {p.k}-plane")
    x = [Fraction(0)] * p.n
    for i, c in zip(chart_of(p), coords):
        x[i] = c
    return vadd(p.direction.apply(x), p.translation)


# --- parametrisations --------------------------------------------------------------


@dataclass(frozen=True)
class LineParams:
    slopes: tuple[Fraction, ...]
    intercepts: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "slopes", as_vector(self.slopes))
        object.__setattr__(self, "intercepts", as_vector(self.intercepts))
        if len(self.slopes) != len(self.intercepts):
            raise DimensionMismatch("slopes and intercepts differ in length")

    def to_json(self) -> list:
        return vector_to_json(self.slopes + self.intercepts)


@dataclass(frozen=True)
class HyperplaneParams:
    a: tuple[Fraction, ...]
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", as_vector(self.a))
        object.__setattr__(self, "b", as_rational(self.b))

    @property
    def n(self) -> int:
        return len(self.a) + 1

    def to_json(self) -> list:
        return vector_to_json(self.a + (self.b,))

    @classmethod
    def from_json(cls, arr) -> HyperplaneParams:
        v = vector_from_json(arr)
        return cls(v[:-1], v[-1])


def line_to_affine(lp: LineParams) -> AffinePlane:
    """The line x -> (x, a_1 x + b_1, ..., a_{n-1} x + b_{n-1})."""
    p0 = (Fraction(0),) + lp.intercepts
    p1 = (Fraction(1),) + vadd(lp.slopes, lp.intercepts)
    return plane_from_points([p0, p1])


def affine_to_line(p: AffinePlane) -> LineParams:
    if p.k != 1:
        raise DimensionMismatch(f"expected a line, got a {p.k}-plane")
    d = p.direction.proj.col(0)
    if d[0] == 0:
        raise VerticalLine("line is perpendicular to the first axis")
    t = p.translation
    slopes = tuple(x / d[0] for x in d[1:])
    s = t[0] / d[0]
    intercepts = tuple(ti - s * di for ti, di in zip(t[1:], d[1:]))
    return LineParams(slopes, intercepts)


def hyperplane_to_affine(hp: HyperplaneParams) -> AffinePlane:
    """The hyperplane x_n = a . (x_1, ..., x_{n-1}) + b."""
    n = hp.n
    pts = [tuple([Fraction(0)] * (n - 1) + [hp.b])]
    for i, ai in enumerate(hp.a):
        x = [Fraction(0)] * n
        x[i] = Fraction(1)
        x[-1] = ai + hp.b
        pts.append(tuple(x))
    return plane_from_points(pts)


def normal_of(p: AffinePlane) -> tuple[Fraction, ...]:
    """(I - V) e_n, a normal of the hyperplane P (zero iff e_n lies in V)."""
    if p.k != p.n - 1:
        raise DimensionMismatch(f"expected a hyperplane, got a {p.k}-plane in R^{p.n}")
    return complement_projection(p.direction).proj.col(p.n - 1)


def affine_to_hyperplane(p: AffinePlane) -> HyperplaneParams:
    nu = normal_of(p)
    if nu[-1] == 0:
        raise VerticalHyperplane("hyperplane is not a graph over the first n-1 coordinates")
    c = dot(nu, p.translation)
    return HyperplaneParams(tuple(-x / nu[-1] for x in nu[:-1]), c / nu[-1])


# --- intersections -------------------------------------------------------------------


def _hyperplane_normal(p: AffinePlane) -> tuple[Fraction, ...]:
    q = complement_projection(p.direction).proj
    return max(q.columns(), key=norm_sq)


def hyperplane_intersection(p1: AffinePlane, p2: AffinePlane) -> AffinePlane:
    """Exact (n-2)-plane where two non-parallel hyperplanes meet."""
    for p in (p1, p2):
        if p.k != p.n - 1:
            raise DimensionMismatch(f"expected hyperplanes, got a {p.k}-plane in R^{p.n}")
    if p1.n != p2.n:
        raise DimensionMismatch(f"R^{p1.n} vs R^{p2.n}")
    n = p1.n
    nu1, nu2 = _hyperplane_normal(p1), _hyperplane_normal(p2)
    c1, c2 = dot(nu1, p1.translation), dot(nu2, p2.translation)
    normals = RatMatrix.from_rows([nu1, nu2])
    if normals.rank() < 2:
        if p1.translation == p2.translation:
            raise IdenticalPlanes("the hyperplanes coincide")
        raise ParallelPlanes("the hyperplanes are parallel")
    if n < 3:
        raise PreconditionViolation("intersection would be a point (k = 0)")
    s = normals.T.matvec((normals @ normals.T).solve((c1, c2)))
    nproj = span_to_projection([nu1, nu2]).proj
    v = GrassPoint(n, n - 2, RatMatrix.identity(n) - nproj, check=False)
    return make_affine(v, s)


def _graph_system(hps: Sequence[HyperplaneParams]):
    rows = [tuple(h.a) + (Fraction(-1),) for h in hps]
    return RatMatrix.from_rows(rows), tuple(-h.b for h in hps)


def nearest_on_intersection(hps: Sequence[HyperplaneParams], x) -> tuple[Fraction, ...]:
    """Closest point to x on the intersection of graph hyperplanes."""
    nmat, c = _graph_system(hps)
    x = as_vector(x)
    resid = vsub(nmat.matvec(x), c)
    return vsub(x, nmat.T.matvec((nmat @ nmat.T).solve(resid)))


@dataclass(frozen=True)
class IntersectionReport:
    t: int
    r: int
    observed_error: float
    predicted_scale: float
    metric: DyadicInterval
    t_source: str = "metric"

    def to_json(self) -> dict:
        return {"t": self.t, "r": self.r, "observed_error": self.observed_error,
                "predicted_scale": self.predicted_scale, "metric": self.metric.to_json(),
                "t_source": self.t_source}


def intersection_precision_report(hp1: HyperplaneParams, hp2: HyperplaneParams, x_on_both,
                                  r: int, precision: int = 40) -> IntersectionReport:
    """Worst displacement of the nearest intersection point under 2^-r parameter noise.

    Every parameter of both hyperplanes is moved to either end of its
    2^-r interval; the maximum over all corner patterns is reported
    alongside the scale 2^-(r - t), where t = floor(-log2 rho) is read off
    the affine distance of the two hyperplanes (an observational proxy).
    """
    x = as_vector(x_on_both)
    p1, p2 = hyperplane_to_affine(hp1), hyperplane_to_affine(hp2)
    if not (p1.contains(x) and p2.contains(x)):
        raise PreconditionViolation("x is not on both hyperplanes")
    hyperplane_intersection(p1, p2)  # raises on parallel / identical input
    metric = rho_affine(p1, p2, precision).value
    t = math.floor(-math.log2(float(metric.mid)))
    step = Fraction(1, 1 << r)
    m = len(hp1.a) + 1
    worst = Fraction(0)
    for signs in product((-1, 1), repeat=2 * m):
        s1, s2 = signs[:m], signs[m:]
        q1 = HyperplaneParams(vadd(hp1.a, vscale(step, s1[:-1])), hp1.b + s1[-1] * step)
        q2 = HyperplaneParams(vadd(hp2.a, vscale(step, s2[:-1])), hp2.b + s2[-1] * step)
        err = norm_sq(vsub(nearest_on_intersection([q1, q2], x), x))
        worst = max(worst, err)
    observed = float(sqrt_ceil(worst, precision + r))
    return IntersectionReport(t, r, observed, 2.0 ** -(r - t), metric)
