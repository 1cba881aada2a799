"""Fractal generators and bound-check experiments for unions of planes.

Parameter sets and in-plane subsets are digit-restricted self-similar sets,
whose Hausdorff, packing and box dimensions agree, so box counting at a
finite window is an honest proxy on both sides of a bound.  Parameter
dimension t is always measured on the generated parameter vectors, never
assumed from the generator.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import product
from typing import Sequence

import numpy as np

from .affine import (AffinePlane, HyperplaneParams, LineParams, chart_of, hyperplane_to_affine,
                     line_to_affine)
from .dimest import (CountProfile, DimEstimate, GridSample, count_profile, estimate_dim,
                     unique_rows)
from .errors import PreconditionViolation

DEFAULT_TOLERANCE = 0.1
INT64_SAFE = 1 << 62


# --- Cantor sets -----------------------------------------------------------------


@dataclass(frozen=True)
class CantorSpec:
    """Points of [0,1] whose first ``depth`` base-b digits lie in ``digits``."""

    base: int
    digits: tuple[int, ...]
    depth: int

    def __post_init__(self):
        object.__setattr__(self, "digits", tuple(sorted(set(self.digits))))
        if self.base < 2:
            raise PreconditionViolation("base must be >= 2")
        if not self.digits or not all(0 <= d < self.base for d in self.digits):
            raise PreconditionViolation(f"digits {self.digits} not in 0..{self.base - 1}")
        if self.depth < 0:
            raise PreconditionViolation("depth must be >= 0")

    @property
    def target_dim(self) -> float:
        return math.log(len(self.digits)) / math.log(self.base)

    @property
    def denominator(self) -> int:
        return self.base ** self.depth

    def size(self) -> int:
        return len(self.digits) ** self.depth

    def numerators(self, count: int | None = None, seed=0) -> list[int]:
        """Numerators over base^depth; all of them when count is None or large enough."""
        if count is None or count >= self.size():
            vals = [0]
            for _ in range(self.depth):
                vals = [v * self.base + d for v in vals for d in self.digits]
            return vals
        rng = random.Random(f"cantor:{self.base}:{self.digits}:{self.depth}:{seed}")
        out = []
        for _ in range(count):
            v = 0
            for _ in range(self.depth):
                v = v * self.base + rng.choice(self.digits)
            out.append(v)
        return out

    def to_json(self) -> dict:
        return {"base": self.base, "digits": list(self.digits), "depth": self.depth}

    @classmethod
    def from_json(cls, d) -> CantorSpec:
        return cls(int(d["base"]), tuple(int(x) for x in d["digits"]), int(d["depth"]))


def gen_cantor_points(spec: CantorSpec, count: int | None = None, seed=0) -> list[Fraction]:
    """Exact rational Cantor points, deterministic per seed."""
    den = spec.denominator
    return [Fraction(v, den) for v in spec.numerators(count, seed)]


def full_interval(depth: int) -> CantorSpec:
    """All dyadic points j / 2^depth of [0, 1)."""
    return CantorSpec(2, (0, 1), depth)


# --- plane families --------------------------------------------------------------


@dataclass(frozen=True)
class InPlaneSubset:
    """Product set in chart coordinates: coordinate i ranges over specs[i], scaled.

    A spec of None means the full interval, sampled on a dyadic grid whose
    depth is chosen at sampling time.
    """

    specs: tuple[CantorSpec | None, ...]
    scale: Fraction = Fraction(1)

    @property
    def dim(self) -> float:
        return sum(1.0 if s is None else s.target_dim for s in self.specs)

    @property
    def is_full(self) -> bool:
        return all(s is None for s in self.specs)

    def grid(self, full_depth: int) -> tuple[np.ndarray, int]:
        """Integer coordinates and their common denominator."""
        axes = []
        for s in self.specs:
            sp = full_interval(full_depth) if s is None else s
            axes.append((sp.numerators(), sp.denominator))
        den = reduce(math.lcm, (d for _, d in axes), 1)
        num_scale = self.scale.numerator
        den *= self.scale.denominator
        cols = [[v * (den // (d * self.scale.denominator)) * num_scale for v in vals]
                for vals, d in axes]
        big = max((abs(v) for c in cols for v in c), default=0) >= INT64_SAFE
        pts = np.array(list(product(*cols)), dtype=object if big else np.int64)
        return pts.reshape(-1, len(self.specs)), den

    def coords(self, full_depth: int) -> list[tuple[Fraction, ...]]:
        pts, den = self.grid(full_depth)
        return [tuple(Fraction(int(x), den) for x in row) for row in pts]

    def to_json(self):
        return {"specs": [None if s is None else s.to_json() for s in self.specs],
                "scale": f"{self.scale.numerator}/{self.scale.denominator}"}


@dataclass(frozen=True)
class FamilySpec:
    """Graph-parametrised planes: lines (k = 1) or hyperplanes (k = n - 1).

    ``params`` lists one entry per parameter: (a_1..a_{n-1}, b_1..b_{n-1}) for
    lines, (a_1..a_{n-1}, b) for hyperplanes.  Each entry is a CantorSpec or a
    fixed rational.
    """

    n: int
    k: int
    params: tuple
    subset: InPlaneSubset
    subset_kind: str = "hausdorff"

    def __post_init__(self):
        if self.k not in (1, self.n - 1):
            raise PreconditionViolation("only lines and hyperplanes are parametrised")
        if len(self.params) != self.param_count:
            raise PreconditionViolation(f"expected {self.param_count} parameter specs")
        if len(self.subset.specs) != self.k:
            raise PreconditionViolation(f"expected {self.k} in-plane coordinate specs")
        if self.subset_kind not in ("hausdorff", "packing"):
            raise PreconditionViolation(f"unknown subset kind {self.subset_kind!r}")

    @property
    def param_count(self) -> int:
        return 2 * (self.n - 1) if self.k == 1 else self.n

    @property
    def s(self) -> float:
        return self.subset.dim

    def param_values(self, count: int | None, seed) -> list[tuple[Fraction, ...]]:
        sizes = [p.size() if isinstance(p, CantorSpec) else 1 for p in self.params]
        if count is None or count >= math.prod(sizes):
            axes = [[Fraction(v, p.denominator) for v in p.numerators()]
                    if isinstance(p, CantorSpec) else [Fraction(p)] for p in self.params]
            return list(product(*axes))
        # draw digit strings directly; never materialise the full parameter sets
        rng = random.Random(f"family:{self.n}:{self.k}:{seed}")
        out = []
        for _ in range(count):
            vals = []
            for p in self.params:
                if not isinstance(p, CantorSpec):
                    vals.append(Fraction(p))
                    continue
                v = 0
                for _ in range(p.depth):
                    v = v * p.base + rng.choice(p.digits)
                vals.append(Fraction(v, p.denominator))
            out.append(tuple(vals))
        return out

    def plane(self, values: Sequence[Fraction]) -> AffinePlane:
        if self.k == 1:
            m = self.n - 1
            return line_to_affine(LineParams(values[:m], values[m:]))
        return hyperplane_to_affine(HyperplaneParams(values[:-1], values[-1]))

    def with_subset(self, subset: InPlaneSubset) -> FamilySpec:
        return FamilySpec(self.n, self.k, self.params, subset, self.subset_kind)

    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k,
                "params": [p.to_json() if isinstance(p, CantorSpec) else
                           f"{Fraction(p).numerator}/{Fraction(p).denominator}"
                           for p in self.params],
                "subset": self.subset.to_json(), "subset_kind": self.subset_kind}


@dataclass
class PlaneFamily:
    spec: FamilySpec
    params: list[tuple[Fraction, ...]]
    planes: list[AffinePlane]

    def __iter__(self):
        return iter(zip(self.planes, [self.spec.subset] * len(self.planes)))


def gen_plane_family(spec: FamilySpec, count: int | None = None, seed=0) -> PlaneFamily:
    """Planes whose graph parameters are drawn from the parameter specs."""
    values = spec.param_values(count, seed)
    planes = [spec.plane(v) for v in values]
    return PlaneFamily(spec, values, planes)


def param_profile(family: PlaneFamily, scales: Sequence[int]) -> CountProfile:
    return count_profile(family.params, scales)


# --- sampling unions ---------------------------------------------------------------


def plane_cells(plane: AffinePlane, coords: np.ndarray, den: int, r: int) -> np.ndarray:
    """floor(2^r * x) for the points x = V c + t, c = coords / den, exactly."""
    chart = chart_of(plane)
    proj = plane.direction.proj
    t = plane.translation
    w = [[proj[i, j] for j in chart] for i in range(plane.n)]
    big = reduce(math.lcm, [x.denominator for row in w for x in row] +
                 [x.denominator for x in t], 1)
    a = [[int(x * big) for x in row] for row in w]
    b = [int(x * big) * den for x in t]
    scale = big * den
    cmax = int(np.abs(coords).max()) if coords.size else 0
    bound = max(sum(abs(x) for x in row) * cmax + abs(bi) for row, bi in zip(a, b)) << r
    if bound < INT64_SAFE:
        c = coords.astype(np.int64)
        am = np.array(a, dtype=np.int64)
        num = (c @ am.T + np.array(b, dtype=np.int64)) << r
        return num // scale
    c = coords.astype(object)
    num = (c.dot(np.array(a, dtype=object).T) + np.array(b, dtype=object)) * (1 << r)
    return (num // scale).astype(np.int64)


def union_sample(planes: Sequence[AffinePlane], subsets: Sequence[InPlaneSubset],
                 full_depth: int, r: int) -> GridSample:
    """Snapped union of the in-plane subsets (duplicates removed per plane)."""
    merged = np.zeros((0, planes[0].n), dtype=np.int64)
    pending, held = [], 0
    cache = {}
    for p, sub in zip(planes, subsets):
        if sub not in cache:
            cache[sub] = sub.grid(full_depth)
        coords, den = cache[sub]
        pending.append(unique_rows(plane_cells(p, coords, den, r)))
        held += len(pending[-1])
        # merge only when pending rows rival the merged set, keeping memory bounded
        if held > max(4_000_000, len(merged)):
            merged = unique_rows(np.concatenate([merged] + pending))
            pending, held = [], 0
    return GridSample(unique_rows(np.concatenate([merged] + pending)), r)


# --- bounds -----------------------------------------------------------------------


def union_lower_bound(n: int, k: int, s: float, t: float) -> float:
    """s + (t - (k - ceil s)(n - k)) / (ceil s + 1) for Hausdorff-dimension-s pieces."""
    cs = math.ceil(s - 1e-12)
    return s + (t - (k - cs) * (n - k)) / (cs + 1)


def packing_union_lower_bound(n: int, k: int, s: float, t: float) -> float:
    cs = math.ceil(s - 1e-12)
    return max(s, (t - (k - cs) * (n - k)) / (cs + 1))


def hyperplane_union_lower_bound(n: int, t: float) -> float:
    """n - 1 + n t / ((n - 1) t + n) for full-dimensional pieces of hyperplanes."""
    return n - 1 + n * t / ((n - 1) * t + n)


def pick_theorem(spec: FamilySpec) -> str:
    if spec.subset_kind == "packing":
        return "packing_union"
    if spec.n >= 3 and spec.k == spec.n - 1 and abs(spec.s - (spec.n - 1)) < 1e-12:
        return "hyperplane_union"
    return "union"


def bound_for(theorem: str, n: int, k: int, s: float, t: float) -> float:
    if theorem == "union":
        return union_lower_bound(n, k, s, t)
    if theorem == "packing_union":
        return packing_union_lower_bound(n, k, s, t)
    if theorem == "hyperplane_union":
        return hyperplane_union_lower_bound(n, t)
    raise ValueError(f"unknown theorem {theorem!r}")


# --- reports ----------------------------------------------------------------------


@dataclass
class BoundReport:
    experiment_id: str
    measured: DimEstimate
    bound_value: float
    satisfied: bool
    margin: float
    kind: str
    relation: str
    details: dict = field(default_factory=dict)
    profiles: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"id": self.experiment_id, "measured": self.measured.to_json(),
                "bound_value": self.bound_value, "satisfied": self.satisfied,
                "margin": self.margin, "kind": self.kind, "relation": self.relation,
                "details": self.details}


def _lower_report(eid, measured, bound, tol, relation, details, profiles) -> BoundReport:
    margin = measured.slope - bound
    return BoundReport(eid, measured, bound, margin >= -tol, margin, "lower", relation,
                       details, profiles)


def _upper_report(eid, measured, bound, tol, relation, details, profiles) -> BoundReport:
    margin = bound - measured.slope
    return BoundReport(eid, measured, bound, margin >= -tol, margin, "upper", relation,
                       details, profiles)


def _window(scales: Sequence[int], window) -> tuple[int, int]:
    return tuple(window) if window is not None else (min(scales), max(scales))


def measure_t(family: PlaneFamily, param_scales: Sequence[int],
              window=None) -> tuple[DimEstimate, CountProfile]:
    prof = param_profile(family, param_scales)
    if len(set(family.params)) == 1:
        return DimEstimate(0.0, 0.0, _window(param_scales, window), 0.0), prof
    return estimate_dim(prof, _window(param_scales, window)), prof


def union_bound_experiment(spec: FamilySpec, scales: Sequence[int], full_depth: int,
                           param_scales: Sequence[int], seed=0, count: int | None = None,
                           tolerance: float = DEFAULT_TOLERANCE, window=None,
                           experiment_id: str = "union") -> BoundReport:
    """Measure dim of the union of in-plane subsets and compare with the lower bound."""
    if spec.n > 3:
        raise PreconditionViolation("experiments run in dimension n <= 3")
    family = gen_plane_family(spec, count, seed)
    t_est, t_prof = measure_t(family, param_scales)
    t = max(t_est.slope, 0.0)
    theorem = pick_theorem(spec)
    bound = bound_for(theorem, spec.n, spec.k, spec.s, t)
    sample = union_sample(family.planes, [spec.subset] * len(family.planes), full_depth,
                          max(scales))
    prof = count_profile(sample, scales)
    measured = estimate_dim(prof, _window(scales, window))
    details = {"theorem": theorem, "n": spec.n, "k": spec.k, "s": spec.s, "t": t,
               "t_stderr": t_est.stderr, "planes": len(family.planes),
               "points": len(sample), "tolerance": tolerance,
               "note": "box-count proxy: a passing lower-bound check means no counterexample"}
    profiles = {"union": prof, "params": t_prof}
    return _lower_report(experiment_id, measured, bound, tolerance, "dim F >= bound",
                         details, profiles)


EXTENSION_MODES = ("positive_measure", "dim1_lines", "hyperplane_fulldim")


def extension_experiment(base_spec: FamilySpec, mode: str, scales: Sequence[int],
                         full_depth: int, seed=0, count: int | None = None,
                         tolerance: float = DEFAULT_TOLERANCE, window=None,
                         experiment_id: str = "extension") -> BoundReport:
    """Compare dim E (union of in-plane pieces) with dim F (pieces replaced by full planes)."""
    if mode not in EXTENSION_MODES:
        raise ValueError(f"unknown mode {mode!r}")
    spec = base_spec
    k = spec.k
    if mode == "dim1_lines" and k != 1:
        raise PreconditionViolation("dim1_lines needs a line family")
    if mode == "hyperplane_fulldim" and k != spec.n - 1:
        raise PreconditionViolation("hyperplane_fulldim needs a hyperplane family")
    family = gen_plane_family(spec, count, seed)
    full = InPlaneSubset((None,) * k)
    r = max(scales)
    win = _window(scales, window)
    e_sample = union_sample(family.planes, [spec.subset] * len(family.planes), full_depth, r)
    f_sample = union_sample(family.planes, [full] * len(family.planes), full_depth, r)
    e_prof = count_profile(e_sample, scales)
    f_prof = count_profile(f_sample, scales)
    dim_e = estimate_dim(e_prof, win)
    dim_f = estimate_dim(f_prof, win)
    identical = spec.subset == full
    details = {"mode": mode, "n": spec.n, "k": k, "dim_E": dim_e.slope, "dim_F": dim_f.slope,
               "E_equals_F": identical, "planes": len(family.planes), "tolerance": tolerance}
    profiles = {"E": e_prof, "F": f_prof}
    if mode == "hyperplane_fulldim":
        gap = abs(dim_f.slope - dim_e.slope)
        return BoundReport(experiment_id, dim_f, dim_e.slope, gap <= tolerance,
                           tolerance - gap, "equality", "dim F = dim E", details, profiles)
    if identical:
        gap = abs(dim_f.slope - dim_e.slope)
        return BoundReport(experiment_id, dim_f, dim_e.slope, gap <= tolerance,
                           tolerance - gap, "equality", "E = F", details, profiles)
    kk = 1 if mode == "dim1_lines" else k
    bound = 2 * dim_e.slope - kk
    return _upper_report(experiment_id, dim_f, bound, tolerance, f"dim F <= 2 dim E - {kk}",
                         details, profiles)


def cantor_calibration(spec: CantorSpec, scales: Sequence[int], window=None,
                       count: int | None = None, seed=0) -> tuple[DimEstimate, CountProfile]:
    pts = [(x,) for x in gen_cantor_points(spec, count, seed)]
    prof = count_profile(pts, scales)
    return estimate_dim(prof, _window(scales, window)), prof


def calibration_report(experiment_id: str, measured: DimEstimate, target: float,
                       tolerance: float, profile: CountProfile, details=None) -> BoundReport:
    gap = abs(measured.slope - target)
    return BoundReport(experiment_id, measured, target, gap <= tolerance, tolerance - gap,
                       "calibration", "dim = target", dict(details or {}, tolerance=tolerance),
                       {"points": profile})


# --- configured suites --------------------------------------------------------------

SCHEMA_VERSION = 1


def _param_from_json(p):
    if isinstance(p, dict):
        return CantorSpec.from_json(p)
    return Fraction(p)


def subset_from_json(d) -> InPlaneSubset:
    specs = tuple(None if s is None else CantorSpec.from_json(s) for s in d["specs"])
    return InPlaneSubset(specs, Fraction(d.get("scale", "1")))


def family_from_json(d) -> FamilySpec:
    return FamilySpec(int(d["n"]), int(d["k"]), tuple(_param_from_json(p) for p in d["params"]),
                      subset_from_json(d["subset"]), d.get("subset_kind", "hausdorff"))


def _scales(d, key="scales"):
    v = d[key]
    if isinstance(v, dict):
        return list(range(int(v["from"]), int(v["to"]) + 1, int(v.get("step", 1))))
    return [int(x) for x in v]


def run_experiment(cfg: dict, seed=0, tolerance: float = DEFAULT_TOLERANCE) -> BoundReport:
    """Run one configured experiment cell."""
    kind = cfg["type"]
    eid = cfg["id"]
    tol = float(cfg.get("tolerance", tolerance))
    seed = cfg.get("seed", seed)
    window = cfg.get("window")
    count = cfg.get("count")
    if kind == "cantor_calibration":
        spec = CantorSpec.from_json(cfg["cantor"])
        est, prof = cantor_calibration(spec, _scales(cfg), window, count, seed)
        return calibration_report(eid, est, spec.target_dim, tol, prof,
                                  {"cantor": spec.to_json()})
    if kind == "grid_calibration":
        from .dimest import unit_cube_grid
        n, e = int(cfg["n"]), int(cfg["side_exponent"])
        sample = unit_cube_grid(n, e)
        prof = count_profile(sample, _scales(cfg))
        est = estimate_dim(prof, _window(_scales(cfg), window))
        return calibration_report(eid, est, float(n), tol, prof, {"n": n, "points": len(sample)})
    if kind == "union":
        return union_bound_experiment(family_from_json(cfg["family"]), _scales(cfg),
                                      int(cfg["full_depth"]), _scales(cfg, "param_scales"),
                                      seed, count, tol, window, eid)
    if kind == "extension":
        return extension_experiment(family_from_json(cfg["family"]), cfg["mode"], _scales(cfg),
                                    int(cfg["full_depth"]), seed, count, tol, window, eid)
    raise ValueError(f"unknown experiment type {kind!r}")


def validate_config(config: dict) -> None:
    if config.get("schema") != SCHEMA_VERSION:
        raise PreconditionViolation(f"config schema must be {SCHEMA_VERSION}")
    ids = [e["id"] for e in config.get("experiments", [])]
    if len(ids) != len(set(ids)):
        raise PreconditionViolation("experiment ids must be unique")


def run_suite(config: dict, seed=None, tolerance: float | None = None,
              only: Sequence[str] | None = None) -> list[BoundReport]:
    """Run every experiment of a config; reports come back sorted by id."""
    validate_config(config)
    overrides = {}
    if seed is not None:
        overrides["seed"] = seed
    if tolerance is not None:
        overrides["tolerance"] = tolerance
    seed = config.get("seed", 0)
    tol = config.get("tolerance", DEFAULT_TOLERANCE)
    reports = []
    for cfg in config["experiments"]:
        if only and cfg["id"] not in only:
            continue
        # explicit arguments beat both suite-level and per-experiment values
        reports.append(run_experiment(dict(cfg, **overrides), seed, tol))
    return sorted(reports, key=lambda r: r.experiment_id)


def standard_suite() -> dict:
    """The built-in experiment configuration."""
    import json
    from importlib import resources
    text = resources.files("grasscert").joinpath("data/standard_suite.json").read_text()
    return json.loads(text)


def write_reports(reports: Sequence[BoundReport]) -> str:
    """JSON-lines, one report per line, in id order."""
    from .serialize import dumps
    rs = sorted(reports, key=lambda r: r.experiment_id)
    return "".join(dumps(r.to_json(), compact=True) + "\n" for r in rs)


def write_profiles(reports: Sequence[BoundReport], directory) -> list:
    """One CSV per (report, profile name): <id>.<name>.csv."""
    from pathlib import Path
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    written = []
    for r in reports:
        for name, prof in sorted(r.profiles.items()):
            path = d / f"{r.experiment_id}.{name}.csv"
            path.write_text(prof.to_csv())
            written.append(path)
    return written
