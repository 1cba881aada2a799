"""Command-line entry point: ``grasscert <command> [options]``.

Structured inputs are JSON, given inline or as ``@path``.  Exit codes:
0 success, 1 usage or input error, 2 domain error, 3 an unsatisfied report.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .errors import GrassError
from .serialize import dumps, vector_from_json

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_UNSATISFIED = 0, 1, 2, 3
PRECISION_ENV = "GRASSCERT_PRECISION"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def default_precision() -> int:
    raw = os.environ.get(PRECISION_ENV, "20")
    try:
        p = int(raw)
    except ValueError:
        raise UsageError(f"{PRECISION_ENV}={raw!r} is not an integer") from None
    if p < 1:
        raise UsageError(f"{PRECISION_ENV} must be >= 1")
    return p


def load_json(arg: str):
    """Inline JSON, or the contents of a file when prefixed with '@'."""
    try:
        if arg.startswith("@"):
            return json.loads(Path(arg[1:]).read_text())
        return json.loads(arg)
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"cannot read JSON from {arg[:40]!r}: {e}") from None


def parse_range(text: str) -> list[int]:
    """'3:9' -> 3..9 inclusive, '2:10:2' with a step, or a comma list."""
    try:
        if ":" in text:
            parts = [int(x) for x in text.split(":")]
            step = parts[2] if len(parts) > 2 else 1
            return list(range(parts[0], parts[1] + 1, step))
        return [int(x) for x in text.split(",")]
    except (ValueError, IndexError):
        raise UsageError(f"bad scale range {text!r}") from None


def parse_window(text: str | None):
    if text is None:
        return None
    vals = parse_range(text)
    if len(vals) < 2:
        raise UsageError(f"bad window {text!r}")
    return (vals[0], vals[-1])


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _element(space_kind: str, d):
    from .affine import AffinePlane
    from .grassmann import GrassPoint
    return AffinePlane.from_json(d) if space_kind == "A" else GrassPoint.from_json(d)


# --- commands ---------------------------------------------------------------------


def cmd_metric(args) -> int:
    from .affine import rho_affine
    from .grassmann import m_dist, rho
    a, b = _element(args.space, load_json(args.a)), _element(args.space, load_json(args.b))
    if args.space == "A":
        if args.method != "spectral":
            raise UsageError("the affine metric only has the spectral method")
        sample = rho_affine(a, b, args.precision)
    elif args.method == "m":
        sample = m_dist(a, b, args.precision)
    else:
        sample = rho(a, b, args.precision, method=args.method)
    _emit(dumps(sample.to_json()), args.out)
    return EXIT_OK


def cmd_fit_plane(args) -> int:
    from .affine import plane_from_boxes, plane_from_points
    data = load_json(args.points)
    if args.r is None:
        plane = plane_from_points([vector_from_json(p) for p in data])
        _emit(dumps(plane.to_json()), args.out)
        return EXIT_OK
    boxes = [[vector_from_json(iv) for iv in box] for box in data]
    plane, bound = plane_from_boxes(boxes, args.r, precision=args.precision)
    _emit(dumps({"plane": plane.to_json(), "bound": bound.to_json()}), args.out)
    return EXIT_OK


def _hyperplane(d):
    from .affine import AffinePlane, HyperplaneParams, hyperplane_to_affine
    if isinstance(d, list):
        return hyperplane_to_affine(HyperplaneParams.from_json(d))
    return AffinePlane.from_json(d)


def cmd_intersect(args) -> int:
    from .affine import hyperplane_intersection
    p = hyperplane_intersection(_hyperplane(load_json(args.a)), _hyperplane(load_json(args.b)))
    _emit(dumps(p.to_json()), args.out)
    return EXIT_OK


def cmd_net(args) -> int:
    from .nets import Space, build_net
    try:
        space = Space.parse(args.space)
    except ValueError as e:
        if isinstance(e, GrassError):
            raise
        raise UsageError(f"bad space {args.space!r}") from None
    net = build_net(space, args.r, candidate_budget=args.budget, probes=args.probes,
                    audit_seed=args.seed)
    _emit(dumps(net.to_json()), args.out)
    return EXIT_OK


def cmd_dim(args) -> int:
    from .dimest import CountProfile, count_profile, estimate_dim
    scales = parse_range(args.scales)
    data = load_json(args.input)
    if args.planes:
        from .dimest import box_count_planes
        from .nets import Space, build_net
        space = Space.parse(args.planes)
        planes = [_element(space.kind, d) for d in data]
        counts = tuple(box_count_planes(planes, build_net(space, r)) for r in scales)
        prof = CountProfile(tuple(scales), counts)
    else:
        prof = count_profile([vector_from_json(p) for p in data], scales)
    est = estimate_dim(prof, parse_window(args.window))
    if args.profile:
        Path(args.profile).write_text(prof.to_csv())
    _emit(dumps(est.to_json()), args.out)
    return EXIT_OK


def cmd_experiment(args) -> int:
    from .experiments import run_suite, standard_suite, write_profiles, write_reports
    config = standard_suite() if args.config in (None, "standard") else load_json("@" + args.config)
    if not isinstance(config, dict):
        raise UsageError("experiment config must be a JSON object")
    only = args.only.split(",") if args.only else None
    reports = run_suite(config, seed=args.seed, tolerance=args.tolerance, only=only)
    text = write_reports(reports)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.profiles:
        write_profiles(reports, args.profiles)
    return EXIT_OK if all(r.satisfied for r in reports) else EXIT_UNSATISFIED


# --- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="grasscert", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def common(sp, precision=True):
        sp.add_argument("-o", "--out", help="output file (default stdout)")
        if precision:
            sp.add_argument("-p", "--precision", type=int, default=None,
                            help=f"bits of precision (default ${PRECISION_ENV} or 20)")

    m = sub.add_parser("metric", help="distance between two planes")
    m.add_argument("--space", choices=("G", "A"), default="G")
    m.add_argument("--a", required=True)
    m.add_argument("--b", required=True)
    m.add_argument("--method", choices=("spectral", "grid", "m"), default="spectral")
    common(m)
    m.set_defaults(func=cmd_metric)

    f = sub.add_parser("fit-plane", help="plane through rational points or dyadic boxes")
    f.add_argument("--points", required=True, help="JSON list of points, or of boxes with -r")
    f.add_argument("-r", type=int, default=None, help="boxes have side <= 2^-r")
    common(f)
    f.set_defaults(func=cmd_fit_plane)

    i = sub.add_parser("intersect", help="intersection of two hyperplanes")
    i.add_argument("--a", required=True, help="graph parameters [a_1..a_{n-1}, b] or plane JSON")
    i.add_argument("--b", required=True)
    common(i, precision=False)
    i.set_defaults(func=cmd_intersect)

    n = sub.add_parser("net", help="separated covering net at scale r")
    n.add_argument("--space", required=True, help="e.g. 'G(2,1)' or 'A(3,2)'")
    n.add_argument("-r", type=int, required=True)
    n.add_argument("--budget", type=int, default=200_000)
    n.add_argument("--probes", type=int, default=1000)
    n.add_argument("--seed", type=int, default=20240917, help="audit probe seed")
    common(n, precision=False)
    n.set_defaults(func=cmd_net)

    d = sub.add_parser("dim", help="box-counting dimension of points or planes")
    d.add_argument("--input", required=True, help="JSON list of points (or planes)")
    d.add_argument("--scales", required=True, help="e.g. '1:10'")
    d.add_argument("--window", help="fit window, e.g. '3:9'")
    d.add_argument("--planes", metavar="SPACE", help="input holds planes of this space")
    d.add_argument("--profile", help="write the count profile as CSV")
    common(d, precision=False)
    d.set_defaults(func=cmd_dim)

    e = sub.add_parser("experiment", help="run an experiment suite")
    e.add_argument("--config", help="config JSON path, or 'standard' (default)")
    e.add_argument("--seed", type=int, default=None)
    e.add_argument("--tolerance", type=float, default=None)
    e.add_argument("--only", help="comma-separated experiment ids")
    e.add_argument("--profiles", help="directory for CSV count profiles")
    common(e, precision=False)
    e.set_defaults(func=cmd_experiment)
    return p


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "precision", 0) is None:
            args.precision = default_precision()
        if getattr(args, "precision", 1) < 1:
            raise UsageError("precision must be >= 1")
        return args.func(args)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    except GrassError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    except (KeyError, TypeError, ValueError) as e:
        print(f"bad input: {e}", file=sys.stderr)
        return EXIT_USAGE


def main(argv=None) -> None:
    sys.exit(run(argv))
