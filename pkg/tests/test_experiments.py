import json
import math
from fractions import Fraction as F

import numpy as np
import pytest

from grasscert.affine import point_on_plane
from grasscert.dimest import unique_rows
from grasscert.errors import PreconditionViolation
from grasscert.experiments import (CantorSpec, FamilySpec, InPlaneSubset, bound_for,
                                   calibration_report, cantor_calibration, extension_experiment,
                                   family_from_json, full_interval, gen_cantor_points,
                                   gen_plane_family, hyperplane_union_lower_bound, measure_t,
                                   packing_union_lower_bound, pick_theorem, plane_cells,
                                   run_experiment, run_suite, standard_suite,
                                   union_bound_experiment, union_lower_bound, union_sample,
                                   write_profiles, write_reports)

HALF = CantorSpec(4, (0, 2), 4)
FULL_LINE = InPlaneSubset((None,))


def test_cantor_spec():
    c = CantorSpec(3, (2, 0, 2), 8)
    assert c.digits == (0, 2) and c.target_dim == pytest.approx(math.log(2) / math.log(3))
    with pytest.raises(PreconditionViolation):
        CantorSpec(3, (3,), 2)
    with pytest.raises(PreconditionViolation):
        CantorSpec(1, (0,), 2)
    assert CantorSpec.from_json(c.to_json()) == c


def test_cantor_points_have_allowed_digits():
    pts = gen_cantor_points(CantorSpec(3, (0, 2), 6))
    assert len(pts) == 64
    for x in pts:
        v = x * 3 ** 6
        assert v.denominator == 1
        v = int(v)
        for _ in range(6):
            assert v % 3 in (0, 2)
            v //= 3


def test_cantor_sampling_is_seeded():
    c = CantorSpec(5, (0, 1, 4), 10)
    assert gen_cantor_points(c, 50, seed=3) == gen_cantor_points(c, 50, seed=3)
    assert gen_cantor_points(c, 50, seed=3) != gen_cantor_points(c, 50, seed=4)


@pytest.mark.parametrize("spec,target", [(CantorSpec(3, (0, 2), 12), math.log(2, 3)),
                                         (full_interval(12), 1.0),
                                         (CantorSpec(3, (1,), 12), 0.0)])
def test_calibration(spec, target):
    est, _ = cantor_calibration(spec, range(1, 14), (3, 12))
    assert est.slope == pytest.approx(target, abs=0.05)


def test_family_spec_validation():
    with pytest.raises(PreconditionViolation):
        FamilySpec(4, 2, (0,) * 4, InPlaneSubset((None, None)))
    with pytest.raises(PreconditionViolation):
        FamilySpec(2, 1, (HALF,), FULL_LINE)
    with pytest.raises(PreconditionViolation):
        FamilySpec(2, 1, (HALF, HALF), InPlaneSubset((None, None)))
    spec = FamilySpec(3, 2, (HALF, F(1, 3), HALF), InPlaneSubset((None, HALF), F(1, 2)))
    assert family_from_json(json.loads(json.dumps(spec.to_json()))) == spec


def test_parameter_dimension_is_measured():
    fam = gen_plane_family(FamilySpec(2, 1, (CantorSpec(4, (0, 2), 5),) * 2, FULL_LINE))
    assert len(fam.planes) == 2 ** 10
    t, _ = measure_t(fam, [2, 4, 6, 8, 10])
    assert t.slope == pytest.approx(1.0, abs=0.05)
    one = gen_plane_family(FamilySpec(2, 1, (F(1, 3), F(1, 5)), FULL_LINE))
    assert measure_t(one, [2, 4, 6])[0].slope == 0.0
    full = gen_plane_family(FamilySpec(2, 1, (full_interval(4),) * 2, FULL_LINE))
    assert measure_t(full, [1, 2, 3, 4])[0].slope == pytest.approx(2.0, abs=1e-9)


def test_plane_cells_match_exact_points():
    fam = gen_plane_family(FamilySpec(3, 2, (HALF, F(1, 7), HALF),
                                      InPlaneSubset((None, HALF), F(1, 2))), count=5, seed=1)
    coords, den = fam.spec.subset.grid(3)
    for p in fam.planes:
        cells = plane_cells(p, coords, den, 9)
        for row, c in zip(cells[:40], coords[:40]):
            x = point_on_plane(p, [F(int(v), den) for v in c])
            assert p.contains(x)
            assert list(row) == [math.floor(xi * 2 ** 9) for xi in x]


def test_plane_cells_big_integer_path():
    fam = gen_plane_family(FamilySpec(2, 1, (CantorSpec(3, (0, 2), 30), F(1, 3)), FULL_LINE),
                           count=2, seed=0)
    coords, den = FULL_LINE.grid(4)
    p = fam.planes[0]
    cells = plane_cells(p, coords, den, 40)
    x = point_on_plane(p, (F(int(coords[3][0]), den),))
    assert list(cells[3]) == [math.floor(xi * 2 ** 40) for xi in x]


def test_union_sample_deduplicates():
    fam = gen_plane_family(FamilySpec(2, 1, (F(0), F(0)), FULL_LINE))
    s = union_sample(fam.planes * 3, [FULL_LINE] * 3, 6, 6)
    assert len(s) == 64 and len(unique_rows(s.cells)) == len(s)


def test_bound_formulas():
    assert union_lower_bound(2, 1, 1, 1) == pytest.approx(1.5)
    assert union_lower_bound(2, 1, 1, 0) == pytest.approx(1.0)
    assert union_lower_bound(3, 2, 2, 3) == pytest.approx(3.0)
    assert union_lower_bound(3, 2, 1, 1) == pytest.approx(1.0)
    assert packing_union_lower_bound(2, 1, 0.5, 1) == pytest.approx(0.5)
    assert packing_union_lower_bound(2, 1, 0.5, 1.8) == pytest.approx(0.9)
    assert hyperplane_union_lower_bound(3, 1) == pytest.approx(2.6)
    assert hyperplane_union_lower_bound(3, 0) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        bound_for("nope", 2, 1, 1, 1)


def test_theorem_selection():
    lines = FamilySpec(2, 1, (HALF, HALF), FULL_LINE)
    assert pick_theorem(lines) == "union"
    packing = FamilySpec(2, 1, (HALF, HALF), FULL_LINE, "packing")
    assert pick_theorem(packing) == "packing_union"
    planes = FamilySpec(3, 2, (HALF,) * 3, InPlaneSubset((None, None)))
    assert pick_theorem(planes) == "hyperplane_union"
    pieces = FamilySpec(3, 2, (HALF,) * 3, InPlaneSubset((None, HALF)))
    assert pick_theorem(pieces) == "union"


def test_single_line_union():
    spec = FamilySpec(2, 1, (F(1, 3), F(1, 5)), FULL_LINE)
    rep = union_bound_experiment(spec, range(1, 10), 10, [2, 4, 6], window=(3, 9))
    assert rep.bound_value == pytest.approx(1.0) and rep.details["t"] == 0.0
    assert rep.measured.slope == pytest.approx(1.0, abs=0.02) and rep.satisfied


def test_extension_fixed_point_and_modes():
    spec = FamilySpec(2, 1, (CantorSpec(4, (0, 2), 3),) * 2, FULL_LINE)
    rep = extension_experiment(spec, "positive_measure", range(1, 9), 8, window=(3, 8))
    assert rep.kind == "equality" and rep.details["E_equals_F"]
    assert rep.measured.slope == rep.bound_value
    with pytest.raises(ValueError):
        extension_experiment(spec, "other", range(1, 9), 8)
    planes = FamilySpec(3, 2, (HALF,) * 3, InPlaneSubset((None, None)))
    with pytest.raises(PreconditionViolation):
        extension_experiment(planes, "dim1_lines", range(1, 9), 8)


def test_extension_upper_bound_report():
    spec = FamilySpec(2, 1, (CantorSpec(4, (0, 2), 4),) * 2, InPlaneSubset((None,), F(1, 2)))
    rep = extension_experiment(spec, "positive_measure", range(1, 10), 9, window=(3, 9))
    assert rep.kind == "upper"
    assert rep.bound_value == pytest.approx(2 * rep.details["dim_E"] - 1)
    assert rep.satisfied == (rep.measured.slope <= rep.bound_value + 0.1)


def test_calibration_report_margin():
    from grasscert.dimest import CountProfile, DimEstimate
    est = DimEstimate(0.66, 0.0, (1, 3), 0.0)
    rep = calibration_report("c", est, 0.63, 0.05, CountProfile((1,), (2,)))
    assert rep.satisfied and rep.margin == pytest.approx(0.02)
    assert not calibration_report("c", est, 0.6, 0.05, CountProfile((1,), (2,))).satisfied


def test_suite_config_validation():
    with pytest.raises(PreconditionViolation):
        run_suite({"schema": 2, "experiments": []})
    dup = {"schema": 1, "experiments": [{"id": "a", "type": "x"}, {"id": "a", "type": "x"}]}
    with pytest.raises(PreconditionViolation):
        run_suite(dup)
    with pytest.raises(ValueError):
        run_experiment({"id": "a", "type": "x"})


def test_standard_suite_shape():
    cfg = standard_suite()
    assert cfg["schema"] == 1
    ids = [e["id"] for e in cfg["experiments"]]
    assert len(ids) == len(set(ids)) >= 10


def test_small_suite_outputs(tmp_path):
    cfg = standard_suite()
    reports = run_suite(cfg, only=["union_single_line", "calib_square"])
    assert [r.experiment_id for r in reports] == ["calib_square", "union_single_line"]
    lines = write_reports(reports).splitlines()
    assert [json.loads(x)["id"] for x in lines] == ["calib_square", "union_single_line"]
    paths = write_profiles(reports, tmp_path)
    assert sorted(p.name for p in paths) == ["calib_square.points.csv",
                                             "union_single_line.params.csv",
                                             "union_single_line.union.csv"]
    # flags override per-experiment values
    tight = run_suite(cfg, tolerance=0.0, only=["calib_square"])[0]
    assert tight.details["tolerance"] == 0.0
