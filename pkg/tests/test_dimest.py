import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from grasscert.dimest import (CountProfile, GridSample, as_fraction_points, box_count_planes,
                              box_count_points, count_profile, estimate_dim, snap, unique_rows,
                              unit_cube_grid)
from grasscert.errors import InsufficientScales, PreconditionViolation
from grasscert.experiments import CantorSpec, gen_cantor_points


def test_box_count_examples():
    assert box_count_points([(F(1, 3), F(2, 7))], 12) == 1
    assert box_count_points([(0,), (1,)], 1) == 2
    with pytest.raises(PreconditionViolation):
        box_count_points([], 3)


def test_cantor_endpoints_count():
    # left endpoints of the depth-m intervals are 3^-m apart, so at r with
    # 2^-r < 3^-m each one sits in its own cell
    for m in (4, 6, 8):
        pts = [(x,) for x in gen_cantor_points(CantorSpec(3, (0, 2), m))]
        r = math.ceil(m * math.log2(3))
        assert box_count_points(pts, r) == 2 ** m


def test_box_count_planes_examples():
    from grasscert.affine import make_affine, line_to_affine, LineParams
    from grasscert import span_to_projection
    from grasscert.nets import Space, build_net
    net = build_net(Space("A", 2, 1), 2)
    p = make_affine(span_to_projection([(1, 0)]), (0, F(1, 2)))
    q = make_affine(span_to_projection([(1, 0)]), (0, F(1, 2) + F(1, 64)))
    assert box_count_planes([p], net) == 1
    assert box_count_planes([p, q], net) == 1
    r = 3
    net3 = build_net(Space("A", 2, 1), r)
    lines = [line_to_affine(LineParams((0,), (F(j, 1 << r),))) for j in range(1 << r)]
    c = box_count_planes(lines, net3)
    assert (1 << r) // 4 <= c <= (1 << r)


def test_estimate_exact_power_laws():
    prof = CountProfile(tuple(range(1, 11)), tuple(2 ** r for r in range(1, 11)))
    est = estimate_dim(prof)
    assert est.slope == pytest.approx(1.0, abs=1e-12) and est.residual_max < 1e-12
    prof = CountProfile(tuple(range(1, 11)), (7,) * 10)
    assert estimate_dim(prof).slope == pytest.approx(0.0, abs=1e-12)
    prof = CountProfile((2, 4, 6, 8), tuple(2 ** (3 * r // 2) for r in (2, 4, 6, 8)))
    assert estimate_dim(prof).slope == pytest.approx(1.5, abs=1e-12)


def test_window_and_insufficient_scales():
    prof = CountProfile((1, 2, 3, 4), (2, 4, 8, 16))
    assert estimate_dim(prof, (2, 4)).window == (2, 4)
    with pytest.raises(InsufficientScales):
        estimate_dim(prof, (3, 4))


def test_cantor_calibration():
    pts = [(x,) for x in gen_cantor_points(CantorSpec(3, (0, 2), 12))]
    est = estimate_dim(count_profile(pts, range(1, 14)), (3, 12))
    assert est.slope == pytest.approx(math.log(2) / math.log(3), abs=0.05)


@pytest.mark.parametrize("n,e,win", [(1, 12, (2, 11)), (2, 8, (2, 7)), (3, 6, (2, 5))])
def test_unit_cube(n, e, win):
    est = estimate_dim(count_profile(unit_cube_grid(n, e), range(1, e + 1)), win)
    assert est.slope == pytest.approx(n, abs=0.05)


def test_product_is_subadditive():
    a = [x for x in gen_cantor_points(CantorSpec(3, (0, 2), 7))]
    b = [x for x in gen_cantor_points(CantorSpec(4, (0, 1), 5))]
    scales, win = range(1, 11), (3, 10)
    da = estimate_dim(count_profile([(x,) for x in a], scales), win).slope
    db = estimate_dim(count_profile([(x,) for x in b], scales), win).slope
    dab = estimate_dim(count_profile([(x, y) for x in a for y in b], scales), win).slope
    assert dab <= da + db + 0.1


@given(st.lists(st.tuples(st.fractions(0, 1, max_denominator=64),
                          st.fractions(0, 1, max_denominator=64)), min_size=1, max_size=40),
       st.integers(0, 10))
def test_counts_monotone(pts, r):
    sub = pts[: len(pts) // 2 + 1]
    assert box_count_points(sub, r) <= box_count_points(pts, r)
    assert box_count_points(pts, r) <= box_count_points(pts, r + 1)


def test_snap_floors_exactly():
    g = snap([(F(-1, 3), F(5, 8))], 3)
    assert g.cells.tolist() == [[-3, 5]]
    assert as_fraction_points(GridSample(np.array([[1, 2]]), 2)) == [(F(1, 4), F(1, 2))]
    with pytest.raises(PreconditionViolation):
        count_profile(GridSample(np.array([[0]]), 3), [4])


@given(st.lists(st.lists(st.integers(-50, 50), min_size=2, max_size=2), min_size=1,
                max_size=50))
def test_unique_rows(rows):
    a = np.array(rows, dtype=np.int64)
    assert sorted(map(tuple, unique_rows(a).tolist())) == sorted(set(map(tuple, rows)))


def test_profile_csv_round_trip():
    prof = CountProfile((1, 2, 3), (2, 4, 7))
    text = prof.to_csv()
    assert text.splitlines()[0] == "r,N"
    assert CountProfile.from_csv(text) == prof
