import json
import math
import random
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from grasscert import (GrassPoint, MetricSample, is_grassmann, m_dist, rational_grassmann_sample,
                       rho, span_to_projection)
from grasscert.errors import DependentSpan, DimensionMismatch, NotAGrassmannPoint
from grasscert.exactcore import Ordering, RatMatrix
from grasscert.grassmann import (METRIC_CONSTANT, estimate_metric_constant,
                                 perturbation_bound_check, rho_compare, rho_grid)

from conftest import rand_basis

M = RatMatrix.from_rows


def line(*v):
    return span_to_projection([v])


def test_is_grassmann_examples():
    assert is_grassmann(RatMatrix.diag([1, 1, 0]), 2)
    assert is_grassmann(M([[F(1, 2), F(1, 2)], [F(1, 2), F(1, 2)]]), 1)
    assert not is_grassmann(M([[1, 1], [0, 0]]), 1)
    assert not is_grassmann(RatMatrix.diag([1, 1, 0]), 1)


def test_span_to_projection_examples():
    assert line(1, 0).proj == RatMatrix.diag([1, 0])
    assert line(1, 1).proj == M([[F(1, 2), F(1, 2)], [F(1, 2), F(1, 2)]])
    assert span_to_projection([(1, 0, 0), (0, 1, 0)]).proj == RatMatrix.diag([1, 1, 0])
    with pytest.raises(DependentSpan):
        span_to_projection([(1, 2), (2, 4)])


def test_projection_of_random_bases_is_exact():
    rng = random.Random(1)
    for _ in range(100):
        n = rng.randint(2, 4)
        k = rng.randint(1, n - 1)
        v = span_to_projection(rand_basis(rng, n, k))
        assert is_grassmann(v.proj, k)
        assert v.proj.trace() == k


def test_constructor_rejects_non_projection():
    with pytest.raises(NotAGrassmannPoint):
        GrassPoint(2, 1, M([[1, 1], [0, 0]]))
    with pytest.raises(DimensionMismatch):
        GrassPoint(3, 1, RatMatrix.diag([1, 0]))


def test_sample_is_deterministic():
    a = rational_grassmann_sample(3, 2, seed=5)
    b = rational_grassmann_sample(3, 2, seed=5)
    assert a == b and a.proj.trace() == 2
    assert is_grassmann(rational_grassmann_sample(2, 1, seed=0).proj, 1)


def test_json_round_trip_is_bit_exact():
    v = rational_grassmann_sample(4, 2, seed=3)
    text = json.dumps(v.to_json())
    w = GrassPoint.from_json(json.loads(text))
    assert w == v and w.proj @ w.proj == w.proj


# --- rho -----------------------------------------------------------------------------

def test_rho_examples():
    e1, e2 = line(1, 0), line(0, 1)
    assert rho(e1, e1).value.is_exact and rho(e1, e1).hi == 0
    assert rho(e1, e2).lo == rho(e1, e2).hi == 1
    r = rho(e1, line(1, 1), 20)
    assert r.lo <= F(math.sqrt(2) / 2) <= r.hi
    assert r.value.width <= F(1, 1 << 20)


def test_rho_dimension_checks():
    with pytest.raises(DimensionMismatch):
        rho(line(1, 0), line(1, 0, 0))
    with pytest.raises(DimensionMismatch):
        rho(line(1, 0, 0), span_to_projection([(1, 0, 0), (0, 1, 0)]))


@pytest.mark.parametrize("n,k", [(2, 1), (3, 1), (3, 2), (4, 2)])
def test_rho_matches_numpy_svd(n, k):
    for i in range(15):
        v = rational_grassmann_sample(n, k, (i, "a"))
        w = rational_grassmann_sample(n, k, (i, "b"))
        d = np.array([[float(x) for x in r] for r in (v.proj - w.proj).to_rows()])
        ref = np.linalg.norm(d, 2)
        r = rho(v, w, 30)
        assert float(r.lo) - 1e-9 <= ref <= float(r.hi) + 1e-9


def test_rho_symmetric_and_triangle():
    for i in range(60):
        a, b, c = (rational_grassmann_sample(3, 1, (i, j)) for j in range(3))
        assert rho(a, b, 20).value == rho(b, a, 20).value
        assert rho(a, c, 20).lo <= rho(a, b, 20).hi + rho(b, c, 20).hi


@pytest.mark.parametrize("n,k", [(2, 1), (3, 1)])
def test_grid_route_overlaps_spectral(n, k):
    for i in range(8):
        v = rational_grassmann_sample(n, k, (i, 0))
        w = rational_grassmann_sample(n, k, (i, 1))
        s, g = rho(v, w, 10), rho(v, w, 10, method="grid")
        assert s.value.overlaps(g.value)
        assert g.value.width <= F(1, 1 << 10)


def test_grid_route_on_axis_lines():
    g = rho_grid(line(1, 0).proj - line(1, 1).proj, 12)
    assert g.lo <= F(math.sqrt(2) / 2) <= g.hi


def test_rho_compare_exact():
    e1, e2 = line(1, 0), line(0, 1)
    assert rho_compare(e1, e2, 1) is Ordering.EQ
    assert rho_compare(e1, e2, F(1, 2)) is Ordering.GT
    assert rho_compare(e1, line(1, 1), F(7, 10)) is Ordering.GT
    assert rho_compare(e1, line(1, 1), F(71, 100)) is Ordering.LT


# --- m ---------------------------------------------------------------------------------

def test_m_examples():
    e1, e2 = line(1, 0), line(0, 1)
    assert m_dist(e1, e1).hi == 0
    m = m_dist(e1, e2, 20)
    assert m.lo <= F(math.sqrt(2)) <= m.hi
    m = m_dist(e1, line(1, 1), 20)
    assert float(m.lo) <= math.sqrt(2 - math.sqrt(2)) <= float(m.hi)


def _unit_samples(basis, count):
    q, _ = np.linalg.qr(np.array(basis, dtype=float).T)
    k = q.shape[1]
    if k == 1:
        return np.stack([q[:, 0], -q[:, 0]])
    th = np.linspace(0, 2 * np.pi, count, endpoint=False)
    if k == 2:
        return (np.outer(np.cos(th), q[:, 0]) + np.outer(np.sin(th), q[:, 1]))
    g = np.random.default_rng(0).normal(size=(count * 20, k))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g @ q.T


def _m_oracle(b1, b2):
    """sup over sampled unit v1 of the min over sampled unit v2 of |v1 - v2|."""
    s1, s2 = _unit_samples(b1, 720), _unit_samples(b2, 2880)
    d = np.linalg.norm(s1[:, None, :] - s2[None, :, :], axis=2)
    return d.min(axis=1).max()


@pytest.mark.parametrize("n,k1,k2", [(2, 1, 1), (3, 1, 1), (3, 1, 2), (3, 2, 1), (3, 2, 2),
                                     (4, 2, 2)])
def test_m_closed_form_against_sampling(n, k1, k2):
    rng = random.Random(f"m{n}{k1}{k2}")
    for _ in range(4):
        b1, b2 = rand_basis(rng, n, k1), rand_basis(rng, n, k2)
        m = m_dist(span_to_projection(b1), span_to_projection(b2), 24)
        assert float(m.hi) == pytest.approx(_m_oracle(b1, b2), abs=1.5e-2)


def test_metric_constant_estimate_is_finite_and_below_config():
    for n, k in [(2, 1), (3, 1), (3, 2)]:
        c16 = estimate_metric_constant(n, k, pairs=60, seed=1, precision=16)
        c24 = estimate_metric_constant(n, k, pairs=60, seed=1, precision=24)
        assert 1 <= c24 <= METRIC_CONSTANT
        assert abs(float(c16 - c24)) < 1e-3


# --- perturbation ------------------------------------------------------------------

def test_perturbation_examples():
    assert perturbation_bound_check([(1, 0)], [(1, 0)], F(1, 100))
    d = F(1, 1000)
    assert perturbation_bound_check([(1, 0)], [(1, d)], F(11, 10000))
    rng = random.Random(2)
    basis = [(1, 0, 0), (0, 1, 0)]
    pert = [tuple(x + F(rng.randint(-1, 1), 1 << 11) for x in b) for b in basis]
    assert perturbation_bound_check(basis, pert, F(1, 1 << 10))


@given(st.integers(2, 4), st.integers(0, 10 ** 6), st.integers(4, 20))
def test_perturbation_property(n, seed, e):
    rng = random.Random(seed)
    k = rng.randint(1, n - 1)
    basis = rand_basis(rng, n, k)
    eps = F(1, 1 << e)
    step = eps / (2 * n)
    pert = [[x + rng.randint(-1, 1) * step for x in b] for b in basis]
    from grasscert.exactcore import RatMatrix as R
    if R.from_rows(pert).rank() < k:
        return
    assert perturbation_bound_check(basis, pert, eps)


def test_metric_sample_width_is_enforced():
    from grasscert.exactcore import DyadicInterval
    with pytest.raises(ValueError):
        MetricSample(DyadicInterval(F(0), F(1), 0), "spectral", 4)
