import importlib

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from grasscert import _kernels
from grasscert._kernels import _pykernels


def _backends():
    out = [pytest.param(_pykernels, id="python")]
    try:
        ck = importlib.import_module("grasscert._kernels._ckernels")
        out.append(pytest.param(ck, id="cython"))
    except ImportError:
        out.append(pytest.param(None, id="cython", marks=pytest.mark.skip("extension not built")))
    return out


BACKENDS = _backends()


def test_selected_backend_is_known():
    assert _kernels.BACKEND in ("python", "cython")


@pytest.mark.parametrize("k", BACKENDS)
def test_sq_dists(k):
    e = np.array([[0.0, 0.0], [3.0, 4.0], [1.0, 1.0]])
    assert np.allclose(k.sq_dists(e, [0.0, 0.0]), [0, 25, 2])
    assert k.sq_dists(np.zeros((0, 2)), [1.0, 1.0]).shape == (0,)


@pytest.mark.parametrize("k", BACKENDS)
def test_first_within(k):
    e = np.array([[5.0, 5.0], [1.0, 0.0], [0.5, 0.0]])
    assert k.first_within(e, [0.0, 0.0], 1.5) == 1
    assert k.first_within(e, [0.0, 0.0], 0.1) == -1
    assert k.first_within(np.zeros((0, 2)), [0.0, 0.0], 1.0) == -1


@pytest.mark.parametrize("k", BACKENDS)
def test_cell_counts_small(k):
    g = np.array([[0, 0], [1, 0], [2, 3], [3, 3]], dtype=np.int64)
    assert list(k.cell_counts(g, [0, 1, 2])) == [4, 2, 1]


@pytest.mark.parametrize("k", BACKENDS)
def test_cell_counts_wide_keys_fall_back(k):
    g = np.array([[0, 0, 0], [1 << 40, 0, 1], [1 << 40, 1 << 40, 1 << 40]], dtype=np.int64)
    assert list(k.cell_counts(g, [0, 41])) == [3, 1]


@given(hnp.arrays(np.int64, st.tuples(st.integers(1, 60), st.integers(1, 3)),
                  elements=st.integers(-1000, 1000)),
       st.lists(st.integers(0, 12), min_size=1, max_size=5))
def test_backends_agree(grid, shifts):
    ref = [len({tuple(r) for r in (grid - grid.min(axis=0)) >> s}) for s in shifts]
    for p in BACKENDS:
        k = p.values[0]
        if k is None:
            continue
        assert list(k.cell_counts(grid, shifts)) == ref
        e = grid.astype(float)
        x = e[0] + 0.5
        assert np.allclose(k.sq_dists(e, x), ((e - x) ** 2).sum(axis=1))
