"""Pure numpy versions of the hot loops (used when the extension is absent)."""

import numpy as np

BACKEND = "python"


def sq_dists(elems, x):
    """Squared Euclidean distance from x to every row of elems."""
    elems = np.asarray(elems, dtype=np.float64)
    if elems.shape[0] == 0:
        return np.zeros(0)
    diff = elems - np.asarray(x, dtype=np.float64)
    return np.einsum("ij,ij->i", diff, diff)


def first_within(elems, x, thr):
    """Index of the first row at squared distance < thr from x, or -1."""
    d = sq_dists(elems, x)
    hit = np.flatnonzero(d < thr)
    return int(hit[0]) if hit.size else -1


def cell_counts(grid, shifts):
    """Number of distinct rows of (grid >> s) for every shift s."""
    grid = np.asarray(grid, dtype=np.int64)
    grid = grid - grid.min(axis=0)
    out = np.empty(len(shifts), dtype=np.int64)
    for i, s in enumerate(shifts):
        out[i] = np.unique(grid >> int(s), axis=0).shape[0]
    return out
