"""Hot loops with a compiled backend and a numpy fallback.

The compiled extension is used when it imports; setting GRASSCERT_PURE=1
forces the numpy versions.
"""

import os

if os.environ.get("GRASSCERT_PURE") == "1":
    from ._pykernels import BACKEND, cell_counts, first_within, sq_dists
else:
    try:
        from ._ckernels import BACKEND, cell_counts, first_within, sq_dists
    except ImportError:
        from ._pykernels import BACKEND, cell_counts, first_within, sq_dists

__all__ = ["BACKEND", "cell_counts", "first_within", "sq_dists"]
