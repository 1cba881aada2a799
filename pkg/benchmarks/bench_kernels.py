"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--json out.json]
"""

import argparse
import json
import timeit

import numpy as np

from grasscert._kernels import _pykernels

try:
    from grasscert._kernels import _ckernels
except ImportError:
    _ckernels = None


def workloads(seed=0):
    rng = np.random.default_rng(seed)
    elems = rng.random((2000, 9))
    x = rng.random(9)
    far = x + 10.0
    grid = rng.integers(0, 1 << 14, size=(400_000, 2), dtype=np.int64)
    grid3 = rng.integers(0, 1 << 12, size=(200_000, 3), dtype=np.int64)
    return {
        "sq_dists 2000x9": lambda k: k.sq_dists(elems, x),
        "first_within miss 2000x9": lambda k: k.first_within(elems, far, 1e-6),
        "cell_counts 400k x 2, 14 scales": lambda k: k.cell_counts(grid, list(range(14))),
        "cell_counts 200k x 3, 12 scales": lambda k: k.cell_counts(grid3, list(range(12))),
    }


def check_agreement(backends, cases):
    for name, fn in cases.items():
        outs = [np.asarray(fn(k)) for k in backends.values()]
        for o in outs[1:]:
            if not np.allclose(o, outs[0]):
                raise AssertionError(f"backends disagree on {name}")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", help="write timings here")
    args = ap.parse_args(argv)

    backends = {"python": _pykernels}
    if _ckernels is not None:
        backends["cython"] = _ckernels
    else:
        print("compiled extension not built; timing the numpy fallback only")
    cases = workloads()
    check_agreement(backends, cases)

    rows = []
    print(f"{'workload':36s}" + "".join(f"{b:>12s}" for b in backends) + "     speedup")
    for name, fn in cases.items():
        times = {}
        for b, k in backends.items():
            times[b] = min(timeit.repeat(lambda: fn(k), number=1, repeat=args.repeat))
        speed = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{name:36s}" + "".join(f"{times[b] * 1e3:10.2f}ms" for b in backends)
              + f"{speed:11.1f}x")
        rows.append({"workload": name, "seconds": times, "speedup": speed})
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
