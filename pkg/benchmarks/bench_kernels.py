"""Time the per-face accumulation kernel: compiled loops vs vectorized numpy.

Run with `python3 benchmarks/bench_kernels.py`. The numba column needs numba
installed (it is a hard dependency); the first compiled call is excluded
from the timing by a warmup pass.
"""

import time

import numpy as np

import surfspec as ss
from surfspec import _kernels
from surfspec._backend import HAS_NUMBA


def _inputs(mesh):
    return (
        np.ascontiguousarray(mesh.corner_positions()),
        np.ascontiguousarray(mesh.faces),
        mesh.n_vertices,
    )


def _best_of(fn, args, repeats: int = 5) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    variants = [("numpy", _kernels._vertex_geometry_numpy)]
    if HAS_NUMBA:
        from numba import njit

        compiled = njit(cache=True)(_kernels._vertex_geometry_loops)
        variants.append(("numba", compiled))
    else:
        print("numba not importable; timing the numpy path only\n")

    print(f"{'mesh':<24}{'faces':>8}" + "".join(f"{name:>12}" for name, _ in variants)
          + ("{:>10}".format("speedup") if HAS_NUMBA else ""))
    for level in (4, 5, 6, 7):
        mesh = ss.icosphere(level)
        args = _inputs(mesh)
        times = []
        for _, fn in variants:
            fn(*args)  # warmup (jit compile, cache touch)
            times.append(_best_of(fn, args))
        row = f"icosphere({level})".ljust(24) + f"{mesh.n_faces:>8}"
        row += "".join(f"{t * 1e3:>10.2f}ms" for t in times)
        if HAS_NUMBA:
            row += f"{times[0] / times[1]:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
