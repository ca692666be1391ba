"""Compare the compiled and pure-Python kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each row reports the best-of-N wall time per backend and the speedup.  The
Cython extension must be built (``pip install -e . --no-build-isolation``).
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from hyporate.kernels import H2, backend_module


def _best(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases():
    s_grid = np.geomspace(1e-3, 1e3, 200)
    xi = np.arange(-256, 257, dtype=float)
    y0 = np.ones((xi.size, 2), dtype=complex)
    line = np.linspace(-16, 16, 16385)
    return {
        "max_rate lambda2, 200 s": lambda k: [k.max_rate(H2, float(s), 1.0, 60) for s in s_grid],
        "propagate 513 modes x 100 t": lambda k: [k.propagate(xi, 1.0, float(t), y0) for t in np.linspace(0, 10, 100)],
        "hplus 16385 line modes": lambda k: k.hplus(line, 1.0, 5.0),
        "gt_B 50 (t, R)": lambda k: [k.gt_B_integral(float(t), 0.4, 1e-10) for t in np.geomspace(1e-2, 1e4, 50)],
    }


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    py = backend_module("python")
    try:
        cy = backend_module("cython")
    except ImportError:
        raise SystemExit("the Cython extension is not built")
    print(f"{'kernel':34s} {'python [s]':>11s} {'cython [s]':>11s} {'speedup':>8s}")
    for name, fn in cases().items():
        tp = _best(lambda: fn(py), args.repeat)
        tc = _best(lambda: fn(cy), args.repeat)
        print(f"{name:34s} {tp:11.4f} {tc:11.4f} {tp / tc:8.1f}")


if __name__ == "__main__":
    main()
