"""Compare the numba and numpy grid kernels.

    python3 benchmarks/bench_kernels.py --sizes 64 128 256 --repeat 5
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from maxhyp import kernels
from maxhyp.scenarios import gauss_grid


def _time(fn, repeat):
    fn()  # warm-up, includes compilation for numba
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench(sizes, repeat):
    np_k, nb_k = kernels.get_impl("numpy"), kernels.get_impl("numba")
    rows = []
    for n in sizes:
        U = np.ascontiguousarray(gauss_grid(n, n, 1.0, 0.1, 0.1, 0.01, "gauss").U)
        h = 1.0 / n
        for name, call in (
            ("flux_divergence", lambda k: k.flux_divergence(U, True, 1.0, 2.0, h, h, True)),
            ("relax", lambda k: k.relax(U, 1e-3, 1.0)),
        ):
            t_np = _time(lambda: call(np_k), repeat)
            t_nb = _time(lambda: call(nb_k), repeat)
            diff = float(np.abs(call(np_k) - call(nb_k)).max())
            rows.append((name, n, t_np, t_nb, diff))
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[64, 128, 256])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    print(f"threads: {kernels.configure_threads()}")
    print(f"{'kernel':<16}{'n':>6}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}{'max diff':>12}")
    for name, n, t_np, t_nb, diff in bench(args.sizes, args.repeat):
        print(f"{name:<16}{n:>6}{t_np * 1e3:>12.3f}{t_nb * 1e3:>12.3f}{t_np / t_nb:>10.2f}{diff:>12.2e}")


if __name__ == "__main__":
    main()
