"""Benchmark the compiled kernels against their pure-Python twins.

Covers the two hot loops (cyclic Jacobi eigensolver, batched propagation)
plus LAPACK as the reference for the eigensolver.  Run directly:

    python benchmarks/bench_kernels.py [--csv OUT.csv]
"""

import argparse
import time

import numpy as np

from kreinlab.numkernel import sym_eigen
from kreinlab.numkernel.eigen import HAVE_COMPILED_KERNEL
from kreinlab.numkernel.propagate import (
    HAVE_COMPILED_PROPAGATE,
    magnus_sl,
    magnus_sl_py,
    rk4_ho,
    rk4_ho_py,
)


def _time(fn, repeats=3):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_jacobi(rows):
    rng = np.random.default_rng(0)
    for n in (50, 100, 200, 400):
        a = rng.standard_normal((n, n))
        a = 0.5 * (a + a.T)
        t_c = _time(lambda: sym_eigen(a, method="jacobi"))
        t_py = _time(lambda: sym_eigen(a, method="jacobi-py"),
                     repeats=1 if n >= 200 else 3)
        t_la = _time(lambda: sym_eigen(a, method="lapack"))
        rows.append(("jacobi", n, t_c, t_py, t_la))
        print(f"jacobi   n={n:4d}  compiled {t_c*1e3:9.2f} ms   "
              f"python {t_py*1e3:9.2f} ms   lapack {t_la*1e3:8.2f} ms   "
              f"speedup x{t_py/t_c:6.1f}")


def bench_propagators(rows):
    nsteps = 2048
    batch = 256
    h = 1.0 / nsteps
    nodes = np.linspace(0.0, 1.0, nsteps)
    ones = np.ones(nsteps)
    q = 25.0 * nodes
    lams = np.linspace(1.0, 4000.0, batch)

    def run_magnus(kern):
        y = np.tile(np.eye(2), (batch, 1, 1))
        logs = np.zeros(batch)
        kern(ones, ones, q, q, h, lams, y, logs, 0, None, None)
        return y

    t_c = _time(lambda: run_magnus(magnus_sl))
    t_py = _time(lambda: run_magnus(magnus_sl_py))
    err = np.max(np.abs(run_magnus(magnus_sl) - run_magnus(magnus_sl_py)))
    rows.append(("magnus_sl", batch, t_c, t_py, np.nan))
    print(f"magnus   B={batch:4d}  compiled {t_c*1e3:9.2f} ms   "
          f"python {t_py*1e3:9.2f} ms   twin gap {err:.1e}   "
          f"speedup x{t_py/t_c:6.1f}")

    half = np.linspace(0.0, 1.0, 2 * nsteps + 1)
    invp = np.ones(2 * nsteps + 1)
    qh = 25.0 * half
    y0 = np.zeros((batch, 6, 4))
    for c in range(4):
        y0[:, 2 + c, c] = 1.0

    def run_rk(kern):
        y = y0.copy()
        kern(invp, qh, h, lams, y, 3, None, None)
        return y

    t_c = _time(lambda: run_rk(rk4_ho))
    t_py = _time(lambda: run_rk(rk4_ho_py))
    err = np.max(np.abs(run_rk(rk4_ho) - run_rk(rk4_ho_py)))
    rows.append(("rk4_ho", batch, t_c, t_py, np.nan))
    print(f"rk4_ho   B={batch:4d}  compiled {t_c*1e3:9.2f} ms   "
          f"python {t_py*1e3:9.2f} ms   twin gap {err:.1e}   "
          f"speedup x{t_py/t_c:6.1f}")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--csv", default=None)
    args = parser.parse_args()
    print(f"compiled kernels: jacobi={HAVE_COMPILED_KERNEL} "
          f"propagate={HAVE_COMPILED_PROPAGATE}")
    rows = []
    bench_jacobi(rows)
    bench_propagators(rows)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write("kernel,size,compiled_s,python_s,lapack_s\n")
            for row in rows:
                fh.write(",".join(str(x) for x in row) + "\n")
        print(f"wrote {args.csv}")


if __name__ == "__main__":
    main()
