"""Timing comparison of the compiled and pure-numpy kernel paths.

Runs each kernel on identically-seeded inputs under both implementations and
prints a small table.  The compiled path is warmed once so JIT compilation
does not pollute the numbers.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import importlib
import os
import time

import numpy as np


def _load(no_numba: bool):
    os.environ["DELTAPART_NO_NUMBA"] = "1" if no_numba else ""
    import deltapart._kernels as k
    return importlib.reload(k)


def _structured_mesh(n: int):
    xs, ys = np.meshgrid(np.linspace(0, 1, n + 1), np.linspace(0, 1, n + 1),
                         indexing="ij")
    pts = np.column_stack([xs.ravel(), ys.ravel()])
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    a = (i * (n + 1) + j).ravel()
    b = ((i + 1) * (n + 1) + j).ravel()
    c = (i * (n + 1) + j + 1).ravel()
    d = ((i + 1) * (n + 1) + j + 1).ravel()
    tris = np.vstack([np.column_stack([a, b, c]), np.column_stack([b, d, c])])
    return pts, np.ascontiguousarray(tris, dtype=np.int64)


def _spd(n: int, rng):
    B = rng.standard_normal((n, n))
    return np.ascontiguousarray(B @ B.T + n * np.eye(n))


def _time(fn, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    par = argparse.ArgumentParser(description=__doc__)
    par.add_argument("--repeat", type=int, default=3)
    args = par.parse_args()

    rng = np.random.default_rng(0)
    pts, tris = _structured_mesh(400)          # 320k triangles
    S = _spd(400, rng)
    C = 0.5 * (S + S.T)

    cases = {
        "p1_elements (320k tris)": lambda k: (lambda: k.p1_elements(pts, tris)),
        "cholesky_lower (400)": lambda k: (lambda: k.cholesky_lower(S)),
        "tridiagonalize (400)": lambda k: (lambda: k.tridiagonalize(C.copy())),
    }

    results = {}
    for label, flag in (("numba", False), ("numpy", True)):
        k = _load(flag)
        if label == "numba" and not k.USING_NUMBA:
            print("numba unavailable; skipping the compiled path")
            continue
        for name, make in cases.items():
            fn = make(k)
            fn()                               # warm-up / JIT
            t, _ = _time(fn, args.repeat)
            results.setdefault(name, {})[label] = t

    w = max(len(n) for n in results)
    print(f"{'kernel'.ljust(w)}  {'numba':>10}  {'numpy':>10}  {'speedup':>8}")
    for name, r in results.items():
        nb = r.get("numba")
        np_ = r.get("numpy")
        ratio = "" if nb is None else f"{np_ / nb:8.2f}x"
        nb_s = "" if nb is None else f"{nb:10.4f}"
        print(f"{name.ljust(w)}  {nb_s}  {np_:10.4f}  {ratio}")


if __name__ == "__main__":
    main()
