"""Benchmark of the compiled stepping kernels against the numpy fallback.

Times the banded factor/solve pair and the fused explicit RHS on a
production-sized grid, plus an end-to-end stepping loop, and checks that
the two backends agree on the results.

Run as ``cglblow-bench`` or ``python -m cglblow.bench``.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from .stepping import Stepper, get_backend


def _time(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run_bench(N: int = 8192, steps: int = 200, repeats: int = 3) -> dict:
    y = np.linspace(-88.0, 88.0, N)
    ds = 5e-4
    rng = np.random.default_rng(7)
    w0 = np.exp(-(y**2) / 10.0) * (1.0 + 0.1j * rng.standard_normal(N))
    rows = {}
    results = {}
    for name in ("python", "compiled"):
        try:
            K = get_backend(name)
        except ImportError:
            rows[name] = None
            continue
        stp = Stepper(y, ds, 0.5, 3.0, 1.0, scheme="imex2", backend=K)
        rhs = w0.astype(np.complex128)

        t_solve = _time(lambda: stp._solve(stp._fact, rhs), repeats * 10)
        t_rhs = _time(lambda: stp.explicit_rhs(w0), repeats * 10)

        def loop():
            w = w0.copy()
            stp.reset_history()
            for _ in range(steps):
                w = stp.step(w, 0.0, 0.0)
            return w

        t_loop = _time(loop, repeats)
        results[name] = loop()
        rows[name] = {
            "solve_ms": t_solve * 1e3,
            "rhs_ms": t_rhs * 1e3,
            "loop_ms_per_step": t_loop * 1e3 / steps,
        }
    if all(n in results for n in ("python", "compiled")):
        diff = np.max(np.abs(results["python"] - results["compiled"]))
        rows["agreement_max_abs_diff"] = float(diff)
    return rows


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=8192, help="grid points")
    ap.add_argument("--steps", type=int, default=200, help="loop length")
    args = ap.parse_args(argv)
    rows = run_bench(args.n, args.steps)
    print(f"grid N = {args.n}, {args.steps} steps, scheme imex2")
    for name in ("python", "compiled"):
        r = rows.get(name)
        if r is None:
            print(f"  {name:9s}: unavailable")
            continue
        print(
            f"  {name:9s}: solve {r['solve_ms']:.3f} ms   "
            f"rhs {r['rhs_ms']:.3f} ms   step {r['loop_ms_per_step']:.3f} ms"
        )
    if "agreement_max_abs_diff" in rows:
        print(f"  backend agreement: max |diff| = {rows['agreement_max_abs_diff']:.3e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
