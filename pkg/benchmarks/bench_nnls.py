"""Compare the compiled and pure-Python NNLS kernels.

Usage::

    python3 benchmarks/bench_nnls.py [--repeat 5] [--inputs 200]

Workloads on the default 1953-generator cone (dim 64):

random
    cone projection of points drawn uniformly from [-1, 1]^64
default-run
    the projections made by a default 200-step alternating-projection run

Both kernels must agree on the projection ``lam @ G``; coefficients need not
match on degenerate faces, where the representation is not unique.
"""
import argparse
import time

import numpy as np

from hundal_lab import _kernel
from hundal_lab.algorithms import run
from hundal_lab.cone import KKT_TOL, build_cone
from hundal_lab.hilbert import proj_V


def _workloads(cone, inputs):
    rng = np.random.default_rng(0)
    random = rng.uniform(-1.0, 1.0, (inputs, cone.dim))
    trace = run(cone, "altproj", iterations=201)
    default = np.array([proj_V(row.iterate).coords for row in trace])
    return {"random": random, "default-run": default}


def _time(kernel, G, B, repeat):
    best, out = np.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = [kernel(G, b, KKT_TOL, 10 * G.shape[0])[0] for b in B]
        best = min(best, time.perf_counter() - t0)
    return best, np.array(out)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--inputs", type=int, default=200)
    args = p.parse_args(argv)

    cone = build_cone(61.0, 1 / 32, 64)
    G = np.ascontiguousarray(cone.matrix)
    names = sorted(_kernel.KERNELS)
    print(f"cone: {cone.size} generators, dim {cone.dim}; kernels: {', '.join(names)}")
    if "compiled" not in names:
        print("compiled kernel not built; only the fallback is timed")
    for label, B in _workloads(cone, args.inputs).items():
        B = np.ascontiguousarray(B)
        results = {name: _time(_kernel.KERNELS[name], G, B, args.repeat) for name in names}
        line = [f"{label:>11} ({len(B)} solves):"]
        for name in names:
            line.append(f"{name} {1e3 * results[name][0] / len(B):.3f} ms/solve")
        if len(names) == 2:
            (tc, lc), (tp, lp) = results["compiled"], results["python"]
            line.append(f"speedup {tp / tc:.2f}x, max |projection diff| {np.abs(lc @ G - lp @ G).max():.1e}")
        print("  ".join(line))


if __name__ == "__main__":
    main()
