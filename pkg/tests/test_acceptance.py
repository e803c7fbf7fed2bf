"""Acceptance criteria, one test per criterion.

Each test records a ``[PASS]``/``[FAIL]`` line that the terminal summary
prints (see ``conftest.py``). ``python3 tests/test_acceptance.py`` runs
just this module.
"""
import itertools
import json
import math
import time
from pathlib import Path

import numpy as np
import pytest

from hundal_lab import _kernel
from hundal_lab.algorithms import run
from hundal_lab.cli import main
from hundal_lab.cone import build_cone, kkt_violation, nnls, project_cone_bruteforce_many
from hundal_lab.diagnostics import coordinate_decay, firm_nonexpansiveness_audit, norm_floor
from hundal_lab.hilbert import HilbertVector, norm, proj_V
from hundal_lab.operators import resolvent_A, resolvent_B

HORIZON = 200
BASELINE = Path(__file__).parent / "baselines" / "reference_run.json"
RESULTS = []


def record(criterion: str, passed: bool, detail: str) -> bool:
    RESULTS.append(f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}")
    return passed


@pytest.fixture(scope="module")
def default_runs():
    t0 = time.perf_counter()
    cone = build_cone(61.0, 1 / 32, 64)
    dr = run(cone, "dr", iterations=HORIZON + 1)
    alt = run(cone, "altproj", iterations=HORIZON + 2)
    elapsed = time.perf_counter() - t0
    sp = run(cone, "spingarn", iterations=HORIZON + 1)
    return {"cone": cone, "dr": dr, "altproj": alt, "spingarn": sp, "dr_seconds": elapsed}


def test_1_dr_altproj_coupling(default_runs):
    dr, alt = default_runs["dr"], default_runs["altproj"]
    worst = max(norm(row.iterate - proj_V(alt[row.n + 1].iterate)) for row in dr)
    secs = default_runs["dr_seconds"]
    ok = worst <= 1e-8 and secs < 5.0 and len(dr) == HORIZON + 1
    assert record("1 DR-altproj coupling", ok, f"max ||x_n - P_V z_n+1|| = {worst:.3e} (tol 1e-8), {secs:.2f} s (< 5 s)")


def test_2_spingarn_reduction(default_runs):
    sp, alt = default_runs["spingarn"], default_runs["altproj"]
    u = max(row.u_norm for row in sp)
    x = max(norm(row.iterate - proj_V(ref.iterate)) for row, ref in zip(sp, alt))
    ok = u <= 1e-12 and x <= 1e-8
    assert record("2 Spingarn reduction", ok, f"max ||u_n|| = {u:.3e} (tol 1e-12), max ||x_n - P_V z_n|| = {x:.3e} (tol 1e-8)")


def test_3_fejer_and_summability(default_runs):
    rows = [r for r in default_runs["altproj"] if r.n <= HORIZON + 1]
    norms = [r.norm_iterate for r in rows]
    rise = max(0.0, max(b - a for a, b in zip(norms, norms[1:])))
    total = math.fsum(r.v_residual**2 for r in rows if r.n <= HORIZON)
    ok = rise <= 1e-12 and total <= 1.0 + 1e-9 and norms[0] == 1.0
    assert record("3 Fejer monotonicity and summability", ok,
                  f"max rise {rise:.3e} (tol 1e-12), sum ||P_V z_n - z_n||^2 = {total:.3e} (<= 1 + 1e-9)")


def _small_hundal_cones():
    """Every (dim, xi_max, step) of a small family whose cone has at most 12 generators."""
    out = []
    for dim, step in itertools.product((4, 5, 6, 8), (1.0, 0.5, 0.25, 0.125)):
        for xi_max in np.arange(step, dim - 2, step):
            if math.floor(xi_max) + 2 < dim and math.floor(xi_max / step + 1e-9) + 1 <= 12:
                cone = build_cone(float(xi_max), step, dim)
                if cone.size <= 12:
                    out.append(cone)
    return out


def test_4_oracle_equivalence():
    cones = _small_hundal_cones()
    worst_gap, worst_kkt, count = 0.0, 0.0, 0
    for i, cone in enumerate(cones):
        X = np.random.default_rng(1000 + i).uniform(-1, 1, (100, cone.dim))
        P = project_cone_bruteforce_many(cone, X)
        for backend in sorted(_kernel.KERNELS):
            for x, p in zip(X, P):
                res = nnls(cone, x, backend=backend)
                worst_gap = max(worst_gap, float(np.linalg.norm(res.coefficients @ cone.matrix - p)))
                worst_kkt = max(worst_kkt, kkt_violation(cone, x, res.coefficients))
                count += 1
    ok = worst_gap <= 1e-9 and worst_kkt <= 1e-12
    assert record("4 cone projection oracle", ok,
                  f"{len(cones)} cones, {count} solves over {sorted(_kernel.KERNELS)}: "
                  f"max gap {worst_gap:.3e} (tol 1e-9), max KKT {worst_kkt:.3e} (tol 1e-12)")


def test_5_firm_nonexpansiveness():
    cone = build_cone(13.0, 1 / 32, 16)
    report = firm_nonexpansiveness_audit(cone, samples=1000, seed=42)
    assert record("5 firm nonexpansiveness", report.passed,
                  f"min <x-y,Tx-Ty> - ||Tx-Ty||^2 = {report.value:.3e} over 1000 pairs at dim 16 (>= -1e-9)")


def test_6_fixed_point_consistency(default_runs):
    cone = default_runs["cone"]
    zero = HilbertVector.zeros(64)
    trace = run(cone, "dr", init=zero, iterations=HORIZON + 1)
    worst = max(max(row.norm_iterate, row.norm_y) for row in trace)
    ok = worst <= 1e-12 and resolvent_A(zero) == zero and resolvent_B(cone, zero) == zero
    assert record("6 fixed point at zero", ok, f"max(||x_n||, ||y_n||) = {worst:.3e} (tol 1e-12), J_A 0 = J_B 0 = 0")


def test_7a_norm_floor(default_runs):
    baseline = json.loads(BASELINE.read_text())["measured"]
    parts, ok = [], True
    for name in ("altproj", "dr", "spingarn"):
        floor, _ = norm_floor([r for r in default_runs[name] if r.n <= HORIZON])
        ok &= floor > 0 and floor == pytest.approx(baseline[name]["norm_floor"], rel=1e-12, abs=0)
        parts.append(f"{name} {floor:.17g}")
    assert record("7a norm floor > 0 (matches recorded baseline)", ok, ", ".join(parts))


@pytest.mark.xfail(strict=True, reason=(
    "from z_0 = e2 the sequence is numerically stationary at exp(-100) e0 + e2; "
    "the exact per-step motion is far below double precision, so no probe decreases strictly"))
def test_7b_coordinate_decay(default_runs):
    decay = coordinate_decay(default_runs["altproj"], early=10, at=HORIZON)
    ok = all(d["decayed"] for d in decay)
    detail = ", ".join(f"k={d['probe']}: {d['final']:.3g} vs {d['early_max']:.3g}" for d in decay)
    assert record("7b probe coordinates at n=200 below early max", ok, detail)


def test_8_determinism(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["--output", str(a), "--audit-samples", "0"]) == 0
    assert main(["--output", str(b), "--audit-samples", "0"]) == 0
    ok = a.read_bytes() == b.read_bytes()
    assert record("8 determinism", ok, f"two default runs, {a.stat().st_size} bytes each, byte-identical={ok}")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
