import math

import numpy as np
import pytest

from hundal_lab.algorithms import run
from hundal_lab.cone import build_cone
from hundal_lab.diagnostics import (
    ConfigurationMismatch,
    Trace,
    TraceRow,
    collapse_check,
    column_max_check,
    coordinate_decay,
    coupling_check,
    fejer_check,
    firm_nonexpansiveness_audit,
    norm_floor,
    spingarn_reduction_check,
    summability_check,
    weak_proxy,
)
from hundal_lab.hilbert import HilbertVector, basis_vector

e = basis_vector


@pytest.fixture(scope="module")
def dim16_cone():
    return build_cone(13.0, 1 / 32, 16)


def _norm_trace(norms):
    rows = []
    for n, (a, b) in enumerate(zip(norms, norms[1:] + norms[-1:])):
        rows.append(TraceRow("altproj", n, norm_iterate=a, fejer_delta=a - b, norm_z=a))
    return Trace(rows, algorithm="altproj")


def test_weak_proxy_examples():
    assert weak_proxy(e(2, 8), [0, 1, 2]) == [0, 0, 1]
    assert weak_proxy(HilbertVector.zeros(8), [0, 3, 7]) == [0, 0, 0]
    assert weak_proxy(3 * e(1, 8) + 4 * e(5, 8), [1, 5]) == [3, 4]
    with pytest.raises(IndexError):
        weak_proxy(e(2, 8), [8])


def test_trace_row_finite():
    with pytest.raises(ValueError):
        TraceRow("dr", 0, norm_iterate=math.nan)
    with pytest.raises(ValueError):
        TraceRow("dr", 0, coupling_residual=math.inf)


def test_fejer_examples(dim16_cone):
    assert fejer_check(_norm_trace([0.0] * 5)).value == 0.0
    report = fejer_check(run(dim16_cone, "altproj", iterations=80))
    assert report.passed
    bad = fejer_check(_norm_trace([1.0, 0.9, 0.95, 0.8, 1.2]))
    assert not bad.passed and bad.index == 1 and bad.value == pytest.approx(0.4)
    assert fejer_check([]).passed


def test_summability_examples(dim16_cone):
    zero = summability_check(_norm_trace([0.0] * 4))
    assert zero.passed and zero.value == 0.0 and zero.detail["bound"] == 0.0
    report = summability_check(run(dim16_cone, "altproj", iterations=80))
    assert report.passed and report.detail["bound"] == 1.0
    one = run(dim16_cone, "altproj", iterations=1)
    assert one[0].v_residual == 0.0 and summability_check(one).detail["last_v_residual"] == 0.0


def test_coupling_examples(dim16_cone):
    zero = HilbertVector.zeros(16)
    assert coupling_check(run(dim16_cone, "dr", zero, 5), run(dim16_cone, "altproj", zero, 6)).value == 0.0
    report = coupling_check(run(dim16_cone, "dr", iterations=50), run(dim16_cone, "altproj", iterations=51))
    assert report.passed
    other = build_cone(13.0, 1 / 16, 16)
    with pytest.raises(ConfigurationMismatch):
        coupling_check(run(dim16_cone, "dr", iterations=3), run(other, "altproj", iterations=4))
    with pytest.raises(ConfigurationMismatch):
        coupling_check(run(dim16_cone, "dr", iterations=3), run(dim16_cone, "altproj", e(3, 16), 4))
    with pytest.raises(ConfigurationMismatch):
        coupling_check(run(dim16_cone, "altproj", iterations=3), run(dim16_cone, "altproj", iterations=4))


def test_spingarn_reduction(dim16_cone):
    report = spingarn_reduction_check(run(dim16_cone, "spingarn", iterations=50), run(dim16_cone, "altproj", iterations=50))
    assert report.passed and report.detail["max_u_norm"] == 0.0
    with pytest.raises(ConfigurationMismatch):
        spingarn_reduction_check(run(dim16_cone, "dr", iterations=3), run(dim16_cone, "altproj", iterations=3))


def test_collapse_and_column_max(dim16_cone):
    dr = run(dim16_cone, "dr", iterations=30)
    assert collapse_check(dr).passed
    # y_0 off V: y_n = x_{n-1} + proj_Vperp(y_0)
    assert collapse_check(run(dim16_cone, "dr", e(0, 16) + e(2, 16), 10)).passed
    with pytest.raises(ConfigurationMismatch):
        collapse_check(run(dim16_cone, "altproj", iterations=3))
    r = column_max_check("c", dr, "coupling_residual", 1e-8)
    assert r.passed and r.index is not None


def test_firm_audit_examples(dim16_cone):
    x = HilbertVector(np.linspace(-1, 1, 16))
    assert firm_nonexpansiveness_audit(dim16_cone, pairs=[(x, x)]).value == 0.0
    assert firm_nonexpansiveness_audit(dim16_cone, pairs=[(e(0, 16), HilbertVector.zeros(16))]).value == 0.0
    report = firm_nonexpansiveness_audit(dim16_cone, samples=1000, seed=42)
    assert report.passed and report.detail == {"samples": 1000, "seed": 42}
    with pytest.raises(ValueError):
        firm_nonexpansiveness_audit(dim16_cone, samples=0)


def test_firm_audit_deterministic(dim16_cone):
    a = firm_nonexpansiveness_audit(dim16_cone, samples=50, seed=7)
    b = firm_nonexpansiveness_audit(dim16_cone, samples=50, seed=7)
    assert a == b


def test_norm_floor_and_decay():
    rows = [TraceRow("altproj", n, norm_iterate=v, coord_proxies=(c,)) for n, (v, c) in
            enumerate([(1.0, 0.5), (0.7, 0.8), (0.9, 0.1)])]
    trace = Trace(rows, algorithm="altproj", probes=(3,))
    assert norm_floor(trace) == (0.7, 1)
    assert coordinate_decay(trace, early=1) == [{"probe": 3, "final": 0.1, "early_max": 0.8, "decayed": True}]
    # equality is not decay
    flat = Trace([TraceRow("altproj", n, coord_proxies=(0.2,)) for n in range(3)], probes=(0,))
    assert coordinate_decay(flat, early=1)[0]["decayed"] is False


def test_report_line():
    report = fejer_check(_norm_trace([1.0, 1.5]))
    assert report.line().startswith("[FAIL] fejer_monotonicity: 5.000e-01 (tol 1e-12) at n=0")
    assert report.as_dict()["passed"] is False
