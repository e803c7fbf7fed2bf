"""Per-iteration diagnostics and the checks run over completed traces."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .hilbert import HilbertVector, norm, proj_V, proj_Vperp
from .operators import resolvent_B

FEJER_TOL = 1e-12
SUMMABILITY_TOL = 1e-9
COUPLING_TOL = 1e-8
U_NORM_TOL = 1e-12
COLLAPSE_TOL = 1e-12
FIRM_TOL = 1e-9
DEFAULT_PROBES = tuple(range(6))
DEFAULT_SEED = 42


class ConfigurationMismatch(ValueError):
    """Traces being compared were not produced from the same setup."""


@dataclass
class TraceRow:
    """Diagnostics for one iteration.

    ``norm_iterate`` is ``||x_n||`` for DR and Spingarn and ``||z_n||`` for
    alternating projections. Every row also carries the alternating-projection
    reference ``z_n`` run in lockstep, which feeds ``fejer_delta``
    (``||z_n|| - ||z_{n+1}||``), ``v_residual`` (``||proj_V z_n - z_n||``)
    and ``coupling_residual`` (DR: ``||x_n - proj_V z_{n+1}||``; Spingarn:
    ``||x_n - proj_V z_n||``; 0 for alternating projections itself).
    Fields that do not apply to an algorithm are 0.
    """

    algorithm: str
    n: int
    norm_iterate: float = 0.0
    norm_y: float = 0.0
    u_norm: float = 0.0
    v_residual: float = 0.0
    fejer_delta: float = 0.0
    coupling_residual: float = 0.0
    coord_proxies: tuple = ()
    norm_z: float = 0.0
    iterate: HilbertVector | None = field(default=None, repr=False, compare=False)
    reference: HilbertVector | None = field(default=None, repr=False, compare=False)
    governing: HilbertVector | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        for name in ("norm_iterate", "norm_y", "u_norm", "v_residual", "fejer_delta", "coupling_residual", "norm_z"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"TraceRow.{name} is not finite")


class Trace(list):
    """List of TraceRow plus the provenance needed to compare runs."""

    def __init__(self, rows=(), *, algorithm="", cone_key=None, probes=DEFAULT_PROBES, init=None):
        super().__init__(rows)
        self.algorithm = algorithm
        self.cone_key = cone_key
        self.probes = tuple(probes)
        self.init = init


@dataclass(frozen=True)
class Report:
    name: str
    passed: bool
    value: float
    tolerance: float
    index: int | None = None
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        where = "" if self.index is None else f" at n={self.index}"
        return f"[{status}] {self.name}: {self.value:.3e} (tol {self.tolerance:.0e}){where}"

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "value": self.value,
            "tolerance": self.tolerance,
            "index": self.index,
            **self.detail,
        }


def weak_proxy(x: HilbertVector, probes: Sequence[int]) -> list[float]:
    """Coordinates ``<x, e_k>`` for each probe index ``k``."""
    out = []
    for k in probes:
        if not 0 <= k < x.dim:
            raise IndexError(f"probe index {k} out of range for dim {x.dim}")
        out.append(float(x.coords[k]))
    return out


def fejer_check(trace: Sequence[TraceRow], tol: float = FEJER_TOL) -> Report:
    """Largest increase ``||z_{n+1}|| - ||z_n||`` along the reference sequence.

    The reported index is the first row whose increase exceeds ``tol``, or
    the row of the largest increase if none does.
    """
    if not trace:
        return Report("fejer_monotonicity", True, 0.0, tol)
    increases = np.array([-row.fejer_delta for row in trace])
    worst = max(0.0, float(increases.max()))
    bad = np.flatnonzero(increases > tol)
    if bad.size:
        return Report("fejer_monotonicity", False, worst, tol, index=int(trace[bad[0]].n))
    index = int(trace[int(np.argmax(increases))].n) if worst > 0 else None
    return Report("fejer_monotonicity", True, worst, tol, index=index)


def summability_check(trace: Sequence[TraceRow], tol: float = SUMMABILITY_TOL) -> Report:
    """``sum ||proj_V z_n - z_n||^2 <= ||z_0||^2``, the telescoped Fejer bound."""
    if not trace:
        return Report("residual_summability", True, 0.0, tol)
    total = math.fsum(row.v_residual**2 for row in trace)
    bound = trace[0].norm_z ** 2
    return Report(
        "residual_summability",
        total <= bound + tol,
        total,
        tol,
        detail={"bound": bound, "last_v_residual": trace[-1].v_residual},
    )


def coupling_check(dr_trace: Trace, altproj_trace: Trace, tol: float = COUPLING_TOL) -> Report:
    """``max_n ||x_n^DR - proj_V z_{n+1}||`` from two independent runs.

    Compares rows ``n`` while ``z_{n+1}`` is present in ``altproj_trace``.
    """
    if dr_trace.algorithm != "dr" or altproj_trace.algorithm != "altproj":
        raise ConfigurationMismatch("coupling_check needs a dr trace and an altproj trace")
    if dr_trace.cone_key != altproj_trace.cone_key:
        raise ConfigurationMismatch(f"cone grids differ: {dr_trace.cone_key} vs {altproj_trace.cone_key}")
    if dr_trace.init != altproj_trace.init:
        raise ConfigurationMismatch("runs start from different initial vectors")
    worst, where = 0.0, None
    for row in dr_trace:
        if row.n + 1 >= len(altproj_trace):
            break
        z_next = altproj_trace[row.n + 1].iterate
        r = norm(row.iterate - proj_V(z_next))
        if where is None or r > worst:
            worst, where = r, row.n
    return Report("dr_altproj_coupling", worst <= tol, worst, tol, index=where)


def spingarn_reduction_check(sp_trace: Trace, altproj_trace: Trace, tol: float = COUPLING_TOL,
                             u_tol: float = U_NORM_TOL) -> Report:
    """``u_n = 0`` and ``x_n^Sp = proj_V z_n`` against an independent run."""
    if sp_trace.algorithm != "spingarn" or altproj_trace.algorithm != "altproj":
        raise ConfigurationMismatch("needs a spingarn trace and an altproj trace")
    if sp_trace.cone_key != altproj_trace.cone_key:
        raise ConfigurationMismatch(f"cone grids differ: {sp_trace.cone_key} vs {altproj_trace.cone_key}")
    worst_x, worst_u = 0.0, 0.0
    for row, ref in zip(sp_trace, altproj_trace):
        worst_x = max(worst_x, norm(row.iterate - proj_V(ref.iterate)))
        worst_u = max(worst_u, row.u_norm)
    passed = worst_x <= tol and worst_u <= u_tol
    return Report("spingarn_reduction", passed, worst_x, tol, detail={"max_u_norm": worst_u, "u_tolerance": u_tol})


def column_max_check(name: str, trace: Sequence[TraceRow], column: str, tol: float) -> Report:
    """Maximum of one numeric column against a tolerance."""
    if not trace:
        return Report(name, True, 0.0, tol)
    values = [getattr(row, column) for row in trace]
    k = int(np.argmax(values))
    return Report(name, values[k] <= tol, float(values[k]), tol, index=int(trace[k].n))


def collapse_check(trace: Trace, tol: float = COLLAPSE_TOL) -> Report:
    """DR governing sequence: ``y_n = x_{n-1} + proj_Vperp(y_0)`` for n >= 1.

    With ``y_0`` in ``V`` this is ``y_n = x_{n-1}``.
    """
    if trace.algorithm != "dr":
        raise ConfigurationMismatch("collapse_check needs a dr trace")
    worst, where = 0.0, None
    offset = proj_Vperp(trace[0].governing) if trace else None
    for prev, row in zip(trace, trace[1:]):
        r = norm(row.governing - prev.iterate - offset)
        if where is None or r > worst:
            worst, where = r, row.n
    return Report("dr_governing_collapse", worst <= tol, worst, tol, index=where)


def firm_nonexpansiveness_audit(cone, samples: int = 1000, seed: int = DEFAULT_SEED, tol: float = FIRM_TOL,
                                pairs=None) -> Report:
    """Sample ``<x - y, Tx - Ty> - ||Tx - Ty||^2`` for ``T = J_B``.

    Pairs are drawn uniformly from ``[-1, 1]^dim`` by a seeded generator
    unless ``pairs`` supplies them explicitly.
    """
    if pairs is None:
        if samples < 1:
            raise ValueError("samples must be >= 1")
        rng = np.random.default_rng(seed)
        draws = rng.uniform(-1.0, 1.0, size=(samples, 2, cone.dim))
        pairs = [(HilbertVector(a), HilbertVector(b)) for a, b in draws]
    worst, where = math.inf, None
    for i, (x, y) in enumerate(pairs):
        d = x - y
        dT = resolvent_B(cone, x) - resolvent_B(cone, y)
        q = float(np.dot(d.coords, dT.coords) - np.dot(dT.coords, dT.coords))
        if q < worst:
            worst, where = q, i
    return Report("firm_nonexpansiveness", worst >= -tol, worst, tol, index=where,
                  detail={"samples": len(pairs), "seed": seed})


def norm_floor(trace: Sequence[TraceRow]) -> tuple[float, int]:
    """Smallest ``norm_iterate`` over the trace and where it occurs."""
    values = [row.norm_iterate for row in trace]
    k = int(np.argmin(values))
    return float(values[k]), int(trace[k].n)


def coordinate_decay(trace: Sequence[TraceRow], early: int = 10, at: int | None = None) -> list[dict]:
    """Compare each probe coordinate at row ``at`` (default: last) with its early maximum.

    For every probe ``k`` reports ``|<iterate_at, e_k>|``, the maximum of
    ``|<iterate_n, e_k>|`` over ``n <= early`` and whether the former is
    strictly smaller.
    """
    rows = list(trace)
    final = rows[-1] if at is None else next(r for r in rows if r.n == at)
    early_rows = [r for r in rows if r.n <= early]
    out = []
    for j, k in enumerate(getattr(trace, "probes", DEFAULT_PROBES)):
        early_max = max(abs(r.coord_proxies[j]) for r in early_rows)
        late = abs(final.coord_proxies[j])
        out.append({"probe": k, "final": late, "early_max": early_max, "decayed": late < early_max})
    return out
