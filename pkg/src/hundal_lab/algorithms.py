"""Douglas-Rachford, Spingarn's partial inverses and alternating projections.

All three are unrelaxed and take a ConeApprox that fixes the operator ``B``.
The DR recursion is coded in its general ``(y_n, x_n)`` form; the in-``V``
simplifications are measured by the diagnostics, never assumed here.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .cone import ConeApprox, project_cone
from .diagnostics import DEFAULT_PROBES, Trace, TraceRow, weak_proxy
from .hilbert import DimensionMismatch, HilbertVector, basis_vector, norm, proj_V, proj_Vperp
from .operators import resolvent_A, resolvent_B

ALGORITHMS = ("dr", "spingarn", "altproj")
DEFAULT_ITERATIONS = 200


@dataclass(frozen=True)
class DRState:
    n: int
    y: HilbertVector
    x: HilbertVector


@dataclass(frozen=True)
class SpingarnState:
    n: int
    x: HilbertVector
    u: HilbertVector

    def __post_init__(self):
        if self.x.coords[0] != 0.0:
            raise ValueError("Spingarn x must lie in V (coordinate 0 equal to 0)")
        if self.u.coords[1:].any():
            raise ValueError("Spingarn u must lie in V-perp (only coordinate 0 nonzero)")


@dataclass(frozen=True)
class AltProjState:
    n: int
    z: HilbertVector


def _check_dim(cone: ConeApprox, v: HilbertVector):
    if v.dim != cone.dim:
        raise DimensionMismatch(f"vector dim {v.dim} != cone dim {cone.dim}")


def dr_start(cone: ConeApprox, y0: HilbertVector) -> DRState:
    _check_dim(cone, y0)
    return DRState(0, y0, resolvent_B(cone, y0))


def dr_step(cone: ConeApprox, s: DRState) -> DRState:
    # y' = y + J_A(2x - y) - x ;  x' = J_B(y')
    y = s.y + resolvent_A(2.0 * s.x - s.y) - s.x
    return DRState(s.n + 1, y, resolvent_B(cone, y))


def spingarn_step(cone: ConeApprox, s: SpingarnState) -> SpingarnState:
    w = s.x + s.u
    jb = resolvent_B(cone, w)
    # J_{B^-1} = Id - J_B
    return SpingarnState(s.n + 1, proj_V(jb), proj_Vperp(w - jb))


def altproj_step(cone: ConeApprox, s: AltProjState) -> AltProjState:
    _check_dim(cone, s.z)
    return AltProjState(s.n + 1, project_cone(cone, proj_V(s.z)))


def default_init(algorithm: str, dim: int):
    e2 = basis_vector(2, dim)
    if algorithm == "spingarn":
        return (e2, HilbertVector.zeros(dim))
    return e2


def run(cone: ConeApprox, algorithm: str, init=None, iterations: int = DEFAULT_ITERATIONS,
        probes: Sequence[int] = DEFAULT_PROBES) -> Trace:
    """Run one algorithm and return ``iterations`` rows (n = 0 .. iterations-1).

    ``init`` is ``y_0`` for DR, ``z_0`` for alternating projections and
    ``x_0`` or ``(x_0, u_0)`` for Spingarn; it defaults to ``e_2`` (with
    ``u_0 = 0``). DR and Spingarn also advance the alternating-projection
    sequence started from ``y_0`` (resp. ``x_0 + u_0``) so each row carries
    the reference quantities.
    """
    if algorithm not in ALGORITHMS:
        raise ValueError(f"algorithm must be one of {ALGORITHMS}, got {algorithm!r}")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if init is None:
        init = default_init(algorithm, cone.dim)
    probes = tuple(probes)

    if algorithm == "spingarn":
        x0, u0 = init if isinstance(init, tuple) else (init, HilbertVector.zeros(cone.dim))
        _check_dim(cone, x0)
        _check_dim(cone, u0)
        state = SpingarnState(0, x0, u0)
        z = x0 + u0
        trace_init = (x0, u0)
    elif algorithm == "dr":
        state = dr_start(cone, init)
        z = init
        trace_init = init
    else:
        _check_dim(cone, init)
        state = AltProjState(0, init)
        z = init
        trace_init = init

    trace = Trace(algorithm=algorithm, cone_key=cone.key, probes=probes, init=trace_init)
    z_next = altproj_step(cone, AltProjState(0, z)).z
    for n in range(iterations):
        norm_z = norm(z)
        common = dict(
            algorithm=algorithm,
            n=n,
            v_residual=norm(proj_V(z) - z),
            fejer_delta=norm_z - norm(z_next),
            norm_z=norm_z,
            reference=z,
        )
        if algorithm == "dr":
            row = TraceRow(
                norm_iterate=norm(state.x),
                norm_y=norm(state.y),
                coupling_residual=norm(state.x - proj_V(z_next)),
                coord_proxies=tuple(weak_proxy(state.x, probes)),
                iterate=state.x,
                governing=state.y,
                **common,
            )
        elif algorithm == "spingarn":
            row = TraceRow(
                norm_iterate=norm(state.x),
                u_norm=norm(state.u),
                coupling_residual=norm(state.x - proj_V(z)),
                coord_proxies=tuple(weak_proxy(state.x, probes)),
                iterate=state.x,
                governing=state.u,
                **common,
            )
        else:
            row = TraceRow(
                norm_iterate=norm_z,
                coord_proxies=tuple(weak_proxy(z, probes)),
                iterate=z,
                **common,
            )
        trace.append(row)
        if n + 1 == iterations:
            break
        if algorithm == "dr":
            state = dr_step(cone, state)
        elif algorithm == "spingarn":
            state = spingarn_step(cone, state)
        z = z_next
        z_next = altproj_step(cone, AltProjState(n + 1, z)).z
    return trace
