"""Finitely generated inner approximation of Hundal's cone and projection onto it.

The cone is the closed convex conical hull of the curve

    p(xi) = exp(-100 xi^3) e_0 + cos(pi t / 2) e_{k+1} + sin(pi t / 2) e_{k+2},

with ``k = floor(xi)`` and ``t = xi - k``. Here it is replaced by the conical
hull of finitely many normalized curve points on a uniform grid in ``xi``;
projecting onto that hull is a nonnegative least squares problem.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import _kernel
from .hilbert import DimensionMismatch, HilbertVector

KKT_TOL = 1e-12
DEFAULT_STEP = 1.0 / 32
BRUTEFORCE_MAX_GENERATORS = 12


class ConeError(ValueError):
    """Invalid cone construction parameters."""


class NnlsConvergenceError(RuntimeError):
    """The active-set solver hit its iteration cap."""


@dataclass(frozen=True)
class CurveParam:
    xi: float

    def __post_init__(self):
        if not (math.isfinite(self.xi) and self.xi >= 0):
            raise ConeError(f"curve parameter must be finite and >= 0, got {self.xi}")


def curve_point(p, dim: int) -> HilbertVector:
    """Evaluate the (unnormalized) Hundal curve at ``p`` (a CurveParam or float)."""
    xi = p.xi if isinstance(p, CurveParam) else CurveParam(float(p)).xi
    k = math.floor(xi)
    if k + 2 >= dim:
        raise ConeError(f"dim={dim} too small for xi={xi}: need dim > {k + 2}")
    t = xi - k
    out = np.zeros(dim)
    # subnormal past xi ~ 1.94 and exactly 0.0 past ~1.95; accepted as-is
    out[0] = math.exp(-100.0 * xi**3)
    out[k + 1] = math.cos(math.pi * t / 2)
    out[k + 2] = math.sin(math.pi * t / 2)
    return HilbertVector._wrap(out)


def xi_grid(xi_max: float, step: float) -> np.ndarray:
    """Uniform grid ``0, step, 2 step, ...`` that always ends at ``xi_max``."""
    if not (math.isfinite(xi_max) and xi_max > 0):
        raise ConeError(f"xi_max must be positive, got {xi_max}")
    if not (math.isfinite(step) and 0 < step <= xi_max):
        raise ConeError(f"grid step must satisfy 0 < step <= xi_max, got {step}")
    count = math.floor(xi_max / step + 1e-9)
    grid = np.arange(count + 1, dtype=np.float64) * step
    if xi_max - grid[-1] > 1e-9 * step:
        grid = np.append(grid, xi_max)
    else:
        grid[-1] = xi_max
    return grid


@dataclass(frozen=True, eq=False)
class ConeApprox:
    """Conical hull of normalized curve points.

    ``matrix[i]`` is the unit generator built from ``xi_grid[i]``.
    """

    matrix: np.ndarray
    xi_grid: np.ndarray
    dim: int
    xi_max: float
    step: float

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    @property
    def generators(self) -> list[HilbertVector]:
        return [HilbertVector(row) for row in self.matrix]

    @property
    def key(self) -> tuple:
        """Provenance tuple; equal keys mean identical generator sets."""
        return (self.dim, self.xi_max, self.step)

    def __len__(self):
        return self.size


def build_cone(xi_max: float, step: float = DEFAULT_STEP, dim: int = 64) -> ConeApprox:
    xi_max = float(xi_max)
    step = float(step)
    grid = xi_grid(xi_max, step)
    if math.floor(xi_max) + 2 >= dim:
        raise ConeError(f"dim={dim} too small for xi_max={xi_max}: need dim >= {math.floor(xi_max) + 3}")
    rows = np.empty((grid.size, dim))
    for i, xi in enumerate(grid):
        v = curve_point(float(xi), dim).coords
        rows[i] = v / np.linalg.norm(v)
    rows.setflags(write=False)
    grid.setflags(write=False)
    return ConeApprox(matrix=rows, xi_grid=grid, dim=dim, xi_max=xi_max, step=step)


@dataclass(frozen=True)
class NnlsResult:
    coefficients: np.ndarray
    residual_norm: float
    iterations: int


def _generator_matrix(generators) -> np.ndarray:
    if isinstance(generators, ConeApprox):
        return generators.matrix
    if isinstance(generators, np.ndarray):
        G = generators
    else:
        gens = list(generators)
        if not gens:
            raise ValueError("need at least one generator")
        dims = {g.dim for g in gens}
        if len(dims) != 1:
            raise DimensionMismatch(f"generators have mixed dimensions {sorted(dims)}")
        G = np.vstack([g.coords for g in gens])
    if G.ndim != 2 or G.shape[0] == 0:
        raise ValueError("need a nonempty 2-d generator matrix")
    return np.ascontiguousarray(G, dtype=np.float64)


def _rhs(G: np.ndarray, b) -> np.ndarray:
    arr = b.coords if isinstance(b, HilbertVector) else np.asarray(b, dtype=np.float64)
    if arr.shape != (G.shape[1],):
        raise DimensionMismatch(f"vector of dim {arr.shape[0]} against generators of dim {G.shape[1]}")
    return np.ascontiguousarray(arr, dtype=np.float64)


def nnls(generators, b, tol: float = KKT_TOL, max_iter: int | None = None, backend: str | None = None) -> NnlsResult:
    """Nonnegative least squares ``min ||b - sum_i lam_i g_i||`` with ``lam >= 0``.

    Parameters
    ----------
    generators : ConeApprox, sequence of HilbertVector, or (n, dim) array
    b : HilbertVector or array
    tol : float
        Absolute dual-feasibility tolerance of the active-set method.
    max_iter : int, optional
        Iteration cap; defaults to ``10 * n``.
    backend : {"compiled", "python"}, optional
        Override the kernel chosen at import.

    Raises
    ------
    NnlsConvergenceError
        If the cap is reached before the dual-feasibility test passes.
    """
    G = _generator_matrix(generators)
    rhs = _rhs(G, b)
    if max_iter is None:
        max_iter = 10 * G.shape[0]
    lam, iterations, converged = _kernel.get_kernel(backend)(G, rhs, float(tol), int(max_iter))
    lam = np.asarray(lam)
    if not converged:
        raise NnlsConvergenceError(f"NNLS did not converge within {max_iter} iterations ({G.shape[0]} generators)")
    residual = rhs - lam @ G
    return NnlsResult(coefficients=lam, residual_norm=float(np.linalg.norm(residual)), iterations=int(iterations))


def kkt_violation(generators, b, coefficients) -> float:
    """Worst violation of the NNLS optimality conditions.

    The max of ``<r, g_i>`` over all generators (dual feasibility), of
    ``|<r, g_i>|`` over generators with positive coefficient (complementary
    slackness), and of ``-lam_i`` (primal feasibility), where
    ``r = b - sum lam_i g_i``. Zero or negative means the certificate holds
    exactly.
    """
    G = _generator_matrix(generators)
    rhs = _rhs(G, b)
    lam = np.asarray(coefficients, dtype=np.float64)
    w = G @ (rhs - lam @ G)
    worst = float(w.max())
    active = lam > 0
    if active.any():
        worst = max(worst, float(np.abs(w[active]).max()))
    return max(worst, float(-lam.min()))


def project_cone(cone, x, backend: str | None = None) -> HilbertVector:
    """Euclidean projection of ``x`` onto the conical hull of the generators."""
    G = _generator_matrix(cone)
    rhs = _rhs(G, x)
    if not rhs.any():
        return HilbertVector._wrap(np.zeros(G.shape[1]))
    res = nnls(G, rhs, backend=backend)
    return HilbertVector._wrap(res.coefficients @ G)


def project_cone_bruteforce(cone, x, tol: float = 1e-10) -> HilbertVector:
    """Projection by enumerating every generator subset.

    Each subset gets an unconstrained least-squares fit; a fit qualifies when
    its coefficients are nonnegative and its residual has nonpositive inner
    product (up to ``tol``) with every generator. Among qualifying fits the
    one with the smallest residual wins. Exponential in the generator count,
    so limited to 12 generators.
    """
    G = _generator_matrix(cone)
    rhs = _rhs(G, x)
    return HilbertVector._wrap(project_cone_bruteforce_many(G, rhs[None, :], tol)[0])


def project_cone_bruteforce_many(cone, xs, tol: float = 1e-10) -> np.ndarray:
    """Brute-force projections of every row of ``xs``; returns an array of the same shape."""
    G = _generator_matrix(cone)
    n, m = G.shape
    if n > BRUTEFORCE_MAX_GENERATORS:
        raise ValueError(f"brute force limited to {BRUTEFORCE_MAX_GENERATORS} generators, got {n}")
    X = np.atleast_2d(np.asarray(xs, dtype=np.float64))
    if X.shape[1] != m:
        raise DimensionMismatch(f"inputs of dim {X.shape[1]} against generators of dim {m}")
    B = X.T
    best = np.zeros_like(B)
    best_res = np.full(B.shape[1], np.inf)
    for size in range(n + 1):
        for subset in itertools.combinations(range(n), size):
            if size == 0:
                coef = np.zeros((0, B.shape[1]))
                P = np.zeros_like(B)
            else:
                sub = G[list(subset)]
                coef, *_ = np.linalg.lstsq(sub.T, B, rcond=None)
                P = sub.T @ np.clip(coef, 0.0, None)
            R = B - P
            ok = (G @ R).max(axis=0) <= tol
            if size:
                ok &= coef.min(axis=0) >= -tol
            res = np.linalg.norm(R, axis=0)
            take = ok & (res < best_res)
            best[:, take] = P[:, take]
            best_res[take] = res[take]
    if not np.all(np.isfinite(best_res)):
        raise NnlsConvergenceError("no subset satisfied the projection conditions")
    return best.T.copy()
