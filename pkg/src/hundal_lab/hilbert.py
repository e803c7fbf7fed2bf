"""Truncated model of a separable Hilbert space.

Vectors are coordinate arrays over the orthonormal basis ``e_0, ..., e_{N-1}``.
The only closed subspace needed is ``V = {e_0}^perp`` and its complement.
"""
from __future__ import annotations

import numpy as np

DEFAULT_DIM = 64


class DimensionMismatch(ValueError):
    """Raised when vectors of different truncation levels are combined."""


class HilbertVector:
    """Immutable dense coordinate vector.

    Parameters
    ----------
    coords : array_like
        Finite real coordinates; ``coords[k] = <x, e_k>``.
    """

    __slots__ = ("_coords",)
    # make numpy scalars defer to __rmul__ instead of broadcasting
    __array_ufunc__ = None

    def __init__(self, coords):
        arr = np.array(coords, dtype=np.float64).ravel()
        if arr.size == 0:
            raise ValueError("a HilbertVector needs at least one coordinate")
        if not np.all(np.isfinite(arr)):
            raise ValueError("coordinates must be finite")
        arr.setflags(write=False)
        self._coords = arr

    @classmethod
    def _wrap(cls, arr: np.ndarray) -> "HilbertVector":
        # trusted internal constructor: arr is a fresh float64 1-d array
        obj = cls.__new__(cls)
        arr.setflags(write=False)
        obj._coords = arr
        return obj

    @classmethod
    def zeros(cls, dim: int) -> "HilbertVector":
        if dim < 1:
            raise ValueError(f"dim must be positive, got {dim}")
        return cls._wrap(np.zeros(dim))

    @property
    def coords(self) -> np.ndarray:
        """Read-only view of the coordinates."""
        return self._coords

    @property
    def dim(self) -> int:
        return self._coords.shape[0]

    def __len__(self):
        return self.dim

    def __getitem__(self, k):
        return float(self._coords[k])

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._coords
        return self._coords.astype(dtype)

    def _check(self, other: "HilbertVector"):
        if not isinstance(other, HilbertVector):
            return NotImplemented
        if other.dim != self.dim:
            raise DimensionMismatch(f"dimensions differ: {self.dim} != {other.dim}")
        return other

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return HilbertVector._wrap(self._coords + other._coords)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return HilbertVector._wrap(self._coords - other._coords)

    def __mul__(self, scalar):
        if isinstance(scalar, HilbertVector):
            return NotImplemented
        return HilbertVector._wrap(float(scalar) * self._coords)

    __rmul__ = __mul__

    def __neg__(self):
        return HilbertVector._wrap(-self._coords)

    def __eq__(self, other):
        if not isinstance(other, HilbertVector):
            return NotImplemented
        return self.dim == other.dim and bool(np.array_equal(self._coords, other._coords))

    def __hash__(self):
        return hash((self.dim, self._coords.tobytes()))

    def __repr__(self):
        nz = np.flatnonzero(self._coords)
        if nz.size == 0:
            return f"HilbertVector(0, dim={self.dim})"
        terms = " + ".join(f"{self._coords[k]:.6g}*e{k}" for k in nz[:6])
        if nz.size > 6:
            terms += " + ..."
        return f"HilbertVector({terms}, dim={self.dim})"


def _same_dim(u: HilbertVector, v: HilbertVector) -> None:
    if u.dim != v.dim:
        raise DimensionMismatch(f"dimensions differ: {u.dim} != {v.dim}")


def inner(u: HilbertVector, v: HilbertVector) -> float:
    _same_dim(u, v)
    return float(np.dot(u.coords, v.coords))


def norm(u: HilbertVector) -> float:
    # np.linalg.norm rescales internally, so tiny coordinates do not underflow
    return float(np.linalg.norm(u.coords))


def proj_V(u: HilbertVector) -> HilbertVector:
    """Project onto ``V = {e_0}^perp`` by zeroing coordinate 0."""
    out = u.coords.copy()
    out[0] = 0.0
    return HilbertVector._wrap(out)


def proj_Vperp(u: HilbertVector) -> HilbertVector:
    """Project onto ``span{e_0}``: keep coordinate 0 only."""
    out = np.zeros(u.dim)
    out[0] = u.coords[0]
    return HilbertVector._wrap(out)


def combine(a: float, u: HilbertVector, b: float, v: HilbertVector) -> HilbertVector:
    """Return ``a*u + b*v``."""
    _same_dim(u, v)
    return HilbertVector._wrap(a * u.coords + b * v.coords)


def basis_vector(k: int, dim: int) -> HilbertVector:
    if dim < 1:
        raise ValueError(f"dim must be positive, got {dim}")
    if not 0 <= k < dim:
        raise IndexError(f"basis index {k} out of range for dim {dim}")
    out = np.zeros(dim)
    out[k] = 1.0
    return HilbertVector._wrap(out)


def distance(u: HilbertVector, v: HilbertVector) -> float:
    _same_dim(u, v)
    return float(np.linalg.norm(u.coords - v.coords))


def in_V(u: HilbertVector) -> bool:
    return u.coords[0] == 0.0
