"""Resolvents of the two operators A and B.

``A`` is the normal cone of ``V`` and ``B = T^{-1} - Id`` with
``T = proj_V o proj_K o proj_V``. Neither set-valued operator is represented;
the algorithms only consume

    J_A = proj_V,    J_B = T,    J_{B^{-1}} = Id - J_B.
"""
from __future__ import annotations

from .cone import ConeApprox, project_cone
from .hilbert import DimensionMismatch, HilbertVector, combine, proj_V

KINDS = ("J_A", "J_B", "J_B_inverse")


def resolvent_A(x: HilbertVector) -> HilbertVector:
    return proj_V(x)


def resolvent_B(cone: ConeApprox, x: HilbertVector) -> HilbertVector:
    if x.dim != cone.dim:
        raise DimensionMismatch(f"vector dim {x.dim} != cone dim {cone.dim}")
    return proj_V(project_cone(cone, proj_V(x)))


def resolvent_B_inverse(cone: ConeApprox, x: HilbertVector) -> HilbertVector:
    return x - resolvent_B(cone, x)


class ResolventMap:
    """A single-valued resolvent tagged by kind.

    >>> J = ResolventMap("J_B", cone)
    >>> J(x)  # same as resolvent_B(cone, x)
    """

    def __init__(self, kind: str, cone: ConeApprox | None = None):
        if kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
        if kind != "J_A" and cone is None:
            raise ValueError(f"{kind} needs a cone")
        self.kind = kind
        self.cone = cone

    def __call__(self, x: HilbertVector) -> HilbertVector:
        if self.kind == "J_A":
            return resolvent_A(x)
        if self.kind == "J_B":
            return resolvent_B(self.cone, x)
        return resolvent_B_inverse(self.cone, x)

    def __repr__(self):
        return f"ResolventMap({self.kind!r})"


def reflected_resolvent(J, x: HilbertVector) -> HilbertVector:
    """``2 J(x) - x`` for any resolvent callable ``J``."""
    return combine(2.0, J(x), -1.0, x)
