import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from hundal_lab.hilbert import (
    DimensionMismatch,
    HilbertVector,
    basis_vector,
    combine,
    inner,
    norm,
    proj_V,
    proj_Vperp,
)

e = basis_vector


def vec(*pairs, dim=8):
    out = HilbertVector.zeros(dim)
    for c, k in pairs:
        out = out + c * e(k, dim)
    return out


coords = arrays(np.float64, 8, elements=st.floats(-1e3, 1e3, allow_nan=False))


def test_inner_examples():
    assert inner(e(1, 8), e(1, 8)) == 1
    assert inner(e(0, 8), e(1, 8)) == 0
    assert inner(vec((2, 1), (3, 2)), e(2, 8)) == 3


def test_inner_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        inner(e(0, 4), e(0, 5))
    with pytest.raises(DimensionMismatch):
        combine(1, e(0, 4), 1, e(0, 5))
    with pytest.raises(DimensionMismatch):
        e(0, 4) + e(0, 5)


def test_norm_examples():
    assert norm(e(2, 8)) == 1
    assert norm(HilbertVector.zeros(8)) == 0
    assert norm(vec((3, 1), (4, 2))) == 5


def test_proj_V_examples():
    assert proj_V(e(0, 8)) == HilbertVector.zeros(8)
    assert proj_V(e(2, 8)) == e(2, 8)
    assert proj_V(e(0, 8) + e(1, 8)) == e(1, 8)


def test_proj_Vperp_examples():
    assert proj_Vperp(e(0, 8)) == e(0, 8)
    assert proj_Vperp(e(2, 8)) == HilbertVector.zeros(8)
    assert proj_Vperp(vec((2, 0), (5, 3))) == 2 * e(0, 8)


def test_combine_examples():
    x = vec((0.3, 1), (-2.5, 6))
    assert combine(1, e(1, 8), 1, e(2, 8)) == e(1, 8) + e(2, 8)
    assert combine(2, e(1, 8), 0, e(2, 8)) == 2 * e(1, 8)
    assert combine(1, x, -1, x) == HilbertVector.zeros(8)


def test_basis_vector():
    v = basis_vector(2, 8)
    assert v.dim == 8 and v[2] == 1 and norm(v) == 1
    assert basis_vector(0, 4).coords.tolist() == [1, 0, 0, 0]
    with pytest.raises(IndexError):
        basis_vector(4, 4)
    with pytest.raises(IndexError):
        basis_vector(-1, 4)


def test_vectors_are_immutable():
    v = e(1, 4)
    with pytest.raises(ValueError):
        v.coords[0] = 5.0
    with pytest.raises(ValueError):
        HilbertVector([1.0, np.nan])


@given(coords)
def test_projection_properties(c):
    u = HilbertVector(c)
    pu = proj_V(u)
    scale = max(1.0, norm(u) ** 2)
    assert proj_V(pu) == pu
    assert abs(inner(u - pu, pu)) <= 1e-12 * scale
    # componentwise selection: the split is exact
    assert np.array_equal((pu + proj_Vperp(u)).coords, u.coords)
    assert pu[0] == 0.0
    assert not proj_Vperp(u).coords[1:].any()


@given(coords, coords)
def test_nonexpansive_and_cauchy_schwarz(a, b):
    u, v = HilbertVector(a), HilbertVector(b)
    assert norm(proj_V(u) - proj_V(v)) <= norm(u - v) + 1e-12
    assert inner(u, v) == inner(v, u)
    assert abs(inner(u, v)) <= norm(u) * norm(v) * (1 + 1e-12) + 1e-12


def test_numpy_scalar_multiplication_stays_a_vector():
    v = basis_vector(1, 4)
    for s in (np.float64(2.5), np.int64(3)):
        assert isinstance(s * v, HilbertVector) and isinstance(v * s, HilbertVector)
    assert (np.float64(2.5) * v)[1] == 2.5
