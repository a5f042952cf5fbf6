import math

import pytest
import numpy as np
from numpy.testing import assert_allclose

from hypothesis import given, settings
from hypothesis import strategies as st

import squatcalc as sq
from squatcalc.quaternion import (
    E1,
    E2,
    E3,
    ONE,
    Quaternion,
    as_qarray,
    from_slice_parts,
    left_matrix,
    on_cut,
    qexp_array,
    qinv_array,
    qlog_array,
    qmul_array,
    qpow_array,
    slice_parts,
)


finite = st.floats(-10.0, 10.0, allow_nan=False, allow_infinity=False)
quaternions = st.tuples(finite, finite, finite, finite).map(
    lambda t: Quaternion(*t))


def test_unit_products():
    assert E1 * E1 == -ONE
    assert E2 * E2 == -ONE
    assert E3 * E3 == -ONE
    assert E1 * E2 == E3
    assert E2 * E3 == E1
    assert E3 * E1 == E2
    assert E2 * E1 == -E3


def test_real_scalars_mix_with_quaternions():
    q = Quaternion(1.0, 2.0, 3.0, 4.0)
    assert 2 * q == Quaternion(2.0, 4.0, 6.0, 8.0)
    assert q * 2 == 2 * q
    assert q + 1 == Quaternion(2.0, 2.0, 3.0, 4.0)
    assert 1 - q == Quaternion(0.0, -2.0, -3.0, -4.0)
    assert q / 2 == Quaternion(0.5, 1.0, 1.5, 2.0)


@settings(max_examples=50, deadline=None)
@given(quaternions, quaternions, quaternions)
def test_product_is_associative(a, b, c):
    lhs = (a * b) * c
    rhs = a * (b * c)
    scale = max(1.0, abs(a) * abs(b) * abs(c))
    assert lhs.allclose(rhs, rtol=0, atol=1e-12 * scale)


@settings(max_examples=50, deadline=None)
@given(quaternions, quaternions)
def test_norm_is_multiplicative(a, b):
    assert abs(a * b) == pytest.approx(abs(a) * abs(b), rel=1e-12, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(quaternions)
def test_inverse(q):
    if abs(q) < 1e-3:
        return
    assert (q * q.inv()).allclose(ONE, atol=1e-12)
    assert (q.inv() * q).allclose(ONE, atol=1e-12)


def test_inverse_of_zero_raises():
    with pytest.raises(sq.DomainError):
        Quaternion(0.0).inv()
    with pytest.raises(sq.DomainError):
        qinv_array(np.zeros((3, 4)))


@settings(max_examples=50, deadline=None)
@given(quaternions)
def test_slice_decompose_roundtrip(q):
    sp = sq.slice_decompose(q)
    assert sp.v >= 0.0
    assert abs(sp.axis) == pytest.approx(1.0)
    assert sp.axis.w == 0.0
    assert sp.reconstruct().allclose(q, atol=1e-12)


def test_slice_decompose_real_gets_default_axis():
    sp = sq.slice_decompose(Quaternion(-3.0))
    assert (sp.u, sp.v) == (-3.0, 0.0)
    assert sp.axis == E1


def test_slice_parts_vectorised():
    rng = np.random.default_rng(7)
    a = rng.standard_normal((5, 3, 4))
    a[0, 0, 1:] = 0.0
    u, v, axis = slice_parts(a)
    assert u.shape == v.shape == (5, 3)
    assert_allclose(np.linalg.norm(axis[..., 1:], axis=-1), 1.0)
    assert_allclose(from_slice_parts(u, v, axis), a, atol=1e-14)


@pytest.mark.parametrize("q", [
    Quaternion(1.0, 0.5, -0.2, 0.3),
    Quaternion(-2.0, 0.0, 1e-3, 0.0),
    Quaternion(0.0, 0.0, 0.0, 4.0),
    Quaternion(5.0),
])
def test_exp_log_inverse(q):
    assert sq.qexp(sq.qlog(q)).allclose(q, rtol=1e-12, atol=1e-12)


def test_log_on_cut_raises():
    with pytest.raises(sq.DomainError):
        sq.qlog(Quaternion(-1.0))
    with pytest.raises(sq.DomainError):
        sq.qlog(Quaternion(0.0))
    with pytest.raises(sq.DomainError):
        qlog_array([[1.0, 0, 0, 0], [-2.0, 0, 0, 0]])


def test_on_cut_guard_band():
    mask = on_cut([[-1.0, 1e-16, 0.0, 0.0],
                   [-1.0, 1e-6, 0.0, 0.0],
                   [0.0, 0.0, 0.0, 0.0],
                   [1.0, 0.0, 0.0, 0.0]])
    assert mask.tolist() == [True, False, True, False]


def test_log_stays_in_slice():
    q = Quaternion(0.3, 0.0, 0.4, 0.0)
    lq = sq.qlog(q)
    assert lq.w == pytest.approx(math.log(0.5))
    assert lq.x == 0.0 and lq.z == 0.0
    assert lq.y == pytest.approx(math.atan2(0.4, 0.3))


@pytest.mark.parametrize("alpha", [0.5, 1 / 3, 2.0, -0.5])
def test_real_power_matches_complex_power_in_slice(alpha):
    z = complex(0.7, 1.3)
    q = Quaternion(z.real, 0.0, 0.0, z.imag)
    expected = z**alpha
    p = sq.qpow(q, alpha)
    assert p.w == pytest.approx(expected.real, rel=1e-12)
    assert p.z == pytest.approx(expected.imag, rel=1e-12)
    assert p.x == p.y == 0.0


def test_square_root_squares_back():
    q = Quaternion(1.0, 2.0, -1.0, 0.5)
    r = sq.qpow(q, 0.5)
    assert (r * r).allclose(q, atol=1e-12)


def test_array_functions_broadcast():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((6, 4))
    a[:, 0] = np.abs(a[:, 0]) + 0.1
    assert qexp_array(a).shape == (6, 4)
    assert_allclose(qexp_array(qlog_array(a)), a, atol=1e-12)
    assert_allclose(qpow_array(a, 1.0), a, atol=1e-12)


def test_left_matrix():
    rng = np.random.default_rng(11)
    q, b = rng.standard_normal((2, 4))
    assert_allclose(left_matrix(q) @ b, qmul_array(q, b), atol=1e-14)


@pytest.mark.parametrize(("text", "expected"), [
    ("1+2i-3j+4k", (1.0, 2.0, -3.0, 4.0)),
    (" 1 + 2 i ", (1.0, 2.0, 0.0, 0.0)),
    ("-k", (0.0, 0.0, 0.0, -1.0)),
    ("2.5e-1j", (0.0, 0.0, 0.25, 0.0)),
    ("3*i+1", (1.0, 3.0, 0.0, 0.0)),
    ("[1, 0, 0, 2]", (1.0, 0.0, 0.0, 2.0)),
])
def test_parse_quaternion(text, expected):
    assert tuple(sq.parse_quaternion(text)) == expected


@pytest.mark.parametrize("text", ["", "1++i", "x", "[1, 2]", "[1,", "2i3"])
def test_parse_quaternion_bad(text):
    with pytest.raises(ValueError):
        sq.parse_quaternion(text)


def test_format_roundtrip():
    q = Quaternion(0.1, -1 / 3, 2e-17, 7.0)
    assert sq.parse_quaternion(str(q)) == q


def test_as_qarray_promotes_reals():
    assert as_qarray(2).tolist() == [2.0, 0.0, 0.0, 0.0]
    with pytest.raises(ValueError):
        as_qarray([1.0, 2.0, 3.0])
