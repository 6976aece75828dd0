import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from siegelnum import TruncatedSeries, compose, derivative, evaluate, revert
from siegelnum.errors import PreconditionError
from siegelnum.series import identity, reciprocal, zero


def geometric(n):
    return TruncatedSeries.from_coeffs(np.ones(n + 1))


def test_from_coeffs_pads_and_truncates():
    s = TruncatedSeries.from_coeffs([1, 2], degree=4)
    assert s.degree == 4
    assert np.all(s.coeffs[2:] == 0)
    t = TruncatedSeries.from_coeffs([1, 2, 3, 4], degree=1)
    assert t.degree == 1 and t.coeffs[1] == 2


def test_from_coeffs_rejects_bad_input():
    with pytest.raises(PreconditionError):
        TruncatedSeries.from_coeffs([])
    with pytest.raises(PreconditionError):
        TruncatedSeries.from_coeffs([1.0, math.inf])


def test_reciprocal_of_one_minus_z_is_geometric():
    one_minus = TruncatedSeries.from_coeffs([1, -1], degree=16)
    rec = reciprocal(one_minus)
    assert np.allclose(rec.coeffs, np.ones(17), atol=0)


def test_revert_alternating_oracle():
    # inverse of z/(1-z) is z/(1+z): coefficients 0, 1, -1, 1, -1, ...
    a = TruncatedSeries.from_coeffs(np.r_[0, np.ones(12)])
    b = revert(a)
    expect = np.r_[0, [(-1.0) ** k for k in range(12)]]
    assert np.allclose(b.coeffs, expect, atol=1e-12)


def test_compose_power_oracle():
    # (z + z^2) o (z + z^2) = z + 2z^2 + 2z^3 + z^4
    f = TruncatedSeries.from_coeffs([0, 1, 1], degree=4)
    ff = compose(f, f)
    assert np.allclose(ff.coeffs, [0, 1, 2, 2, 1], atol=0)


def test_compose_requires_zero_constant():
    f = TruncatedSeries.from_coeffs([1, 1], degree=3)
    with pytest.raises(PreconditionError):
        compose(f, f)


def test_evaluate_geometric_tail():
    g = geometric(64)
    res = evaluate(g, 0.5)
    assert res.tail_reliable
    assert abs(res.value - (2.0 - 0.5**64 * 2)) < 1e-15
    assert 0 < res.tail_bound < 1e-18


def test_evaluate_flags_unreliable_outside_radius():
    g = geometric(32)
    res = evaluate(g, 1.5)
    assert not res.tail_reliable


def test_derivative_shifts_powers():
    s = TruncatedSeries.from_coeffs([3, 0, 5, 7])
    d = derivative(s, 1)
    assert np.allclose(d.coeffs[:3], [0, 10, 21], atol=0)
    d2 = derivative(s, 2)
    assert np.allclose(d2.coeffs[:2], [10, 42], atol=0)


def test_padding_roundtrip_and_pairs():
    s = TruncatedSeries.from_coeffs([0, 1, 2 + 1j])
    assert s.padded(6).truncated(2).coeffs == pytest.approx(s.coeffs)
    again = TruncatedSeries.from_pairs(s.to_pairs())
    assert np.array_equal(again.coeffs, s.coeffs)


small_coeff = st.complex_numbers(
    max_magnitude=0.2, allow_nan=False, allow_infinity=False
)


@settings(max_examples=50, deadline=None)
@given(st.lists(small_coeff, min_size=2, max_size=10))
def test_revert_is_compositional_inverse(cs):
    coeffs = np.r_[0.0, 1.0, np.asarray(cs, dtype=complex)]
    a = TruncatedSeries.from_coeffs(coeffs)
    b = revert(a)
    n = a.degree
    back = compose(a, b)
    assert np.allclose(back.coeffs, identity(n).coeffs, atol=1e-9)


@settings(max_examples=50, deadline=None)
@given(
    st.lists(small_coeff, min_size=1, max_size=8),
    st.lists(small_coeff, min_size=1, max_size=8),
)
def test_addition_commutes_with_evaluation(xs, ys):
    a = TruncatedSeries.from_coeffs(np.asarray(xs, dtype=complex))
    b = TruncatedSeries.from_coeffs(np.asarray(ys, dtype=complex))
    z = 0.3 + 0.1j
    lhs = evaluate(a + b, z).value
    rhs = evaluate(a, z).value + evaluate(b, z).value
    assert lhs == pytest.approx(rhs, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=1, max_value=12))
def test_zero_and_identity_fixed_points(n):
    assert not zero(n).coeffs.any()
    assert evaluate(identity(n), 0.77).value == pytest.approx(0.77)
