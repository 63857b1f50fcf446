"""The exact scalar tower."""
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from eqbn.scalars import (
    GAUSSIAN,
    QUATERNION,
    RATIONAL,
    GaussianRational,
    Quaternion,
    conj,
    format_scalar,
    inverse,
    join_kinds,
    norm,
    parse_scalar,
    promote,
    regular_matrix,
)

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)
quaternions = st.builds(Quaternion, fractions, fractions, fractions, fractions)


def test_gaussian_arithmetic() -> None:
    z = GaussianRational(1, 2) * GaussianRational(3, -1)
    assert z == GaussianRational(5, 5)
    assert GaussianRational(1, 1).inverse() == GaussianRational(Fraction(1, 2), Fraction(-1, 2))
    assert GaussianRational(3, 0) == 3
    assert hash(GaussianRational(3, 0)) == hash(Fraction(3))


def test_quaternion_units() -> None:
    i, j, k = Quaternion(0, 1), Quaternion(0, 0, 1), Quaternion(0, 0, 0, 1)
    assert i * j == k
    assert j * i == -k
    assert i * i == -1
    assert i * j * k == -1


def test_mixed_kinds_promote() -> None:
    assert join_kinds([RATIONAL, GAUSSIAN]) == GAUSSIAN
    assert join_kinds([GAUSSIAN, QUATERNION, RATIONAL]) == QUATERNION
    assert GaussianRational(0, 1) * Quaternion(0, 0, 1) == Quaternion(0, 0, 0, 1)
    with pytest.raises(ValueError):
        promote(GaussianRational(0, 1), RATIONAL)


def test_zero_has_no_inverse() -> None:
    for value in (Fraction(0), GaussianRational(), Quaternion()):
        with pytest.raises(ZeroDivisionError):
            inverse(value)


def test_parse_and_format() -> None:
    assert parse_scalar("3/6") == Fraction(1, 2)
    assert parse_scalar([1, 2]) == Fraction(1, 2)
    assert parse_scalar([1, 2], GAUSSIAN) == GaussianRational(1, 2)
    assert parse_scalar({"re": "1/3", "im": 1}, GAUSSIAN) == GaussianRational(Fraction(1, 3), 1)
    assert parse_scalar([1, 0, 0, 2], QUATERNION) == Quaternion(1, 0, 0, 2)
    assert format_scalar(Fraction(1, 2)) == "1/2"
    assert format_scalar(GaussianRational(1, -1)) == ["1", "-1"]


def test_regular_matrix_of_i() -> None:
    """Left multiplication by i on ℚ[i] is rotation by a quarter turn."""
    assert regular_matrix(GaussianRational(0, 1), GAUSSIAN) == ((0, -1), (1, 0))


@given(quaternions, quaternions, quaternions)
def test_quaternion_multiplication_is_associative(p: Quaternion, q: Quaternion, r: Quaternion) -> None:
    assert (p * q) * r == p * (q * r)


@given(quaternions, quaternions)
def test_conjugation_reverses_products(p: Quaternion, q: Quaternion) -> None:
    assert conj(p * q) == conj(q) * conj(p)
    assert norm(p * q) == norm(p) * norm(q)


@given(quaternions)
def test_nonzero_quaternions_invert(p: Quaternion) -> None:
    if not p:
        return
    assert p * inverse(p) == 1
    assert inverse(p) * p == 1
