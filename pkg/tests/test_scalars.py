from fractions import Fraction

import pytest
import sympy
from hypothesis import given

from collatz_transfer.scalars import (
    ExactnessError,
    abs_sq,
    conj,
    exact,
    format_complex,
    format_rational,
    parse_complex,
    parse_rational,
    to_complex,
    to_sympy,
)

from strategies import gaussian_rationals, small_fractions


@pytest.mark.parametrize(
    "text, re_, im_",
    [
        ("1/2+3/4i", Fraction(1, 2), Fraction(3, 4)),
        ("-i", 0, -1),
        ("3i", 0, 3),
        ("1.5-2i", Fraction(3, 2), -2),
        ("7/5", Fraction(7, 5), 0),
        ("1 - 1/3 i", 1, Fraction(-1, 3)),
    ],
)
def test_parse_complex(text, re_, im_):
    assert parse_complex(text) == exact(re_, im_)


@pytest.mark.parametrize("bad", ["", "abc", "1/2+", "i i"])
def test_parse_complex_rejects(bad):
    with pytest.raises(ValueError):
        parse_complex(bad)


def test_floats_are_not_exact():
    with pytest.raises(ExactnessError):
        exact(0.5)
    with pytest.raises(ExactnessError):
        parse_rational(0.1)


def test_decimal_strings_are_exact():
    assert parse_rational("0.001") == Fraction(1, 1000)


@given(gaussian_rationals)
def test_format_parse_roundtrip(x):
    assert parse_complex(format_complex(x)) == x


@given(small_fractions)
def test_rational_roundtrip(f):
    assert parse_rational(format_rational(f)) == f


@given(gaussian_rationals)
def test_abs_sq_matches_conjugate(x):
    prod = x * conj(x)
    assert prod.y == 0
    assert prod.x == abs_sq(x)
    assert abs(abs_sq(to_complex(x)) - float(abs_sq(x))) < 1e-9


def test_to_sympy_keeps_pi():
    assert to_sympy(Fraction(1, 4), pi=True) == sympy.pi / 4
