"""Exact complex-rational scalars and their textual forms.

Exact scalars are elements of sympy's Gaussian-rational field ``QQ_I``.
Real rationals cross the public API as :class:`fractions.Fraction` and are
printed as ``"p/q"`` strings.
"""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Integral, Rational

import sympy
from sympy.polys.domains import QQ, QQ_I
from sympy.polys.domains.gaussiandomains import GaussianRational

ExactScalar = GaussianRational

ZERO = QQ_I(0, 0)
ONE = QQ_I(1, 0)


class ExactnessError(TypeError):
    """A float was supplied where an exact rational is required."""


def qq(x) -> "QQ.dtype":
    if isinstance(x, Fraction):
        return QQ(x.numerator, x.denominator)
    if isinstance(x, Integral):
        return QQ(int(x))
    if isinstance(x, str):
        return qq(parse_rational(x))
    if isinstance(x, QQ.dtype):
        return x
    if isinstance(x, Rational):
        return QQ(int(x.numerator), int(x.denominator))
    raise ExactnessError(f"cannot represent {x!r} exactly")


def fraction(x) -> Fraction:
    """Convert an exact real (int, Fraction, mpq, sympy Rational) to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, sympy.Rational):
        return Fraction(int(x.p), int(x.q))
    if isinstance(x, str):
        return parse_rational(x)
    if isinstance(x, (Integral, Rational)) or isinstance(x, QQ.dtype):
        return Fraction(int(x.numerator), int(x.denominator))
    raise ExactnessError(f"cannot represent {x!r} exactly")


def exact(x, im=0) -> GaussianRational:
    """Coerce ``x`` (+ ``im``·i) to an exact Gaussian rational."""
    if isinstance(x, GaussianRational) and not im:
        return x
    if isinstance(x, str):
        if im:
            raise ValueError("string scalars carry their own imaginary part")
        return parse_complex(x)
    if isinstance(x, (float, complex)) or isinstance(im, (float, complex)):
        raise ExactnessError(f"float scalar {x!r} has no exact form")
    if isinstance(x, GaussianRational):
        return x + QQ_I(0, qq(im))
    return QQ_I(qq(x), qq(im))


def to_complex(x) -> complex:
    if isinstance(x, GaussianRational):
        return complex(float(x.x), float(x.y))
    return complex(x)


def conj(x):
    if isinstance(x, GaussianRational):
        return QQ_I(x.x, -x.y)
    return x.conjugate()


def abs_sq(x):
    """|x|² as an exact mpq for Gaussian rationals, float otherwise."""
    if isinstance(x, GaussianRational):
        return x.x * x.x + x.y * x.y
    x = complex(x)
    return x.real * x.real + x.imag * x.imag


def is_exact(x) -> bool:
    return isinstance(x, (GaussianRational, Integral, Fraction)) or isinstance(x, QQ.dtype)


def to_sympy(x, pi: bool = False):
    """Exact Gaussian rational (optionally times π) as a sympy number."""
    x = exact(x)
    out = sympy.Rational(int(x.x.numerator), int(x.x.denominator)) + sympy.I * sympy.Rational(
        int(x.y.numerator), int(x.y.denominator)
    )
    return out * sympy.pi if pi else out


def format_rational(x) -> str:
    f = fraction(x)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def parse_rational(s) -> Fraction:
    """``"p/q"``, integers and decimal strings, all read exactly."""
    if isinstance(s, (int, Fraction)):
        return Fraction(s)
    if isinstance(s, float):
        raise ExactnessError(f"float {s!r} has no exact form; pass a string")
    return Fraction(str(s).strip())


_RAT = r"[0-9]+(?:\.[0-9]*)?(?:/[0-9]+)?"
_COMPLEX = re.compile(
    rf"^\s*(?:(?P<re>[+-]?{_RAT})(?=\s*$|\s*[+-]))?\s*"
    rf"(?:(?P<sign>[+-]?)\s*(?P<im>{_RAT})?\s*\*?\s*[ij])?\s*$"
)


def parse_complex(s: str) -> GaussianRational:
    """Parse ``"a"``, ``"bi"``, ``"a+bi"``, ``"a - b i"`` with rational a, b."""
    m = _COMPLEX.match(s)
    if not m or (m.group("re") is None and not re.search(r"[ij]\s*$", s)):
        raise ValueError(f"not a complex rational: {s!r}")
    re_part = parse_rational(m.group("re")) if m.group("re") else Fraction(0)
    im_part = Fraction(0)
    if re.search(r"[ij]\s*$", s):
        im_part = parse_rational(m.group("im")) if m.group("im") else Fraction(1)
        if m.group("sign") == "-":
            im_part = -im_part
    return exact(re_part, im_part)


def format_complex(x) -> str:
    x = exact(x)
    re_s, im_f = format_rational(x.x), fraction(x.y)
    if not im_f:
        return re_s
    sign = "-" if im_f < 0 else "+"
    return f"{re_s}{sign}{format_rational(abs(im_f))}i"
