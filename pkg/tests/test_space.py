import pytest
import sympy
from hypothesis import given

from collatz_transfer.space import FLOAT, CoeffVec, ScalarKindError, inner, norm_sq
from collatz_transfer.weights import classic_bergman, power_law

from conftest import vec
from strategies import float_vectors, rational_vectors

W0 = classic_bergman()
pi = sympy.pi


def test_norm_examples():
    assert norm_sq(vec(d3=1), W0) == pi / 4
    assert sympy.simplify(norm_sq(vec(d3=1, d4=1), W0) - (pi / 4 + pi / 5)) == 0
    assert norm_sq(CoeffVec.zero(), W0) == 0


def test_inner_examples():
    assert inner(vec(d3=1), vec(d4=1), W0) == 0
    assert inner(vec(d5=1), vec(d5=1), W0) == pi / 6
    assert inner(vec(d3=1, d5=2), vec(d5=1), W0) == 2 * pi / 6


def test_linear_examples():
    assert not (vec(d3=1) + vec(d3=-1))
    assert vec(d3=1, d4=1).scale(2) == vec(d3=2, d4=2)
    assert vec(d3=1, d4=1) - vec(d4=1) == vec(d3=1)


def test_structural_invariants():
    with pytest.raises(ValueError):
        CoeffVec({2: 1})
    assert len(CoeffVec({3: 0, 4: 1})) == 1
    with pytest.raises(AttributeError):
        vec(d3=1).kind = FLOAT


def test_kind_mismatch():
    with pytest.raises(ScalarKindError):
        inner(vec(d3=1), vec(d3=1).to_float(), W0)


@given(rational_vectors(), rational_vectors())
def test_cauchy_schwarz_exact(f, g):
    ip = inner(f, g, W0)
    lhs = sympy.expand(ip * sympy.conjugate(ip))
    assert bool(lhs <= sympy.expand(norm_sq(f, W0) * norm_sq(g, W0)))


@given(rational_vectors(), rational_vectors())
def test_parallelogram_exact(f, g):
    w = power_law(1, 2)
    lhs = norm_sq(f + g, w) + norm_sq(f - g, w)
    rhs = 2 * norm_sq(f, w) + 2 * norm_sq(g, w)
    assert sympy.simplify(lhs - rhs) == 0


@given(float_vectors(), float_vectors())
def test_parallelogram_float(f, g):
    lhs = norm_sq(f + g, W0) + norm_sq(f - g, W0)
    rhs = 2 * norm_sq(f, W0) + 2 * norm_sq(g, W0)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, rhs)


@given(rational_vectors(), rational_vectors())
def test_inner_conjugate_symmetric(f, g):
    assert inner(f, g, W0) == sympy.conjugate(inner(g, f, W0))
    assert inner(f, f, W0) == norm_sq(f, W0)


@given(rational_vectors())
def test_json_roundtrip(f):
    assert CoeffVec.from_json(f.to_json()) == f
    ff = f.to_float()
    assert CoeffVec.from_json(ff.to_json()) == ff
