import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from collatz_transfer.eigen import (
    EigenSpec,
    adjoint_defect,
    godefroy_shapiro_witnesses,
    is_adjoint_eigenvector,
    materialize,
    membership,
    period_of,
    periodic_point,
    ray_tail_sum,
    span_residual,
    verify_eigenrelation,
)
from collatz_transfer.errors import MembershipError, PredicateError
from collatz_transfer.scalars import exact
from collatz_transfer.weights import classic_bergman, constant, power_law

from conftest import vec
from strategies import rational_vectors

W0 = classic_bergman()


def test_materialize_examples():
    assert materialize(EigenSpec(1, 0, 16)).vector == vec(d10=1, d3=-1)
    assert materialize(EigenSpec(0, Fraction(1, 2), 64)).vector == vec(
        d4=1, d8="1/2", d16="1/4", d32="1/8", d64="1/16"
    )
    assert materialize(EigenSpec(1, 1, 40)).vector == vec(d10=1, d3=-1, d20=1, d6=-1, d40=1, d12=-1)


def test_tail_bound_against_partial_sum():
    spec = EigenSpec(1, Fraction(1, 2), 40)
    mat = materialize(spec)
    direct = sum(0.25**n * (math.pi / ((10 << n) + 1) + math.pi / ((3 << n) + 1)) for n in range(3, 200))
    assert direct <= mat.tail_norm_sq_bound <= 2.5 * direct


def test_tail_monotone_in_cap():
    bounds = [materialize(EigenSpec(2, Fraction(3, 4), 2**c)).tail_norm_sq_bound for c in range(5, 16)]
    assert all(a >= b for a, b in zip(bounds, bounds[1:]))


def test_membership_examples():
    for m in range(4):
        assert membership(m, Fraction(7, 5), W0)
        assert not membership(m, exact(1, 1), W0)
        assert membership(m, "99/100", constant(1))
        assert not membership(m, 1, constant(1))
    with pytest.raises(MembershipError):
        materialize(EigenSpec(1, exact(1, 1), 64))


def test_divergence_at_boundary():
    assert ray_tail_sum(W0, 2.0, 3, 0) == math.inf
    partial = [sum(2.0**n * math.pi / ((3 << n) + 1) for n in range(N)) for N in (10, 100, 1000)]
    assert partial[2] > partial[1] > partial[0] + 10


@pytest.mark.parametrize("m, mu, cap", [(1, Fraction(1, 2), 2**12), (0, 1, 2**10), (2, Fraction(3, 4), 2**10)])
def test_eigenrelation_examples(m, mu, cap):
    chk = verify_eigenrelation(EigenSpec(m, mu, cap))
    assert chk.exact_zero and chk.residual == 0


def test_truncation_is_visible_outside_window():
    spec = EigenSpec(1, Fraction(1, 2), 2**8)
    h = materialize(spec).vector
    from collatz_transfer.transfer_op import apply_T

    res = apply_T(h) - h.scale(spec.mu)
    assert res  # the top pair is missing its predecessor
    assert all(d > verify_eigenrelation(spec).window[1] for d in res.support)


def test_window_empty():
    with pytest.raises(ValueError):
        verify_eigenrelation(EigenSpec(1, 0, 5))


@pytest.mark.parametrize("m, alpha, period", [(0, Fraction(1, 2), 4), (1, 0, 1), (0, Fraction(1, 3), 6)])
def test_periodic_examples(m, alpha, period):
    pp = periodic_point(m, alpha, 2**12)
    assert pp.period == period == period_of(alpha)
    tol = 0.0 if pp.vector.kind == "rational" else 1e-12
    assert pp.returns_after(period, tol)
    assert not any(pp.returns_after(t, tol) for t in range(1, period))


def test_witnesses():
    wit = godefroy_shapiro_witnesses(W0, 2)
    assert wit.inside and wit.outside
    assert 1.4 <= wit.max_outside_modulus < math.sqrt(2)
    for s in wit.outside:
        assert membership(s.m, s.mu, W0)
    with pytest.raises(PredicateError):
        godefroy_shapiro_witnesses(constant(1), 2)
    assert membership(0, Fraction(141, 100), W0)


def test_span_examples():
    assert abs(span_residual(3, [], W0).residual ** 2 - math.pi / 4) < 1e-12
    one = span_residual(3, [EigenSpec(1, 0, 16)], W0).residual
    assert one < math.sqrt(math.pi / 4)
    fam = [EigenSpec(1, 0, 16), EigenSpec(2, Fraction(1, 2), 16), EigenSpec(1, Fraction(1, 2), 16)]
    res = [span_residual(3, fam[:i], W0).residual for i in range(len(fam) + 1)]
    assert all(b <= a + 1e-12 for a, b in zip(res, res[1:]))


@given(rational_vectors().filter(bool), st.integers(-4, 4), st.integers(-4, 4))
def test_no_finite_adjoint_eigenvectors(f, a, b):
    mu = exact(Fraction(a, 2), Fraction(b, 2))
    for w in (W0, constant(1), power_law(1, 2)):
        assert adjoint_defect(f, mu, w)
        assert not is_adjoint_eigenvector(f, mu, w)


def test_spec_json_roundtrip():
    for s in (EigenSpec(2, "1/2-1/3i", 64), EigenSpec(0, 0.5 + 0.25j, 32)):
        assert EigenSpec.from_json(s.to_json()) == s
