from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from collatz_transfer.space import inner, norm_sq
from collatz_transfer.transfer_op import (
    apply_adjoint,
    apply_T,
    apply_T_power,
    bounded_on,
    doubling_inverse_S,
    iterate_norm_scan,
    preimage_weight_sum,
)
from collatz_transfer.weights import classic_bergman, constant, power_law, tabulated

from conftest import vec
from strategies import gaussian_rationals, rational_vectors

W0 = classic_bergman()
FAMILIES = [W0, constant("5/2"), power_law(3, 1), power_law(1, 2), tabulated([1, 4, "1/2", 7, 2, 3], power_law(1, 1))]


def test_apply_T_examples():
    assert apply_T(vec(d6=1)) == vec(d3=1)
    assert not apply_T(vec(d4=1))
    assert apply_T(vec(d3=1, d10=1)) == vec(d5=2)


def test_apply_T_power_examples():
    assert not apply_T_power(vec(d3=1), 4)
    f = vec(d7=3, d9="1/2")
    assert apply_T_power(f, 0) == f
    assert apply_T_power(vec(d16=1), 2) == vec(d4=1)


def test_adjoint_examples():
    assert apply_adjoint(vec(d5=1), W0) == vec(d3="2/3", d10="11/6")
    assert apply_adjoint(vec(d3=1), W0) == vec(d6="7/4")
    assert apply_adjoint(vec(d4=1), W0) == vec(d8="9/5")


def test_doubling_examples():
    assert doubling_inverse_S(vec(d3=1)) == vec(d6=1)
    assert apply_T(doubling_inverse_S(vec(d7=1))) == vec(d7=1)
    norms = [norm_sq(doubling_inverse_S(vec(d3=1), n), W0) for n in range(6)]
    assert norms == [sympy.pi / (3 * 2**n + 1) for n in range(6)]
    assert all(bool(a > b) for a, b in zip(norms, norms[1:]))


@pytest.mark.parametrize("w", FAMILIES, ids=str)
@given(f=rational_vectors(), g=rational_vectors())
def test_adjoint_identity(w, f, g):
    assert inner(apply_T(f), g, w) == inner(f, apply_adjoint(g, w), w)


@given(rational_vectors())
def test_T_after_S_is_identity(f):
    assert apply_T(doubling_inverse_S(f)) == f
    assert apply_T_power(doubling_inverse_S(f, 5), 5) == f


@given(rational_vectors(), rational_vectors(), gaussian_rationals, gaussian_rationals)
def test_linearity(f, g, a, b):
    assert apply_T(f.scale(a) + g.scale(b)) == apply_T(f).scale(a) + apply_T(g).scale(b)


@given(rational_vectors(max_degree=400), st.integers(0, 6), st.integers(0, 6))
def test_power_composition(f, a, b):
    assert apply_T_power(f, a + b) == apply_T_power(apply_T_power(f, a), b)


def test_scan_examples():
    rep = iterate_norm_scan(W0, 1, 5)
    assert rep.best_k == 5 and rep.value == Fraction(5, 2)
    rep = iterate_norm_scan(W0, 1, 1000)
    assert rep.value < Fraction(8, 3) and rep.best_k % 3 == 2
    assert rep.exactness == "lower_bound"
    assert iterate_norm_scan(constant(1), 1, 1000).value == 2


@pytest.mark.parametrize("w", FAMILIES[:4], ids=str)
@pytest.mark.parametrize("n", [1, 2, 3])
def test_scan_value_recomputes(w, n):
    rep = iterate_norm_scan(w, n, 300)
    assert rep.value == preimage_weight_sum(w, rep.best_k, n)
    for k in range(3, 300):
        assert preimage_weight_sum(w, k, n) <= rep.value


def test_bounded_on():
    ok, rep = bounded_on(W0)
    assert ok and rep.norm_sq == Fraction(8, 3)
    ok, rep = bounded_on(constant(1))
    assert ok and rep.norm_sq == 2
    assert bounded_on(power_law(1, 1))[0]


def test_report_json():
    js = iterate_norm_scan(W0, 2, 100).to_json()
    assert "/" in js["value"] and js["exactness"] == "lower_bound"
