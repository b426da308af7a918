from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from collatz_transfer.weights import (
    WeightDescriptor,
    abs_sq_below_threshold,
    boundedness_check,
    classic_bergman,
    constant,
    monotone_ratio,
    power_law,
    rho_admissible,
    tabulated,
    weight_eval,
    weight_predicates,
)

W0 = classic_bergman()


def test_weight_eval_examples():
    assert weight_eval(W0, 3) == 4 / sympy.pi
    assert weight_eval(constant(1), 10**6) == 1
    assert abs(weight_eval(power_law(1, "1/2"), 7) - 8**0.5) < 1e-12


@pytest.mark.parametrize(
    "w, flags",
    [
        (W0, (True, True, True)),
        (constant(1), (True, False, False)),
        (power_law(1, "1/2"), (True, True, True)),
        (power_law(1, -1), (False, False, False)),
        (tabulated([1, 2, 3], power_law(2, 1)), (True, True, True)),
    ],
)
def test_predicates(w, flags):
    p = weight_predicates(w)
    assert (p.bounded_below, p.dyadic_divergent, p.dyadic_summable) == flags


def test_half_power_summable_numerically():
    w = power_law(1, "1/2")
    for k in (3, 5, 17):
        partial = [sum(1 / w.value(k << n) for n in range(N)) for N in (20, 40, 60)]
        assert partial[2] - partial[1] < 1e-4


@given(st.integers(0, 10**6), st.integers(0, 10**6))
def test_bergman_ratios_exact(a, b):
    r = W0.ratio(a, b)
    assert r == Fraction(a + 1, b + 1)
    assert abs(float(r) - W0.value(a) / W0.value(b)) <= 1e-12 * float(r)


def test_boundedness_bergman():
    rep = boundedness_check(W0)
    vals = tuple(s.value for s in rep.analytic_sups)
    assert vals == (2, 2, Fraction(8, 3))
    assert all(not s.attained for s in rep.analytic_sups)
    assert rep.bounded and rep.norm_sq == Fraction(8, 3)


def test_boundedness_constant():
    rep = boundedness_check(constant(1))
    assert tuple(s.value for s in rep.analytic_sups) == (1, 1, 2)
    assert rep.bounded and rep.norm_sq == 2


@pytest.mark.parametrize(
    "w",
    [W0, constant(3), power_law(2, 2), power_law(1, "1/2"), power_law(1, -1), tabulated([5, 1, 1, 9, 2], power_law(1, 1))],
)
def test_finite_never_exceeds_analytic(w):
    rep = boundedness_check(w, 2000)
    for f, a in zip(rep.finite_sups, rep.analytic_sups):
        assert float(f.value) <= float(a.value) * (1 + 1e-12)


@given(st.integers(1, 50), st.integers(1, 50), st.integers(1, 50), st.integers(1, 50))
def test_monotone_ratio_rule(a, b, c, d):
    seq = [Fraction(a * m + b, c * m + d) for m in range(1, 30)]
    nondecreasing = all(x <= y for x, y in zip(seq, seq[1:]))
    assert monotone_ratio(a, b, c, d) == nondecreasing


def test_threshold_exact():
    assert abs_sq_below_threshold(Fraction(196, 100), W0)
    assert not abs_sq_below_threshold(Fraction(2), W0)
    w = power_law(1, "1/2")
    assert abs_sq_below_threshold(Fraction(141, 100), w)
    assert not abs_sq_below_threshold(Fraction(142, 100), w)  # 1.42² > 2
    assert rho_admissible(2, W0) and not rho_admissible(Fraction(201, 100), W0)


@pytest.mark.parametrize("w", [W0, constant("3/2"), power_law(2, "1/3"), tabulated(["1/2", 3], constant(2))])
def test_json_roundtrip(w):
    assert WeightDescriptor.from_json(w.to_json()) == w


def test_invalid_weights():
    with pytest.raises(ValueError):
        constant(0)
    with pytest.raises(ValueError):
        tabulated([1, -1], constant(1))
