"""Weight families ω on the nonnegative integers.

Every family is described in closed form so that the hypotheses used by the
dynamics (bounded below, divergence and summability along dyadic rays) can be
decided exactly.  The classic Bergman weight ω₀(n) = (n+1)/π keeps π as a
symbolic unit, so ratios ω₀(a)/ω₀(b) are exact rationals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
import sympy

from .scalars import format_rational, parse_rational

CLASSIC_BERGMAN = "classic_bergman"
POWER_LAW = "power_law"
CONSTANT = "constant"
TABULATED = "tabulated"
FAMILIES = (CLASSIC_BERGMAN, POWER_LAW, CONSTANT, TABULATED)


def _rational_power(base: Fraction, alpha: Fraction):
    """base**alpha, exact when alpha is an integer."""
    if alpha.denominator == 1:
        return base ** int(alpha)
    return float(base) ** float(alpha)


def _power_lt(x: Fraction, alpha: Fraction) -> bool:
    """Decide x < 2**alpha exactly for rational x >= 0 and rational alpha."""
    return x**alpha.denominator < Fraction(2) ** alpha.numerator


@dataclass(frozen=True)
class WeightDescriptor:
    """ω(n) in one of four closed families.

    ``classic_bergman``: (n+1)/π.  ``power_law``: c·(n+1)^alpha.
    ``constant``: c.  ``tabulated``: ``table[n]`` for n < len(table), then
    the ``tail`` family (power_law or constant).
    """

    family: str
    c: Fraction = Fraction(1)
    alpha: Fraction = Fraction(0)
    table: tuple = ()
    tail: Optional["WeightDescriptor"] = field(default=None, compare=True)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown weight family {self.family!r}")
        if self.c <= 0:
            raise ValueError("weight constant must be positive")
        if self.family == TABULATED:
            if self.tail is None or self.tail.family not in (POWER_LAW, CONSTANT):
                raise ValueError("tabulated weights need a power_law or constant tail")
            if any(v <= 0 for v in self.table):
                raise ValueError("tabulated weight values must be positive")

    # -- structure -------------------------------------------------------
    @property
    def pi_unit(self) -> bool:
        """True when ω(n) = rational(n)/π, so 1/ω carries one factor of π."""
        return self.family == CLASSIC_BERGMAN

    @property
    def exponent(self) -> Fraction:
        """Growth exponent of the (tail) power law."""
        if self.family == CLASSIC_BERGMAN:
            return Fraction(1)
        if self.family == POWER_LAW:
            return self.alpha
        if self.family == CONSTANT:
            return Fraction(0)
        return self.tail.exponent

    @property
    def is_exact(self) -> bool:
        """Whether ratios and reciprocals are exact rationals (up to the π unit)."""
        return self.exponent.denominator == 1

    def rational_part(self, n: int):
        """ω(n) with the π unit stripped: exact Fraction when possible, else float."""
        if self.family == CLASSIC_BERGMAN:
            return Fraction(n + 1)
        if self.family == CONSTANT:
            return self.c
        if self.family == POWER_LAW:
            return self.c * _rational_power(Fraction(n + 1), self.alpha)
        if n < len(self.table):
            return self.table[n]
        return self.tail.rational_part(n)

    def value(self, n: int) -> float:
        v = float(self.rational_part(n))
        return v / math.pi if self.pi_unit else v

    def ratio(self, a: int, b: int):
        """ω(a)/ω(b); π cancels for the classic weight."""
        if self.family == POWER_LAW and not self.is_exact:
            return ((a + 1) / (b + 1)) ** float(self.alpha)
        num, den = self.rational_part(a), self.rational_part(b)
        if isinstance(num, float) or isinstance(den, float):
            return float(num) / float(den)
        return num / den

    def reciprocal(self, n: int):
        """1/ω(n) with the π unit stripped (multiply by π when ``pi_unit``)."""
        v = self.rational_part(n)
        return 1.0 / v if isinstance(v, float) else 1 / Fraction(v)

    def values(self, ns: np.ndarray) -> np.ndarray:
        """Vectorised float evaluation."""
        ns = np.asarray(ns, dtype=float)
        if self.family == CLASSIC_BERGMAN:
            return (ns + 1.0) / math.pi
        if self.family == CONSTANT:
            return np.full_like(ns, float(self.c))
        if self.family == POWER_LAW:
            return float(self.c) * (ns + 1.0) ** float(self.alpha)
        out = self.tail.values(ns)
        small = ns < len(self.table)
        if small.any():
            out[small] = [float(self.table[int(n)]) for n in ns[small]]
        return out

    # -- serialization ---------------------------------------------------
    def to_json(self) -> dict:
        if self.family == CLASSIC_BERGMAN:
            params = {}
        elif self.family == CONSTANT:
            params = {"c": format_rational(self.c)}
        elif self.family == POWER_LAW:
            params = {"c": format_rational(self.c), "alpha": format_rational(self.alpha)}
        else:
            params = {
                "table": [format_rational(v) for v in self.table],
                "tail": self.tail.to_json(),
            }
        return {"family": self.family, "params": params}

    @classmethod
    def from_json(cls, obj: dict) -> "WeightDescriptor":
        family = obj["family"]
        params = obj.get("params", {})
        if family == CLASSIC_BERGMAN:
            return classic_bergman()
        if family == CONSTANT:
            return constant(parse_rational(params.get("c", "1")))
        if family == POWER_LAW:
            return power_law(parse_rational(params.get("c", "1")), parse_rational(params["alpha"]))
        if family == TABULATED:
            return tabulated(
                [parse_rational(v) for v in params["table"]], cls.from_json(params["tail"])
            )
        raise ValueError(f"unknown weight family {family!r}")

    def __str__(self):
        if self.family == CLASSIC_BERGMAN:
            return "ω₀(n) = (n+1)/π"
        if self.family == CONSTANT:
            return f"ω(n) = {self.c}"
        if self.family == POWER_LAW:
            return f"ω(n) = {self.c}·(n+1)^{self.alpha}"
        return f"ω = table[{len(self.table)}] then {self.tail}"


def classic_bergman() -> WeightDescriptor:
    return WeightDescriptor(CLASSIC_BERGMAN)


def constant(c=1) -> WeightDescriptor:
    return WeightDescriptor(CONSTANT, c=parse_rational(c))


def power_law(c=1, alpha=1) -> WeightDescriptor:
    return WeightDescriptor(POWER_LAW, c=parse_rational(c), alpha=parse_rational(alpha))


def tabulated(table, tail: WeightDescriptor) -> WeightDescriptor:
    return WeightDescriptor(TABULATED, table=tuple(parse_rational(v) for v in table), tail=tail)


def weight_eval(w: WeightDescriptor, n: int):
    """ω(n): a sympy number for exact families (π kept symbolic), float otherwise."""
    v = w.rational_part(n)
    if isinstance(v, float):
        return v
    out = sympy.Rational(v.numerator, v.denominator)
    return out / sympy.pi if w.pi_unit else out


@dataclass(frozen=True)
class WeightPredicates:
    bounded_below: bool
    dyadic_divergent: bool
    dyadic_summable: bool

    def to_json(self):
        return {
            "bounded_below": self.bounded_below,
            "dyadic_divergent": self.dyadic_divergent,
            "dyadic_summable": self.dyadic_summable,
        }


def weight_predicates(w: WeightDescriptor) -> WeightPredicates:
    """Decide the three hypotheses from the family's growth exponent.

    Along a dyadic ray ω(k·2ⁿ) grows like 2^(alpha·n), so divergence and
    summability of 1/ω both hold iff alpha > 0; bounded below iff alpha >= 0.
    A finite positive table never changes any of the three.
    """
    alpha = w.exponent
    return WeightPredicates(alpha >= 0, alpha > 0, alpha > 0)


def abs_sq_below_threshold(x, w: WeightDescriptor) -> bool:
    """Decide |μ|² = x < 2^alpha, exactly when x is rational."""
    alpha = w.exponent
    if isinstance(x, float):
        return x < 2.0 ** float(alpha)
    return _power_lt(Fraction(x), alpha)


def rho_admissible(rho, w: WeightDescriptor) -> bool:
    """(ρⁿ/ω(k·2ⁿ))ₙ bounded for all k  ⇔  ρ <= 2^alpha."""
    if isinstance(rho, float):
        return rho <= 2.0 ** float(w.exponent)
    alpha = w.exponent
    return Fraction(rho) ** alpha.denominator <= Fraction(2) ** alpha.numerator


# -- boundedness sequences ------------------------------------------------

SEQUENCE_NAMES = ("w(6m)/w(3m)", "w(6m+2)/w(3m+1)", "(w(6m+4)+w(2m+1))/w(3m+2)")


def monotone_ratio(alpha, beta, gamma, delta) -> bool:
    """((αm+β)/(γm+δ))ₘ is nondecreasing iff αδ >= βγ (all four positive)."""
    return alpha * delta >= beta * gamma


def _sequence_terms(w: WeightDescriptor, m: int):
    r = w.ratio
    return (
        r(6 * m, 3 * m),
        r(6 * m + 2, 3 * m + 1),
        r(6 * m + 4, 3 * m + 2) + r(2 * m + 1, 3 * m + 2),
    )


@dataclass(frozen=True)
class Supremum:
    value: object  # Fraction when exact, float otherwise
    attained_at: Optional[int]  # None: attained only in the limit m → ∞

    @property
    def attained(self) -> bool:
        return self.attained_at is not None

    def to_json(self):
        v = self.value
        return {
            "value": format_rational(v) if isinstance(v, (int, Fraction)) else float(v),
            "attained_at": self.attained_at,
        }


@dataclass(frozen=True)
class BoundednessReport:
    m_max: int
    finite_sups: tuple  # of Supremum over 1 <= m <= m_max
    analytic_sups: Optional[tuple]  # of Supremum over all m >= 1
    bounded: bool

    @property
    def norm_sq(self):
        """‖T‖² = max of the three suprema (analytic when available)."""
        sups = self.analytic_sups or self.finite_sups
        return max(s.value for s in sups)

    def to_json(self):
        return {
            "m_max": self.m_max,
            "sequences": list(SEQUENCE_NAMES),
            "finite_sups": [s.to_json() for s in self.finite_sups],
            "analytic_sups": None
            if self.analytic_sups is None
            else [s.to_json() for s in self.analytic_sups],
            "bounded": self.bounded,
            "norm_sq": format_rational(self.norm_sq)
            if isinstance(self.norm_sq, (int, Fraction))
            else float(self.norm_sq),
        }


def _float_sequences(w: WeightDescriptor, m: np.ndarray):
    v = w.values
    return (
        v(6 * m) / v(3 * m),
        v(6 * m + 2) / v(3 * m + 1),
        (v(6 * m + 4) + v(2 * m + 1)) / v(3 * m + 2),
    )


def _finite_sups(w: WeightDescriptor, m_lo: int, m_hi: int):
    """Exact suprema over m_lo <= m <= m_hi.

    A float pass locates near-maximal candidates; the winner is re-evaluated
    exactly among every candidate within 1e-9 relative of the float maximum.
    """
    ms = np.arange(m_lo, m_hi + 1, dtype=np.int64)
    out = []
    for idx, seq in enumerate(_float_sequences(w, ms)):
        top = seq.max()
        candidates = ms[seq >= top * (1 - 1e-9)]
        if len(candidates) > 64:
            # plateau (e.g. constant sequences): the first element suffices
            candidates = candidates[:1]
        best_m, best = None, None
        for m in candidates.tolist():
            val = _sequence_terms(w, m)[idx]
            if best is None or val > best:
                best_m, best = m, val
        out.append(Supremum(best, best_m))
    return tuple(out)


def _power_sups(alpha: Fraction, m0: int = 1):
    """Suprema over m >= m0 of the three sequences for ω(n) ∝ (n+1)^alpha."""
    exact = alpha.denominator == 1

    def pw(x: Fraction):
        return _rational_power(x, alpha) if exact else float(x) ** float(alpha)

    # (n+1)-shifted linear forms: ω(6m)/ω(3m) = ((6m+1)/(3m+1))^alpha, etc.
    forms = [((6, 1), (3, 1)), ((6, 3), (3, 2)), ((6, 5), (3, 3))]
    sups = []
    for i, ((a, b), (c, d)) in enumerate(forms):
        inc = monotone_ratio(a, b, c, d)
        extra = pw(Fraction(2, 3)) if i == 2 else 0
        if alpha == 0:
            sups.append(Supremum(1 + extra, m0))
        elif (alpha > 0) == inc:
            sups.append(Supremum(pw(Fraction(a, c)) + extra, None))
        else:
            sups.append(Supremum(pw(Fraction(a * m0 + b, c * m0 + d)) + extra, m0))
    return tuple(sups)


def boundedness_check(w: WeightDescriptor, m_max: int = 10**4) -> BoundednessReport:
    """The three suprema whose maximum is ‖T‖²_ω.

    For the closed families the suprema over all m >= 1 are decided via the
    monotone-ratio rule; the third sequence splits as
    ((6m+5)/(3m+3))^alpha + (2/3)^alpha.
    """
    finite = _finite_sups(w, 1, m_max)
    analytic = None
    if w.family in (CLASSIC_BERGMAN, POWER_LAW, CONSTANT):
        analytic = _power_sups(w.exponent)
    elif w.family == TABULATED:
        # tail formulas apply once the smallest argument 2m+1 leaves the table
        m0 = max(1, len(w.table) // 2)
        head = _finite_sups(w, 1, m0 - 1) if m0 > 1 else None
        tail = _power_sups(w.exponent, m0)
        if head is None:
            analytic = tail
        else:
            analytic = tuple(h if h.value >= t.value else t for h, t in zip(head, tail))
    bounded = all(math.isfinite(float(s.value)) for s in (analytic or finite))
    return BoundednessReport(m_max, finite, analytic, bounded)
