"""The transfer operator 𝒯 f = Σ c_j z^{T(j)} on finite-support vectors.

Also its adjoint, the doubling right inverse S, and a finite scan of the
iterate-norm formula ‖𝒯ⁿ‖² = sup_k Σ_{Tⁿ(j)=k} ω(j)/ω(k).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import BudgetExceeded
from .collatz_core import DEFAULT_TREE_BUDGET, preimage_tree, preimages, t_step
from .scalars import exact, format_rational, qq, to_complex
from .space import FLOAT, RATIONAL, CoeffVec
from .weights import (
    CLASSIC_BERGMAN,
    CONSTANT,
    POWER_LAW,
    BoundednessReport,
    WeightDescriptor,
    boundedness_check,
)

LOWER_BOUND = "lower_bound"
EXACT_LIMIT = "exact_limit"


def apply_T(f: CoeffVec) -> CoeffVec:
    """Push c_j to degree T(j), summing collisions; images below 3 vanish."""
    out = {}
    for j, c in f._entries.items():
        k = t_step(j)
        if k < 3:
            continue
        s = out.get(k)
        s = c if s is None else s + c
        if s:
            out[k] = s
        else:
            del out[k]
    return CoeffVec._raw(out, f.kind)


def apply_T_power(f: CoeffVec, n: int) -> CoeffVec:
    for _ in range(n):
        if not f:
            break
        f = apply_T(f)
    return f


def apply_adjoint(f: CoeffVec, w: WeightDescriptor) -> CoeffVec:
    """𝒯*: (ω(3)/ω(5))·c₅·z³ + Σ_{k>=5} (ω(k)/ω(T(k)))·c_{T(k)}·z^k.

    Each input degree d feeds its preimages k >= 5; d = 5 also feeds z³.
    The result is float-valued when the weight ratios are not rational.
    """
    kind = RATIONAL if (f.kind == RATIONAL and w.is_exact) else FLOAT
    conv = (lambda x: exact(qq(x))) if kind == RATIONAL else to_complex
    src = f if kind == f.kind else f.to_float()
    out = {}
    for d, c in src._entries.items():
        for k in preimages(d):
            if k >= 5:
                out[k] = conv(w.ratio(k, d)) * c
        if d == 5:
            out[3] = conv(w.ratio(3, 5)) * c
    return CoeffVec._raw(out, kind)


def doubling_inverse_S(f: CoeffVec, n: int = 1) -> CoeffVec:
    """Sⁿ: z^k ↦ z^(k·2ⁿ); a right inverse of 𝒯 on finite vectors."""
    return CoeffVec._raw({d << n: c for d, c in f._entries.items()}, f.kind)


# -- iterate norms -----------------------------------------------------------


@dataclass(frozen=True)
class IterateNormReport:
    n: int
    best_k: int
    value: object  # Fraction for exact weights, else float
    scan_bound: Optional[int]
    exactness: str = LOWER_BOUND

    def to_json(self):
        v = self.value
        return {
            "n": self.n,
            "best_k": self.best_k,
            "value": format_rational(v) if isinstance(v, Fraction) else float(v),
            "value_decimal": float(v),
            "scan_bound": self.scan_bound,
            "exactness": self.exactness,
        }


def _integer_weight(w: WeightDescriptor):
    """ω as an integer-valued function up to a common positive factor, if possible."""
    if w.family == CLASSIC_BERGMAN:
        return lambda n: n + 1
    if w.family == CONSTANT:
        return lambda n: 1
    if w.family == POWER_LAW and w.alpha.denominator == 1 and w.alpha >= 0:
        a = int(w.alpha)
        return lambda n: (n + 1) ** a
    return None


def preimage_weight_sum(w: WeightDescriptor, k: int, n: int, budget: int = DEFAULT_TREE_BUDGET):
    """Σ_{Tⁿ(j)=k} ω(j)/ω(k) recomputed from the preimage tree."""
    tree = preimage_tree(k, n, budget)
    if w.is_exact:
        return sum((Fraction(w.ratio(j, k)) for j in tree), Fraction(0))
    return sum(float(w.ratio(j, k)) for j in tree)


def iterate_norm_scan(
    w: WeightDescriptor, n: int, k_max: int, budget: int = DEFAULT_TREE_BUDGET
) -> IterateNormReport:
    """max over 3 <= k <= k_max of Σ_{Tⁿ(j)=k} ω(j)/ω(k); a lower bound on ‖𝒯ⁿ‖².

    Ties go to the smallest k.
    """
    if n < 1:
        raise ValueError("n must be positive")
    q = _integer_weight(w)
    best_k, best_num, best_den = None, 0, 1
    best_val = None
    for k in range(3, k_max + 1):
        # inline tree walk: the scan visits every k, so avoid set building
        level = [k]
        for _ in range(n):
            nxt = []
            for v in level:
                nxt.append(2 * v)
                if v % 3 == 2:
                    nxt.append((2 * v - 1) // 3)
            level = nxt
        if len(level) > budget:
            raise BudgetExceeded(f"preimage tree of {k} exceeds {budget}", partial=len(level))
        if q is not None:
            num, den = sum(q(j) for j in level), q(k)
            if best_k is None or num * best_den > best_num * den:
                best_k, best_num, best_den = k, num, den
        else:
            val = sum(w.ratio(j, k) for j in level)
            if best_val is None or val > best_val:
                best_k, best_val = k, val
    if q is not None:
        value = Fraction(best_num, best_den)
    elif w.is_exact:
        value = Fraction(best_val)
    else:
        value = float(best_val)
    return IterateNormReport(n, best_k, value, k_max, LOWER_BOUND)


def bounded_on(w: WeightDescriptor, m_max: int = 10**4):
    """(bounded?, report); ‖𝒯‖² is ``report.norm_sq``."""
    report: BoundednessReport = boundedness_check(w, m_max)
    return report.bounded, report
