"""Exact ‖𝒯ⁿ‖² for the classic Bergman weight via affine preimage polynomials.

For a residue class k = 3ⁿm + r the n-step preimages of k are P(m) for the
affine polynomials P = aξ + b obtained from 3ⁿξ + r by n rounds of
P ↦ 2P and, when P(0) ≡ 2 mod 3, P ↦ (2P − 1)/3.  Each ratio
(am + b + 1)/(3ⁿm + r + 1) is nondecreasing in m because a(r+1) >= 3ⁿ(b+1),
so the supremum over m is the limit a/3ⁿ and

    ‖𝒯ⁿ‖² = max_r Σ a / 3ⁿ.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Optional

from .errors import BudgetExceeded
from .scalars import format_rational
from .transfer_op import EXACT_LIMIT, IterateNormReport
from .weights import CLASSIC_BERGMAN, WeightDescriptor, monotone_ratio

log = logging.getLogger(__name__)

DEFAULT_MAX_N = 10
SQRT2 = Decimal(2).sqrt()


@dataclass(frozen=True, order=True)
class AffinePoly:
    """a·ξ + b with integer coefficients."""

    a: int
    b: int

    def __call__(self, m: int) -> int:
        return self.a * m + self.b

    def __str__(self):
        return f"{self.a}ξ+{self.b}"


def delta(r: int) -> int:
    """Smallest m for which 3ⁿm + r >= 3."""
    return 1 if r <= 2 else 0


@dataclass(frozen=True)
class ResidueResult:
    r: int
    polys: frozenset
    leading_sum: int  # Σ a over the class
    duplicates: int


def _residue(n: int, r: int, budget: Optional[int] = None) -> ResidueResult:
    top = 3**n
    level = {(top, r)}
    duplicates = 0
    for _ in range(n):
        nxt = set()
        for a, b in level:
            cands = [(2 * a, 2 * b)]
            if b % 3 == 2:
                # P(m) ≡ b mod 3 for every m needs 3 | a; true while odd steps < n
                assert a % 3 == 0, (n, r, a, b)
                cands.append((2 * a // 3, (2 * b - 1) // 3))
            for p in cands:
                if p in nxt:
                    duplicates += 1
                nxt.add(p)
        for a, b in nxt:
            if a * (r + 1) < top * (b + 1):
                raise AssertionError(f"monotonicity certificate fails for {a}ξ+{b}, n={n}, r={r}")
        level = nxt
        if budget is not None and len(level) > budget:
            raise BudgetExceeded(f"residue {r} at n={n} exceeds {budget} polynomials", len(level))
    if duplicates:
        log.warning("n=%d r=%d: %d duplicate polynomials merged", n, r, duplicates)
    polys = frozenset(AffinePoly(a, b) for a, b in level)
    return ResidueResult(r, polys, sum(a for a, _ in level), duplicates)


def preimage_poly_set(n: int, r: int, budget: Optional[int] = None) -> frozenset:
    """The polynomial set parametrizing Tⁿ-preimages of the class 3ⁿm + r."""
    if n < 1:
        raise ValueError("n must be positive")
    if not 0 <= r < 3**n:
        raise ValueError(f"residue {r} outside [0, 3^{n})")
    return _residue(n, r, budget).polys


def _leading_sums(args):
    n, lo, hi = args
    return [_residue(n, r).leading_sum for r in range(lo, hi)]


def memory_estimate(n: int) -> int:
    """Rough peak bytes: one residue's level set, at most 2ⁿ pairs of ints."""
    return (2**n) * 2 * (28 + 4 * n)


@dataclass(frozen=True)
class ExactNormResult:
    n: int
    value: Fraction
    best_residue: int
    leading_sum: int

    @property
    def best_k(self) -> int:
        return 3**self.n * delta(self.best_residue) + self.best_residue


def exact_norm_detail(n: int, workers: int = 1, max_n: int = DEFAULT_MAX_N) -> ExactNormResult:
    """max over residues r of Σ a/3ⁿ; ties go to the smallest r.

    ``workers > 1`` maps residue chunks over processes; the reduction is in
    residue order so the result does not depend on scheduling.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if n > max_n:
        raise BudgetExceeded(f"n={n} exceeds the exact-norm budget n <= {max_n}", partial=0)
    if n >= 8:
        log.info(
            "exact norm n=%d: %d residues, ~%d bytes per residue",
            n,
            3**n,
            memory_estimate(n),
        )
    total = 3**n
    if workers > 1:
        step = max(1, total // (workers * 8))
        chunks = [(n, lo, min(lo + step, total)) for lo in range(0, total, step)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            sums = [s for part in pool.map(_leading_sums, chunks) for s in part]
    else:
        sums = _leading_sums((n, 0, total))
    best_r = max(range(total), key=lambda r: (sums[r], -r))
    return ExactNormResult(n, Fraction(sums[best_r], total), best_r, sums[best_r])


def exact_iterate_norm_sq(n: int, workers: int = 1, max_n: int = DEFAULT_MAX_N) -> Fraction:
    """‖𝒯ⁿ‖² on the classic Bergman space, exactly."""
    return exact_norm_detail(n, workers, max_n).value


def exact_iterate_norm_report(n: int, w: Optional[WeightDescriptor] = None) -> IterateNormReport:
    """The exact value packaged as an :class:`IterateNormReport`."""
    if w is not None and w.family != CLASSIC_BERGMAN:
        raise ValueError("exact iterate norms are only available for the classic Bergman weight")
    res = exact_norm_detail(n)
    return IterateNormReport(n, res.best_k, res.value, None, EXACT_LIMIT)


def ratio_is_monotone(poly: AffinePoly, n: int, r: int) -> bool:
    """The certificate a(r+1) >= 3ⁿ(b+1), read through the monotone-ratio rule."""
    return monotone_ratio(poly.a, poly.b + 1, 3**n, r + 1)


# -- spectral radius bounds ------------------------------------------------


def _root(x: Fraction, k: int, digits: int = 30) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = digits
        return (Decimal(x.numerator) / Decimal(x.denominator)) ** (Decimal(1) / Decimal(k))


@dataclass(frozen=True)
class SpectralBoundTable:
    rows: tuple  # (n, ‖𝒯ⁿ‖² as Fraction, ‖𝒯ⁿ‖^(1/n) as Decimal)
    lower_bound: Decimal = SQRT2

    def norm_sq(self, n: int) -> Fraction:
        return self.rows[n - 1][1]

    def submultiplicative(self) -> bool:
        """‖𝒯^(a+b)‖² <= ‖𝒯^a‖²·‖𝒯^b‖² for every pair inside the table, exactly."""
        top = len(self.rows)
        return all(
            self.norm_sq(a + b) <= self.norm_sq(a) * self.norm_sq(b)
            for a in range(1, top)
            for b in range(1, top - a + 1)
        )

    def above_lower_bound(self) -> bool:
        """‖𝒯ⁿ‖^(1/n) >= √2, i.e. ‖𝒯ⁿ‖² >= 2ⁿ, exactly."""
        return all(v >= 2**n for n, v, _ in self.rows)

    def csv_rows(self):
        yield ("n", "norm_sq", "upper_bound", "lower_bound")
        lb = f"{self.lower_bound:.12f}"
        for n, v, ub in self.rows:
            yield (n, format_rational(v), f"{ub:.12f}", lb)

    def to_json(self):
        return {
            "rows": [
                {"n": n, "norm_sq": format_rational(v), "upper_bound": f"{ub:.12f}"}
                for n, v, ub in self.rows
            ],
            "lower_bound": f"{self.lower_bound:.12f}",
        }


def spectral_radius_table(n_max: int, workers: int = 1, max_n: int = DEFAULT_MAX_N) -> SpectralBoundTable:
    """Rows (n, ‖𝒯ⁿ‖², ‖𝒯ⁿ‖^(1/n)); every upper bound brackets ρ(𝒯) from above."""
    rows = []
    for n in range(1, n_max + 1):
        v = exact_iterate_norm_sq(n, workers, max_n)
        rows.append((n, v, _root(v, 2 * n)))
    return SpectralBoundTable(tuple(rows))
