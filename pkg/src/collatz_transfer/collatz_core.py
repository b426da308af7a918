"""The modified Collatz map, orbits, preimage trees and the lemma sequences."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import BudgetExceeded

DEFAULT_TREE_BUDGET = 10**6
DEFAULT_ORBIT_BUDGET = 10**4


def t_step(n: int) -> int:
    """T(n) = n/2 for even n, (3n+1)/2 for odd n."""
    return n >> 1 if n % 2 == 0 else (3 * n + 1) >> 1


def t0_step(n: int) -> int:
    """The classical map: n/2 for even n, 3n+1 for odd n."""
    return n >> 1 if n % 2 == 0 else 3 * n + 1


def t_power(n: int, steps: int) -> int:
    for _ in range(steps):
        n = t_step(n)
    return n


def is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


@dataclass(frozen=True)
class OrbitReport:
    start: int
    orbit: tuple
    quotient_death_time: Optional[int]
    hit_power_of_two: Optional[int]
    exhausted: bool = False
    repeat_at: Optional[int] = None

    def to_json(self):
        return {
            "start": self.start,
            "orbit": list(self.orbit),
            "quotient_death_time": self.quotient_death_time,
            "hit_power_of_two": self.hit_power_of_two,
            "exhausted": self.exhausted,
            "repeat_at": self.repeat_at,
        }


def orbit(k: int, budget: int = DEFAULT_ORBIT_BUDGET) -> OrbitReport:
    """Iterate T from ``k`` until the value drops below 3, repeats, or ``budget`` steps pass."""
    if k < 3:
        raise ValueError(f"orbit start must be >= 3, got {k}")
    values = [k]
    seen = {k: 0}
    hit = 0 if is_power_of_two(k) else None
    death = repeat = None
    n = k
    for step in range(1, budget + 1):
        n = t_step(n)
        values.append(n)
        if hit is None and is_power_of_two(n):
            hit = step
        if n < 3:
            death = step
            break
        if n in seen:
            repeat = step
            break
        seen[n] = step
    exhausted = death is None and repeat is None
    return OrbitReport(k, tuple(values), death, hit, exhausted, repeat)


def death_time(k: int, budget: int = DEFAULT_ORBIT_BUDGET) -> int:
    """First n with T^n(k) < 3; raises if not witnessed within ``budget``."""
    if k < 3:
        return 0
    n = k
    for step in range(1, budget + 1):
        n = t_step(n)
        if n < 3:
            return step
    raise BudgetExceeded(f"no quotient death for {k} within {budget} steps", partial=budget)


def preimages(k: int) -> frozenset:
    """All j >= 3 with T(j) = k."""
    out = {2 * k}
    if k % 3 == 2:
        j = (2 * k - 1) // 3
        if j >= 3:
            out.add(j)
    return frozenset(out)


def preimage_tree(k: int, n: int, budget: int = DEFAULT_TREE_BUDGET) -> frozenset:
    """{j >= 3 : T^n(j) = k with every intermediate iterate >= 3}."""
    if k < 3:
        raise ValueError(f"preimage_tree needs k >= 3, got {k}")
    level = {k}
    visited = 1
    for _ in range(n):
        nxt = set()
        for v in level:
            nxt.add(2 * v)
            # v >= 3 keeps the odd preimage (2v-1)/3 >= 3
            if v % 3 == 2:
                nxt.add((2 * v - 1) // 3)
        visited += len(nxt)
        if visited > budget:
            raise BudgetExceeded(
                f"preimage tree of {k} exceeds {budget} nodes", partial=visited
            )
        level = nxt
    return frozenset(level)


@dataclass(frozen=True)
class LemmaSequences:
    """The (m, p, j) sequences attached to k.

    In ``density`` mode the tracked products are (6m+4)·2^p, in ``adjoint``
    mode (3m+2)·2^p.  Lists stop at the stationary index; ``padded`` extends
    them with their constant continuation.
    """

    k: int
    m_seq: tuple
    p_seq: tuple
    j_seq: tuple
    mode: str
    stationary_at: Optional[int]

    @property
    def tracked(self) -> tuple:
        base = 6 if self.mode == "density" else 3
        return tuple((base * m + 2 * base // 3) << p for m, p in zip(self.m_seq, self.p_seq))

    def padded(self, length: int) -> "LemmaSequences":
        if self.stationary_at is None or length <= len(self.m_seq):
            return self
        extra = length - len(self.m_seq)
        return LemmaSequences(
            self.k,
            self.m_seq + (self.m_seq[-1],) * extra,
            self.p_seq + (self.p_seq[-1],) * extra,
            self.j_seq + (self.j_seq[-1],) * extra,
            self.mode,
            self.stationary_at,
        )

    def to_json(self):
        return {
            "k": self.k,
            "mode": self.mode,
            "m": list(self.m_seq),
            "p": list(self.p_seq),
            "j": list(self.j_seq),
            "tracked": [str(t) for t in self.tracked],
            "stationary_at": self.stationary_at,
        }


def _odd_split(n: int):
    """n = odd · 2^q, returned as (odd, q)."""
    q = (n & -n).bit_length() - 1
    return n >> q, q


def lemma_sequences(k: int, mode: str = "density", max_steps: int = 10**4) -> LemmaSequences:
    if mode not in ("density", "adjoint"):
        raise ValueError(f"unknown mode {mode!r}")
    if k < 3 or is_power_of_two(k):
        raise ValueError(f"k must be >= 3 and not a power of two, got {k}")
    odd, p = _odd_split(k)
    ms, ps, js = [(odd - 1) // 2], [p], [p + 1]
    stationary = None
    while True:
        nxt = 3 * ms[-1] + 2
        if is_power_of_two(nxt):
            stationary = len(ms)
            break
        if len(ms) >= max_steps:
            break
        odd, q = _odd_split(nxt)
        # density mode tracks (3m+2)·2^(p+1), adjoint mode (3m+2)·2^p
        p_next = q + ps[-1] + (1 if mode == "density" else 0)
        j_next = js[-1] + q + 1
        ms.append((odd - 1) // 2)
        ps.append(p_next)
        js.append(j_next)
    return LemmaSequences(k, tuple(ms), tuple(ps), tuple(js), mode, stationary)
