"""Finite-support coefficient vectors of the quotient space (degrees >= 3)."""

from __future__ import annotations

import math
from typing import Iterable, Mapping

from .scalars import (
    ZERO,
    ExactnessError,
    abs_sq,
    conj,
    exact,
    format_rational,
    parse_rational,
    qq,
    to_complex,
    to_sympy,
)
from .weights import WeightDescriptor

RATIONAL = "rational"
FLOAT = "float"
MIN_DEGREE = 3


class ScalarKindError(TypeError):
    pass


class CoeffVec:
    """Immutable sparse vector Σ c_d z^d with every d >= 3 and no zero entries.

    ``kind`` is ``"rational"`` (exact Gaussian rationals) or ``"float"``
    (Python complex).  Conversion only goes rational → float.
    """

    __slots__ = ("_entries", "kind")

    def __init__(self, entries: Mapping[int, object] | Iterable = (), kind: str = RATIONAL):
        if kind not in (RATIONAL, FLOAT):
            raise ValueError(f"unknown scalar kind {kind!r}")
        items = entries.items() if isinstance(entries, Mapping) else entries
        conv = exact if kind == RATIONAL else to_complex
        store = {}
        for d, c in items:
            d = int(d)
            if d < MIN_DEGREE:
                raise ValueError(f"degree {d} is below 3 and not part of the quotient space")
            c = conv(c)
            if c:
                store[d] = c
        object.__setattr__(self, "_entries", store)
        object.__setattr__(self, "kind", kind)

    def __setattr__(self, name, value):
        raise AttributeError("CoeffVec is immutable")

    @classmethod
    def _raw(cls, store: dict, kind: str) -> "CoeffVec":
        # trusted constructor: store already pruned and converted
        v = object.__new__(cls)
        object.__setattr__(v, "_entries", store)
        object.__setattr__(v, "kind", kind)
        return v

    @classmethod
    def monomial(cls, degree: int, coeff=1, kind: str = RATIONAL) -> "CoeffVec":
        return cls({degree: coeff}, kind)

    @classmethod
    def zero(cls, kind: str = RATIONAL) -> "CoeffVec":
        return cls._raw({}, kind)

    # -- access ----------------------------------------------------------
    def __getitem__(self, d: int):
        return self._entries.get(d, ZERO if self.kind == RATIONAL else 0j)

    def items(self):
        return sorted(self._entries.items())

    @property
    def support(self) -> tuple:
        return tuple(sorted(self._entries))

    @property
    def max_degree(self) -> int:
        return max(self._entries, default=0)

    def __len__(self):
        return len(self._entries)

    def __bool__(self):
        return bool(self._entries)

    def __iter__(self):
        return iter(self.items())

    def __eq__(self, other):
        if not isinstance(other, CoeffVec):
            return NotImplemented
        if self.kind != other.kind:
            return False
        return self._entries == other._entries

    def __hash__(self):
        return hash((self.kind, tuple(self.items())))

    def __repr__(self):
        if not self._entries:
            return "CoeffVec(0)"
        terms = " + ".join(f"({c})z^{d}" for d, c in self.items())
        return f"CoeffVec[{self.kind}]({terms})"

    def restrict(self, lo: int, hi: int) -> "CoeffVec":
        """Entries with lo <= degree <= hi."""
        return CoeffVec._raw({d: c for d, c in self._entries.items() if lo <= d <= hi}, self.kind)

    def to_float(self) -> "CoeffVec":
        if self.kind == FLOAT:
            return self
        return CoeffVec._raw({d: to_complex(c) for d, c in self._entries.items()}, FLOAT)

    # -- linear structure ------------------------------------------------
    def _coerce(self, other: "CoeffVec"):
        if self.kind == other.kind:
            return self, other
        return self.to_float(), other.to_float()

    def __add__(self, other: "CoeffVec") -> "CoeffVec":
        a, b = self._coerce(other)
        out = dict(a._entries)
        for d, c in b._entries.items():
            s = out.get(d)
            s = c if s is None else s + c
            if s:
                out[d] = s
            else:
                out.pop(d, None)
        return CoeffVec._raw(out, a.kind)

    def __neg__(self) -> "CoeffVec":
        return CoeffVec._raw({d: -c for d, c in self._entries.items()}, self.kind)

    def __sub__(self, other: "CoeffVec") -> "CoeffVec":
        return self + (-other)

    def scale(self, lam) -> "CoeffVec":
        if self.kind == RATIONAL:
            try:
                lam = exact(lam)
            except ExactnessError:
                return self.to_float().scale(lam)
        else:
            lam = to_complex(lam)
        if not lam:
            return CoeffVec.zero(self.kind)
        return CoeffVec._raw({d: lam * c for d, c in self._entries.items()}, self.kind)

    def __mul__(self, lam):
        return self.scale(lam)

    __rmul__ = __mul__

    # -- serialization ---------------------------------------------------
    def to_json(self) -> dict:
        if self.kind == RATIONAL:
            entries = [[d, format_rational(c.x), format_rational(c.y)] for d, c in self.items()]
        else:
            entries = [[d, c.real, c.imag] for d, c in self.items()]
        return {"scalar": self.kind, "entries": entries}

    @classmethod
    def from_json(cls, obj: dict) -> "CoeffVec":
        kind = obj["scalar"]
        if kind == RATIONAL:
            items = [(d, exact(parse_rational(re), parse_rational(im))) for d, re, im in obj["entries"]]
        else:
            items = [(d, complex(re, im)) for d, re, im in obj["entries"]]
        return cls(items, kind)


def add(f: CoeffVec, g: CoeffVec) -> CoeffVec:
    return f + g


def sub(f: CoeffVec, g: CoeffVec) -> CoeffVec:
    return f - g


def scale(f: CoeffVec, lam) -> CoeffVec:
    return f.scale(lam)


def _exact_path(w: WeightDescriptor, *vecs: CoeffVec) -> bool:
    return w.is_exact and all(v.kind == RATIONAL for v in vecs)


def norm_sq(f: CoeffVec, w: WeightDescriptor):
    """Σ |c_d|²/ω(d).  Exact (sympy, π symbolic) when the data allow, else float."""
    if _exact_path(w, f):
        total = ZERO
        for d, c in f._entries.items():
            total += exact(abs_sq(c) * qq(w.reciprocal(d)))
        return to_sympy(total, pi=w.pi_unit)
    return norm_sq_float(f, w)


def norm_sq_float(f: CoeffVec, w: WeightDescriptor) -> float:
    total = 0.0
    for d, c in f._entries.items():
        total += abs_sq(to_complex(c)) / w.value(d)
    return total


def norm(f: CoeffVec, w: WeightDescriptor) -> float:
    return math.sqrt(norm_sq_float(f, w))


def inner(f: CoeffVec, g: CoeffVec, w: WeightDescriptor):
    """⟨f, g⟩ = Σ c_d(f)·conj(c_d(g))/ω(d), linear in f."""
    if f.kind != g.kind:
        raise ScalarKindError(f"inner product of {f.kind} and {g.kind} vectors")
    small, big = (f, g) if len(f) <= len(g) else (g, f)
    common = [d for d in small._entries if d in big._entries]
    if _exact_path(w, f):
        total = ZERO
        for d in common:
            total += f._entries[d] * conj(g._entries[d]) * exact(qq(w.reciprocal(d)))
        return to_sympy(total, pi=w.pi_unit)
    total = 0j
    for d in common:
        total += to_complex(f._entries[d]) * to_complex(g._entries[d]).conjugate() / w.value(d)
    return total
