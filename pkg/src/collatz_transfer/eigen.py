"""Eigenvector fields h_m(μ,·) of 𝒯 and what can be checked about them exactly.

    h_m(μ) = Σₙ μⁿ (z^{(6m+4)2ⁿ} − z^{(2m+1)2ⁿ})   (m >= 1)
    h_0(μ) = Σₙ μⁿ z^{2^{n+2}}

Truncation keeps whole pairs: term n survives iff (6m+4)·2ⁿ <= cap (2^{n+2}
for m = 0).  Then 𝒯h_trunc = μ·(h_trunc − top pair), and every degree whose
preimages all sit below the first dropped degree is a *safe* degree, where
identities hold exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import IllConditionedError, MembershipError, PredicateError
from .scalars import (
    ONE,
    ExactnessError,
    abs_sq,
    exact,
    format_complex,
    parse_complex,
    to_complex,
)
from .space import FLOAT, RATIONAL, CoeffVec
from .transfer_op import apply_adjoint, apply_T, apply_T_power
from .weights import (
    WeightDescriptor,
    abs_sq_below_threshold,
    classic_bergman,
    rho_admissible,
    weight_predicates,
)


def _coerce_mu(mu):
    if isinstance(mu, str):
        return parse_complex(mu)
    if isinstance(mu, (float, complex)):
        return complex(mu)
    try:
        return exact(mu)
    except ExactnessError:
        return complex(mu)


@dataclass(frozen=True)
class EigenSpec:
    m: int
    mu: object  # exact Gaussian rational or complex
    degree_cap: int

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("m must be nonnegative")
        if self.degree_cap < 1:
            raise ValueError("degree_cap must be positive")
        object.__setattr__(self, "mu", _coerce_mu(self.mu))

    @property
    def exact(self) -> bool:
        return not isinstance(self.mu, complex)

    def rays(self):
        return rays(self.m)

    @property
    def top_index(self) -> int:
        """Largest n kept by the truncation (-1 when nothing fits)."""
        lead = self.rays()[0][0]
        if lead > self.degree_cap:
            return -1
        return (self.degree_cap // lead).bit_length() - 1

    @property
    def first_dropped(self) -> int:
        """Smallest support degree of the full field that truncation drops."""
        n = self.top_index + 1
        return min(base << n for base, _ in self.rays())

    def to_json(self):
        mu = format_complex(self.mu) if self.exact else [self.mu.real, self.mu.imag]
        return {"m": self.m, "mu": mu, "cap": self.degree_cap}

    @classmethod
    def from_json(cls, obj):
        mu = obj["mu"]
        if isinstance(mu, list):
            re_, im_ = mu
            if isinstance(re_, str) or isinstance(im_, str):
                mu = parse_complex(f"{re_}") + parse_complex(f"{im_}i")
            elif isinstance(re_, int) and isinstance(im_, int):
                mu = exact(re_, im_)
            else:
                mu = complex(re_, im_)
        return cls(int(obj["m"]), mu, int(obj["cap"]))


def rays(m: int):
    """[(base degree, sign)] of the dyadic rays carrying h_m."""
    if m == 0:
        return [(4, 1)]
    return [(6 * m + 4, 1), (2 * m + 1, -1)]


@dataclass(frozen=True)
class Materialized:
    vector: CoeffVec
    tail_norm_sq_bound: float
    first_dropped: int


def _reciprocal_ray_bound(w: WeightDescriptor, k: int):
    """(C, r) with 1/ω(k·2ⁿ) <= C·rⁿ for all n such that k·2ⁿ is past any table."""
    alpha = float(w.exponent)
    c = float(w.c if w.family != "tabulated" else w.tail.c)
    if w.pi_unit:
        c = 1.0 / math.pi
    # ω(n) = c·(n+1)^alpha ; (k2ⁿ+1) >= k2ⁿ for alpha >= 0, <= (k+1)2ⁿ otherwise
    base = k if alpha >= 0 else k + 1
    return 1.0 / (c * base**alpha), 2.0**-alpha


def ray_tail_sum(w: WeightDescriptor, mu_abs_sq: float, k: int, start: int) -> float:
    """Upper bound on Σ_{n>=start} |μ|^{2n}/ω(k·2ⁿ); inf when divergent."""
    total = 0.0
    n = start
    if w.family == "tabulated":
        while (k << n) < len(w.table):
            total += mu_abs_sq**n / w.value(k << n)
            n += 1
    C, r = _reciprocal_ray_bound(w, k)
    q = mu_abs_sq * r
    if q >= 1.0:
        return math.inf
    return (total + C * q**n / (1.0 - q)) * (1 + 1e-12)


def membership(m: int, mu, w: WeightDescriptor) -> bool:
    """h_m(μ) ∈ 𝒳_ω  ⇔  |μ|² < 2^alpha, decided exactly for rational μ.

    Both defining series run along dyadic rays k·2ⁿ, so by the ratio test they
    converge iff |μ|²·ω(k2ⁿ)/ω(k2ⁿ⁺¹) < 1 in the limit, i.e. |μ|² < 2^alpha.
    """
    mu = _coerce_mu(mu)
    x = abs_sq(mu)
    if not x:
        return True
    if not isinstance(x, float):
        x = Fraction(int(x.numerator), int(x.denominator))
    return abs_sq_below_threshold(x, w)


def materialize(spec: EigenSpec, w: Optional[WeightDescriptor] = None) -> Materialized:
    """Truncated h_m(μ) plus a bound on the squared norm of what was dropped."""
    w = w or classic_bergman()
    if not membership(spec.m, spec.mu, w):
        raise MembershipError(
            f"h_{spec.m}({spec.mu}) is not in the space for {w}: |mu|^2 >= 2^{w.exponent}"
        )
    kind = RATIONAL if spec.exact else FLOAT
    mu = spec.mu
    entries = {}
    power = ONE if spec.exact else 1 + 0j
    for n in range(spec.top_index + 1):
        for base, sign in spec.rays():
            d = base << n
            if d >= 3:
                entries[d] = power if sign > 0 else -power
        power = power * mu
    vec = CoeffVec(entries, kind)
    mu2 = float(abs_sq(to_complex(mu)))
    start = spec.top_index + 1
    tail = sum(ray_tail_sum(w, mu2, base, start) for base, _ in spec.rays())
    return Materialized(vec, tail, spec.first_dropped)


@dataclass(frozen=True)
class EigenCheck:
    window: tuple  # (lo, hi), inclusive
    residual: float  # max |coefficient| of the residual inside the window
    residual_vector: CoeffVec

    @property
    def exact_zero(self) -> bool:
        return not self.residual_vector


def safe_window(first_dropped: int, steps: int = 1):
    """Degrees d with 2^steps·d below the first dropped degree."""
    hi = (first_dropped - 1) >> steps
    if hi < 3:
        raise ValueError(f"safe window empty (first dropped degree {first_dropped})")
    return 3, hi


def verify_eigenrelation(spec: EigenSpec, w: Optional[WeightDescriptor] = None) -> EigenCheck:
    """Residual 𝒯h − μh restricted to the safe window."""
    h = materialize(spec, w).vector
    lo, hi = safe_window(spec.first_dropped)
    res = (apply_T(h) - h.scale(spec.mu)).restrict(lo, hi)
    biggest = max((abs(to_complex(c)) for _, c in res), default=0.0)
    return EigenCheck((lo, hi), biggest, res)


# -- periodic points -------------------------------------------------------


def root_of_unity(alpha: Fraction):
    """e^{iαπ}: exact for the fourth roots of unity, complex otherwise."""
    alpha = Fraction(alpha) % 2
    table = {
        Fraction(0): exact(1),
        Fraction(1, 2): exact(0, 1),
        Fraction(1): exact(-1),
        Fraction(3, 2): exact(0, -1),
    }
    if alpha in table:
        return table[alpha]
    theta = math.pi * float(alpha)
    return complex(math.cos(theta), math.sin(theta))


def period_of(alpha: Fraction) -> int:
    """Order of e^{iαπ}: 2q/gcd(p, 2q) for α = p/q."""
    alpha = Fraction(alpha)
    p, q = alpha.numerator, alpha.denominator
    return 2 * q // math.gcd(p, 2 * q)


@dataclass(frozen=True)
class PeriodicPoint:
    spec: EigenSpec
    vector: CoeffVec
    period: int

    def window(self, steps: Optional[int] = None):
        return safe_window(self.spec.first_dropped, self.period if steps is None else steps)

    def returns_after(self, t: int, tol: float = 0.0) -> bool:
        """𝒯ᵗh = h on the t-step safe window (exactly, or within ``tol`` for floats)."""
        lo, hi = self.window(t)
        diff = (apply_T_power(self.vector, t) - self.vector).restrict(lo, hi)
        if self.vector.kind == RATIONAL or tol == 0.0:
            return not diff
        return all(abs(to_complex(c)) <= tol for _, c in diff)


def periodic_point(m: int, alpha, cap: int = 2**16) -> PeriodicPoint:
    alpha = Fraction(alpha)
    spec = EigenSpec(m, root_of_unity(alpha), cap)
    # |μ| = 1 lies inside the membership region of every summable weight
    vec = materialize(spec, classic_bergman()).vector
    return PeriodicPoint(spec, vec, period_of(alpha))


# -- Godefroy–Shapiro witnesses --------------------------------------------


@dataclass(frozen=True)
class GSWitnesses:
    rho: object
    inside: tuple  # EigenSpec with |μ| < 1
    outside: tuple  # EigenSpec with 1 < |μ| < √ρ

    @property
    def max_outside_modulus(self) -> float:
        return max((abs(to_complex(s.mu)) for s in self.outside), default=0.0)


def _rational_point(radius: float, theta: float, denom: int = 10**6):
    re_ = Fraction(radius * math.cos(theta)).limit_denominator(denom)
    im_ = Fraction(radius * math.sin(theta)).limit_denominator(denom)
    return exact(re_, im_)


def godefroy_shapiro_witnesses(
    w: WeightDescriptor,
    rho,
    m_max: int = 2,
    n_radii: int = 5,
    n_angles: int = 8,
    cap: int = 2**12,
) -> GSWitnesses:
    """Certified eigenvector fields on both sides of the unit circle.

    Requires ω bounded below and (ρⁿ/ω(k2ⁿ))ₙ bounded, i.e. ρ <= 2^alpha.
    Each μ is a Gaussian rational whose membership is decided exactly.
    """
    rho = Fraction(rho) if not isinstance(rho, float) else rho
    if rho <= 1:
        raise PredicateError(f"rho must exceed 1, got {rho}")
    if not weight_predicates(w).bounded_below:
        raise PredicateError(f"{w} is not bounded below")
    if not rho_admissible(rho, w):
        raise PredicateError(f"(rho^n / w(k 2^n)) is unbounded for rho={rho} and {w}")
    rho_f = float(rho)
    inner_r = [0.0] + [1 - 2.0**-i for i in range(1, n_radii + 1)]
    outer_r2 = [1 + (rho_f - 1) * (1 - 2.0**-i) for i in range(1, n_radii + 1)]
    thetas = [2 * math.pi * j / n_angles for j in range(n_angles)]
    inside, outside = [], []
    for m in range(m_max + 1):
        for r in inner_r:
            for th in thetas if r else [0.0]:
                mu = _rational_point(r, th)
                if abs_sq(mu) < 1 and membership(m, mu, w):
                    inside.append(EigenSpec(m, mu, cap))
        for r2 in outer_r2:
            for th in thetas:
                mu = _rational_point(math.sqrt(r2), th)
                x = Fraction(int(abs_sq(mu).numerator), int(abs_sq(mu).denominator))
                if 1 < x < rho and membership(m, mu, w):
                    outside.append(EigenSpec(m, mu, cap))
    return GSWitnesses(rho, tuple(inside), tuple(outside))


# -- span residuals --------------------------------------------------------


@dataclass(frozen=True)
class SpanResult:
    residual: float
    condition: float
    tail_bound: float


def _cap_for_tail(spec: EigenSpec, w: WeightDescriptor, tol: float) -> EigenSpec:
    cap = max(spec.degree_cap, 8)
    while True:
        s = EigenSpec(spec.m, spec.mu, cap)
        if materialize(s, w).tail_norm_sq_bound < tol:
            return s
        cap *= 2


def span_residual(
    k: int,
    family: Sequence[EigenSpec],
    w: Optional[WeightDescriptor] = None,
    tol: float = 1e-12,
    max_condition: float = 1e13,
) -> SpanResult:
    """Distance from z^k to span(family) in 𝒳_ω.

    Each field is summed until its tail bound drops below ``tol``; the normal
    equations are solved as a weighted least-squares problem (same solution as
    the Gram system, better conditioned).  ``condition`` is that of the Gram
    matrix.
    """
    w = w or classic_bergman()
    target_norm = 1.0 / w.value(k)
    if not family:
        return SpanResult(math.sqrt(target_norm), 1.0, 0.0)
    vecs, tail = [], 0.0
    for spec in family:
        spec = _cap_for_tail(spec, w, tol)
        mat = materialize(spec, w)
        vecs.append(mat.vector.to_float())
        tail = max(tail, mat.tail_norm_sq_bound)
    degrees = sorted({d for v in vecs for d in v.support} | {k})
    index = {d: i for i, d in enumerate(degrees)}
    scale = 1.0 / np.sqrt(w.values(np.array(degrees, dtype=float)))
    A = np.zeros((len(degrees), len(vecs)), dtype=complex)
    for j, v in enumerate(vecs):
        for d, c in v:
            A[index[d], j] = c
    A *= scale[:, None]
    t = np.zeros(len(degrees), dtype=complex)
    t[index[k]] = scale[index[k]]
    sv = np.linalg.svd(A, compute_uv=False)
    cond = math.inf if sv[-1] == 0 else float(sv[0] / sv[-1]) ** 2
    if cond > max_condition:
        raise IllConditionedError(f"Gram system condition ~{cond:.3g}", cond)
    x, *_ = np.linalg.lstsq(A, t, rcond=None)
    r = float(np.linalg.norm(A @ x - t))
    return SpanResult(r, cond, tail)


# -- adjoint eigen-equation on finite vectors ------------------------------


def adjoint_defect(f: CoeffVec, mu, w: WeightDescriptor) -> CoeffVec:
    """𝒯*f − μf.  Nonzero for every finite f ≠ 0: 𝒯* sends the top degree d to 2d."""
    mu = _coerce_mu(mu)
    g = apply_adjoint(f, w)
    if isinstance(mu, complex) or g.kind == FLOAT:
        return g.to_float() - f.to_float().scale(mu)
    return g - f.scale(mu)


def is_adjoint_eigenvector(f: CoeffVec, mu, w: WeightDescriptor) -> bool:
    return bool(f) and not adjoint_defect(f, mu, w)
