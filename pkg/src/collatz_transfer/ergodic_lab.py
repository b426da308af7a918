"""Dynamics experiments: hypercyclic vectors, invariant sampling, visit counts.

Hypercyclic vectors are built from the data of the Hypercyclicity Criterion:
finite vectors are dense, 𝒯ⁿ kills each of them after finitely many steps
(every degree eventually drops below 3), and S: z^k ↦ z^{2k} is a right
inverse with ‖Sⁿf‖ → 0.  For targets t_0, t_1, ... put

    x = Σ_i S^{N_i} t_i

with the gaps N_i − N_j (j < i) at least the death time of t_j.  Then

    𝒯^{N_i} x − t_i = Σ_{j>i} S^{N_j − N_i} t_j,

and the schedule makes that tail smaller than ε/2.

The invariant sampler draws finite Gaussian mixtures Σ scale·g·h_m(μ,·) over
unimodular μ.  𝒯 acts on them by g ↦ μg, which leaves a circularly symmetric
Gaussian's law unchanged.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np
import sympy
from scipy import stats

from .collatz_core import DEFAULT_ORBIT_BUDGET, death_time
from .eigen import EigenSpec, materialize, rays
from .errors import PredicateError
from .scalars import format_rational, parse_rational, to_complex
from .space import FLOAT, RATIONAL, CoeffVec, norm_sq, norm_sq_float
from .transfer_op import apply_T, apply_T_power, doubling_inverse_S
from .weights import WeightDescriptor, classic_bergman, weight_predicates

log = logging.getLogger(__name__)

DEFAULT_MAX_SHIFT = 4096


# -- hypercyclic certificates ----------------------------------------------


def _as_fraction(eps) -> Fraction:
    # floats go through their shortest repr so 1e-3 becomes 1/1000
    if isinstance(eps, float):
        return Fraction(repr(eps))
    return parse_rational(eps) if isinstance(eps, str) else Fraction(eps)


def _norm_sq_le(f: CoeffVec, w: WeightDescriptor, bound_sq: Fraction) -> bool:
    """‖f‖² <= bound_sq, decided exactly whenever norm_sq is exact."""
    v = norm_sq(f, w)
    if isinstance(v, float):
        return v <= float(bound_sq)
    return bool(v <= sympy.Rational(bound_sq.numerator, bound_sq.denominator))


def vector_death_time(f: CoeffVec, budget: int = DEFAULT_ORBIT_BUDGET) -> int:
    """Steps after which 𝒯ⁿf = 0 is guaranteed: max death time over the support."""
    return max((death_time(d, budget) for d in f.support), default=0)


@dataclass(frozen=True)
class HypercyclicCertificate:
    x: CoeffVec
    targets: tuple
    schedule: tuple
    epsilon: Fraction
    errors: tuple  # achieved ‖𝒯^{N_i}x − t_i‖ as floats

    def to_json(self, w: Optional[WeightDescriptor] = None):
        out = {
            "x": self.x.to_json(),
            "targets": [t.to_json() for t in self.targets],
            "schedule": list(self.schedule),
            "epsilon": format_rational(self.epsilon),
            "errors": list(self.errors),
        }
        if w is not None:
            out["weight"] = w.to_json()
        return out

    @classmethod
    def from_json(cls, obj):
        return cls(
            CoeffVec.from_json(obj["x"]),
            tuple(CoeffVec.from_json(t) for t in obj["targets"]),
            tuple(int(n) for n in obj["schedule"]),
            parse_rational(obj["epsilon"]),
            tuple(float(e) for e in obj["errors"]),
        )


def _smallest_shift(ok, lower: int, max_shift: int) -> int:
    """Smallest N >= lower with ok(N): doubling to bracket, then a linear scan.

    The scan does not assume ok is monotone, so the answer is the least
    admissible N even for weights whose dyadic values wobble.
    """
    if ok(lower):
        return lower
    step = 1
    while not ok(lower + step):
        step *= 2
        if lower + step > max_shift:
            raise PredicateError(f"no admissible shift up to {max_shift}; ‖S^n t‖ does not decay fast enough")
    for n in range(lower + step // 2 + 1, lower + step):
        if ok(n):
            return n
    return lower + step


def _errors(x: CoeffVec, targets, schedule, w: WeightDescriptor):
    errs, diffs = [], []
    for t, n in zip(targets, schedule):
        diff = apply_T_power(x, n) - t
        errs.append(math.sqrt(norm_sq_float(diff, w)))
        diffs.append(diff)
    return errs, diffs


def build_hypercyclic_vector(
    targets: Sequence[CoeffVec],
    epsilon,
    w: Optional[WeightDescriptor] = None,
    budget: int = DEFAULT_ORBIT_BUDGET,
    max_shift: int = DEFAULT_MAX_SHIFT,
) -> HypercyclicCertificate:
    """x = Σ S^{N_i} t_i with a schedule certified by direct 𝒯-iteration.

    N_i is the smallest integer such that
      (a) ‖S^{N_i} t_i‖ <= ε·2^{-i-1}            (i counted from 0),
      (b) N_i − N_j >= death time of t_j for all j < i,
      (c) ‖S^{N_i − N_j} t_i‖ <= ε·2^{-(i-j)-1} for all j < i.
    (c) bounds the tail seen at every earlier schedule point by ε/2.
    """
    w = w or classic_bergman()
    preds = weight_predicates(w)
    if not (preds.bounded_below and preds.dyadic_divergent):
        raise PredicateError(f"{w}: need bounded_below and dyadic_divergent for S^n -> 0")
    eps = _as_fraction(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    targets = tuple(targets)
    for t in targets:
        if t.kind != RATIONAL:
            raise ValueError("targets must be rational CoeffVecs")
    schedule, deaths = [], []
    x = CoeffVec.zero()
    for i, t in enumerate(targets):
        lower = max((n + d for n, d in zip(schedule, deaths)), default=0)
        if schedule:
            lower = max(lower, schedule[-1] + 1)

        def ok(n, i=i, t=t):
            if not _norm_sq_le(doubling_inverse_S(t, n), w, (eps / 2 ** (i + 1)) ** 2):
                return False
            return all(
                _norm_sq_le(doubling_inverse_S(t, n - nj), w, (eps / 2 ** (i - j + 1)) ** 2)
                for j, nj in enumerate(schedule)
            )

        n_i = _smallest_shift(ok, lower, max_shift)
        schedule.append(n_i)
        deaths.append(vector_death_time(t, budget))
        x = x + doubling_inverse_S(t, n_i)
        log.debug("target %d scheduled at N=%d", i, n_i)
    errs, diffs = _errors(x, targets, schedule, w)
    cert = HypercyclicCertificate(x, targets, tuple(schedule), eps, tuple(errs))
    for i, d in enumerate(diffs):
        if not _norm_sq_le(d, w, eps**2):
            raise AssertionError(f"schedule point {i} misses the target: error {errs[i]}")
    return cert


@dataclass(frozen=True)
class CertificateCheck:
    errors: tuple
    ok: bool
    schedule_ok: bool


def verify_certificate(cert: HypercyclicCertificate, w: Optional[WeightDescriptor] = None) -> CertificateCheck:
    """Recompute every 𝒯^{N_i}x from scratch and compare against ε exactly."""
    w = w or classic_bergman()
    errs, diffs = _errors(cert.x, cert.targets, cert.schedule, w)
    ok = all(_norm_sq_le(d, w, cert.epsilon**2) for d in diffs)
    sched = list(cert.schedule)
    schedule_ok = all(b > a for a, b in zip(sched, sched[1:])) and all(n >= 0 for n in sched)
    for i in range(len(sched)):
        for j in range(i):
            if sched[i] - sched[j] < vector_death_time(cert.targets[j]):
                schedule_ok = False
    return CertificateCheck(tuple(errs), ok, schedule_ok)


# -- visit statistics ------------------------------------------------------


def visit_frequency(
    x: Union[HypercyclicCertificate, CoeffVec],
    target: CoeffVec,
    eps: float,
    horizon: int,
    w: Optional[WeightDescriptor] = None,
) -> float:
    """#{0 <= n <= N : ‖𝒯ⁿx − target‖ < eps} / (N+1) along the exact orbit."""
    w = w or classic_bergman()
    if isinstance(x, HypercyclicCertificate):
        x = x.x
    eps_sq = float(eps) ** 2
    hits = 0
    y = x
    for n in range(horizon + 1):
        if norm_sq_float(y - target, w) < eps_sq:
            hits += 1
        y = apply_T(y)
    return hits / (horizon + 1)


# -- Gaussian mixtures on unimodular eigenfields ---------------------------


@dataclass(frozen=True)
class MixtureShape:
    M: int = 3  # largest m
    L: int = 4  # atoms per m
    decay: float = 0.5  # scale = decay^m / sqrt(L)

    def __post_init__(self):
        if self.M < 0 or self.L < 1:
            raise ValueError("need M >= 0 and L >= 1")

    @property
    def n_atoms(self) -> int:
        return (self.M + 1) * self.L

    def scales(self) -> np.ndarray:
        ms = np.repeat(np.arange(self.M + 1), self.L)
        return self.decay**ms / math.sqrt(self.L)

    def ms(self) -> np.ndarray:
        return np.repeat(np.arange(self.M + 1), self.L)

    def to_json(self):
        return {"M": self.M, "L": self.L, "decay": self.decay}


@dataclass(frozen=True)
class Atom:
    m: int
    mu: complex
    g: complex
    scale: float


@dataclass(frozen=True)
class GaussianMixtureSample:
    atoms: tuple
    seed: int
    run: int = 0
    shape: Optional[MixtureShape] = None

    def to_json(self):
        return {
            "seed": self.seed,
            "run": self.run,
            "shape": None if self.shape is None else self.shape.to_json(),
            "atoms": [[a.m, a.mu.real, a.mu.imag, a.g.real, a.g.imag, a.scale] for a in self.atoms],
        }

    @classmethod
    def from_json(cls, obj):
        atoms = tuple(
            Atom(int(m), complex(mr, mi), complex(gr, gi), float(s)) for m, mr, mi, gr, gi, s in obj["atoms"]
        )
        shape = obj.get("shape")
        return cls(atoms, int(obj["seed"]), int(obj.get("run", 0)), MixtureShape(**shape) if shape else None)


def _run_rng(seed: int, run: int, stream: tuple = ()) -> np.random.Generator:
    # one independent stream per run; within a run atom i reads row i
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(*stream, run)))


def _draw(shape: MixtureShape, seed: int, run: int, stream: tuple = ()):
    """(μ, g) arrays for one run; atom i's values depend only on (seed, run, i)."""
    u = _run_rng(seed, run, stream).random((shape.n_atoms, 3))
    mu = np.exp(2j * np.pi * u[:, 0])
    g = np.sqrt(-np.log1p(-u[:, 1])) * np.exp(2j * np.pi * u[:, 2])  # E|g|² = 1
    return mu, g


def _require_unimodular_fields(w: WeightDescriptor):
    if not weight_predicates(w).dyadic_summable:
        raise PredicateError(f"{w} is not dyadic_summable: unimodular eigenfields are not in the space")


def sample_invariant(
    shape: MixtureShape, seed: int, w: Optional[WeightDescriptor] = None, run: int = 0
) -> GaussianMixtureSample:
    w = w or classic_bergman()
    _require_unimodular_fields(w)
    mu, g = _draw(shape, seed, run)
    atoms = tuple(
        Atom(int(m), complex(a), complex(b), float(s)) for m, a, b, s in zip(shape.ms(), mu, g, shape.scales())
    )
    return GaussianMixtureSample(atoms, seed, run, shape)


def apply_T_symbolic(s: GaussianMixtureSample, times: int = 1) -> GaussianMixtureSample:
    """𝒯 on a mixture: g ↦ μᵗg, everything else untouched."""
    atoms = tuple(Atom(a.m, a.mu, a.g * a.mu**times, a.scale) for a in s.atoms)
    return GaussianMixtureSample(atoms, s.seed, s.run, s.shape)


def materialize_sample(s: GaussianMixtureSample, degree_cap: int, w: Optional[WeightDescriptor] = None):
    """(float CoeffVec, bound on the squared norm of the truncated remainder).

    The remainder bound is (Σ |scale·g|·√tail_a)², by the triangle inequality.
    """
    w = w or classic_bergman()
    total = CoeffVec.zero(FLOAT)
    root_sum = 0.0
    for a in s.atoms:
        mat = materialize(EigenSpec(a.m, a.mu, degree_cap), w)
        coef = a.scale * a.g
        total = total + mat.vector.scale(coef)
        root_sum += abs(coef) * math.sqrt(mat.tail_norm_sq_bound)
    return total, root_sum**2


def _profiles(f: CoeffVec, M: int, w: WeightDescriptor):
    """Per-m coefficient lists P with ⟨h_m(μ,·), f⟩ = Σₙ P[n]·μⁿ."""
    out = []
    top = f.max_degree
    for m in range(M + 1):
        coeffs = []
        n = 0
        while min(base << n for base, _ in rays(m)) <= top:
            c = 0j
            for base, sign in rays(m):
                d = base << n
                if d >= 3 and d in f.support:
                    c += sign * to_complex(f[d]).conjugate() / w.value(d)
            coeffs.append(c)
            n += 1
        out.append(np.array(coeffs, dtype=complex))
    return out


def functional_values(
    shape: MixtureShape,
    f: CoeffVec,
    runs: Sequence[int],
    seed: int,
    w: WeightDescriptor,
    t_power: int = 0,
    stream: tuple = (),
) -> np.ndarray:
    """⟨x_r, f⟩ (or ⟨𝒯ᵗx_r, f⟩) for each run r, using the untruncated fields.

    Because f has finite support the pairing with h_m(μ,·) is a polynomial
    in μ, so no materialization is needed.
    """
    prof = _profiles(f, shape.M, w)
    ms = shape.ms()
    scales = shape.scales()
    vals = np.empty(len(runs), dtype=complex)
    for k, r in enumerate(runs):
        mu, g = _draw(shape, seed, r, stream)
        if t_power:
            g = g * mu**t_power
        acc = 0j
        for m, P in enumerate(prof):
            if not len(P):
                continue
            sel = ms == m
            powers = mu[sel, None] ** np.arange(len(P))[None, :]
            acc += np.sum(scales[sel] * g[sel] * (powers @ P))
        vals[k] = acc
    return vals


@dataclass(frozen=True)
class InvarianceReport:
    runs: int
    statistic_re: float
    p_re: float
    statistic_im: float
    p_im: float
    p_value: float  # Bonferroni over the real and imaginary tests
    skipped: bool = False
    notice: str = ""

    def rejects(self, level: float = 0.01) -> bool:
        return not self.skipped and self.p_value < level

    def to_json(self):
        return dict(self.__dict__)


def invariance_test(
    shape: MixtureShape,
    f: CoeffVec,
    runs: int,
    seed: int,
    w: Optional[WeightDescriptor] = None,
    mismatch: float = 1.0,
    stream: tuple = (),
) -> InvarianceReport:
    """Two-sample KS test of ⟨x, f⟩ against ⟨mismatch·𝒯x', f⟩.

    x comes from runs [0, runs) and x' from runs [runs, 2·runs), so the two
    samples are independent; with mismatch = 1 the null is true exactly.
    """
    w = w or classic_bergman()
    _require_unimodular_fields(w)
    if not f:
        log.warning("invariance test skipped: functional is zero")
        return InvarianceReport(runs, 0.0, 1.0, 0.0, 1.0, 1.0, True, "zero functional: degenerate laws")
    a = functional_values(shape, f, range(runs), seed, w, stream=stream)
    b = mismatch * functional_values(shape, f, range(runs, 2 * runs), seed, w, 1, stream)
    if not np.any(a) and not np.any(b):
        log.warning("invariance test skipped: functional vanishes on every field")
        return InvarianceReport(runs, 0.0, 1.0, 0.0, 1.0, 1.0, True, "functional vanishes on the mixture")
    re_ = stats.ks_2samp(a.real, b.real)
    im_ = stats.ks_2samp(a.imag, b.imag)
    p = min(1.0, 2 * float(min(re_.pvalue, im_.pvalue)))
    return InvarianceReport(runs, float(re_.statistic), float(re_.pvalue), float(im_.statistic), float(im_.pvalue), p)


@dataclass
class ExperimentTable:
    rows: list = field(default_factory=list)  # (experiment, statistic, p_value)

    def pass_rate(self, level: float = 0.01) -> float:
        return sum(p > level for _, _, p in self.rows) / max(1, len(self.rows))

    def csv_rows(self):
        yield ("run", "statistic", "p_value")
        for r, s, p in self.rows:
            yield (r, f"{s:.6g}", f"{p:.6g}")


def repeated_invariance(
    shape: MixtureShape,
    f: CoeffVec,
    runs: int,
    experiments: int,
    seed: int,
    w: Optional[WeightDescriptor] = None,
    mismatch: float = 1.0,
) -> ExperimentTable:
    """Independent repetitions; experiment e draws from the streams (seed, e, run)."""
    table = ExperimentTable()
    for e in range(experiments):
        rep = invariance_test(shape, f, runs, seed, w, mismatch, stream=(e,))
        table.rows.append((e, max(rep.statistic_re, rep.statistic_im), rep.p_value))
    return table


def moment_check(shape: MixtureShape, runs: int, seed: int):
    """Largest gap between E[g], E[g²], E[|g|²] before and after g ↦ μg."""
    gs, hs = [], []
    for r in range(runs):
        mu, g = _draw(shape, seed, r)
        gs.append(g)
        hs.append(mu * g)
    g, h = np.concatenate(gs), np.concatenate(hs)
    gaps = [
        abs(g.mean() - h.mean()),
        abs((g**2).mean() - (h**2).mean()),
        abs((abs(g) ** 2).mean() - (abs(h) ** 2).mean()),
    ]
    return max(gaps)
