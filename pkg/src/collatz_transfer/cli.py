"""Command-line front end.

    collatz-transfer [global options] GROUP COMMAND [options]

Global options come before the group: ``--weight`` (preset name or descriptor
JSON), ``--format json|csv``, ``--seed``, ``--budget`` (multiplier applied to
every internal budget) and ``--config`` (JSON file with any of those keys;
defaults to $COLLATZ_TRANSFER_CONFIG when set).

Exit status: 0 on success, 2 when a predicate refuses the input, 3 when a
budget runs out.  Exact rationals are printed as "p/q" strings, decimals as
JSON numbers.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Optional

from . import collatz_core, eigen, ergodic_lab, exact_norm, transfer_op
from .errors import BudgetExceeded, PredicateError
from .scalars import format_complex, format_rational, parse_complex, parse_rational
from .space import CoeffVec
from .weights import WeightDescriptor, boundedness_check, classic_bergman, weight_predicates

CONFIG_ENV = "COLLATZ_TRANSFER_CONFIG"
EXIT_OK, EXIT_PREDICATE, EXIT_BUDGET = 0, 2, 3

PRESETS = {"bergman": classic_bergman, "classic_bergman": classic_bergman}

log = logging.getLogger("collatz_transfer")


@dataclass(frozen=True)
class RunConfig:
    """Everything a CLI call depends on besides its own flags."""

    weight: WeightDescriptor
    tree_budget: int = collatz_core.DEFAULT_TREE_BUDGET
    orbit_budget: int = collatz_core.DEFAULT_ORBIT_BUDGET
    n_max: int = exact_norm.DEFAULT_MAX_N
    format: str = "json"
    seed: int = 0

    def scaled(self, multiplier: float) -> "RunConfig":
        # exact-norm work grows roughly 6x per level, so n_max moves by log_6
        extra = math.floor(math.log(multiplier, 6) + 1e-9) if multiplier > 0 else 0
        return replace(
            self,
            tree_budget=max(1, int(self.tree_budget * multiplier)),
            orbit_budget=max(1, int(self.orbit_budget * multiplier)),
            n_max=max(1, self.n_max + extra),
        )


def parse_weight(text: str) -> WeightDescriptor:
    text = text.strip()
    if text in PRESETS:
        return PRESETS[text]()
    if text.startswith("{"):
        return WeightDescriptor.from_json(json.loads(text))
    if os.path.exists(text):
        with open(text) as fh:
            return WeightDescriptor.from_json(json.load(fh))
    raise argparse.ArgumentTypeError(f"unknown weight {text!r}; use 'bergman' or descriptor JSON")


def parse_vector(text: str) -> CoeffVec:
    """'3:1,4:-1/2,5:2i' or CoeffVec JSON."""
    text = text.strip()
    if text.startswith("{"):
        return CoeffVec.from_json(json.loads(text))
    if not text or text == "0":
        return CoeffVec.zero()
    entries = {}
    for part in text.split(","):
        d, _, c = part.partition(":")
        entries[int(d)] = parse_complex(c or "1")
    return CoeffVec(entries)


def _fraction_arg(text: str) -> Fraction:
    return parse_rational(text)


def load_config(args) -> RunConfig:
    data = {}
    path = args.config or os.environ.get(CONFIG_ENV)
    if path:
        with open(path) as fh:
            data = json.load(fh)
    weight = args.weight if args.weight is not None else data.get("weight", "bergman")
    if isinstance(weight, dict):
        weight = WeightDescriptor.from_json(weight)
    elif isinstance(weight, str):
        weight = parse_weight(weight)
    cfg = RunConfig(
        weight=weight,
        format=args.format or data.get("format", "json"),
        seed=args.seed if args.seed is not None else int(data.get("seed", 0)),
    )
    mult = args.budget if args.budget is not None else float(data.get("budget", 1.0))
    return cfg.scaled(mult) if mult != 1.0 else cfg


# -- output ----------------------------------------------------------------


def _jsonable(x):
    if isinstance(x, Fraction):
        return format_rational(x)
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if hasattr(x, "item") and not isinstance(x, (str, bytes)):
        return x.item()
    return x


def emit(payload: dict, cfg: RunConfig, rows: Optional[Iterable] = None, out=None):
    """JSON payload, or CSV rows (falling back to key,value pairs)."""
    out = out or sys.stdout
    if cfg.format == "csv":
        writer = csv.writer(out, lineterminator="\n")
        if rows is None:
            writer.writerow(("key", "value"))
            rows = ((k, json.dumps(_jsonable(v)) if isinstance(v, (dict, list)) else _jsonable(v))
                    for k, v in payload.items())
        for r in rows:
            writer.writerow(r)
    else:
        json.dump(_jsonable(payload), out, indent=2, ensure_ascii=False)
        out.write("\n")


# -- collatz ---------------------------------------------------------------


def cmd_collatz_orbit(args, cfg):
    rep = collatz_core.orbit(args.k, cfg.orbit_budget)
    if rep.exhausted:
        raise BudgetExceeded(f"orbit of {args.k} neither died nor repeated within {cfg.orbit_budget} steps",
                             partial=len(rep.orbit))
    rows = [("step", "value")] + list(enumerate(rep.orbit))
    emit(rep.to_json(), cfg, rows)


def cmd_collatz_preimages(args, cfg):
    if args.n == 1:
        pre = sorted(collatz_core.preimages(args.k))
    else:
        pre = sorted(collatz_core.preimage_tree(args.k, args.n, cfg.tree_budget))
    emit({"k": args.k, "n": args.n, "preimages": pre}, cfg, [("preimage",)] + [(p,) for p in pre])


def cmd_collatz_sequences(args, cfg):
    seq = collatz_core.lemma_sequences(args.k, args.mode, cfg.orbit_budget)
    obj = seq.to_json()
    rows = [("index", "m", "p", "j", "tracked")] + [
        (i + 1, m, p, j, t) for i, (m, p, j, t) in enumerate(zip(seq.m_seq, seq.p_seq, seq.j_seq, seq.tracked))
    ]
    emit(obj, cfg, rows)


# -- norm ------------------------------------------------------------------


def cmd_norm_scan(args, cfg):
    rep = transfer_op.iterate_norm_scan(cfg.weight, args.n, args.k_max, cfg.tree_budget)
    emit(rep.to_json(), cfg)


def cmd_norm_exact(args, cfg):
    if cfg.weight.family != "classic_bergman":
        raise PredicateError("exact iterate norms are only available for the classic Bergman weight")
    res = exact_norm.exact_norm_detail(args.n, args.workers, cfg.n_max)
    obj = {
        "n": res.n,
        "value": res.value,
        "value_decimal": float(res.value),
        "best_residue": res.best_residue,
        "best_k": res.best_k,
        "exactness": transfer_op.EXACT_LIMIT,
    }
    emit(obj, cfg, [("n", "value"), (res.n, format_rational(res.value))])


def cmd_norm_table(args, cfg):
    if cfg.weight.family != "classic_bergman":
        raise PredicateError("the spectral table needs the classic Bergman weight")
    table = exact_norm.spectral_radius_table(args.n_max, args.workers, cfg.n_max)
    obj = table.to_json()
    obj["submultiplicative"] = table.submultiplicative()
    obj["above_lower_bound"] = table.above_lower_bound()
    emit(obj, cfg, table.csv_rows())


def cmd_norm_bounded(args, cfg):
    emit(boundedness_check(cfg.weight, args.m_max).to_json(), cfg)


# -- eig -------------------------------------------------------------------


def _spec(args) -> eigen.EigenSpec:
    return eigen.EigenSpec(args.m, parse_complex(args.mu), args.cap)


def cmd_eig_materialize(args, cfg):
    spec = _spec(args)
    mat = eigen.materialize(spec, cfg.weight)
    obj = {
        "spec": spec.to_json(),
        "vector": mat.vector.to_json(),
        "tail_norm_sq_bound": mat.tail_norm_sq_bound,
        "first_dropped": mat.first_dropped,
    }
    rows = [("degree", "re", "im")] + [tuple(e) for e in mat.vector.to_json()["entries"]]
    emit(obj, cfg, rows)


def cmd_eig_verify(args, cfg):
    spec = _spec(args)
    chk = eigen.verify_eigenrelation(spec, cfg.weight)
    emit(
        {
            "spec": spec.to_json(),
            "window": list(chk.window),
            "residual": chk.residual,
            "exact_zero": chk.exact_zero,
        },
        cfg,
    )


def cmd_eig_periodic(args, cfg):
    pp = eigen.periodic_point(args.m, args.alpha, args.cap)
    returns = {t: pp.returns_after(t, args.tol) for t in range(1, args.t_max + 1)}
    emit(
        {
            "spec": pp.spec.to_json(),
            "period": pp.period,
            "window": list(pp.window()),
            "returns": {str(t): r for t, r in returns.items()},
        },
        cfg,
        [("t", "returns")] + list(returns.items()),
    )


def cmd_eig_witnesses(args, cfg):
    wit = eigen.godefroy_shapiro_witnesses(cfg.weight, args.rho, args.m_max, args.n_radii, args.n_angles, args.cap)
    emit(
        {
            "rho": wit.rho,
            "inside": [s.to_json() for s in wit.inside],
            "outside": [s.to_json() for s in wit.outside],
            "max_outside_modulus": wit.max_outside_modulus,
        },
        cfg,
        [("side", "m", "mu")]
        + [("inside", s.m, format_complex(s.mu)) for s in wit.inside]
        + [("outside", s.m, format_complex(s.mu)) for s in wit.outside],
    )


def cmd_eig_span(args, cfg):
    family = []
    for item in args.field:
        m, _, mu = item.partition(":")
        family.append(eigen.EigenSpec(int(m), parse_complex(mu), args.cap))
    res = eigen.span_residual(args.k, family, cfg.weight, args.tol)
    emit({"k": args.k, "residual": res.residual, "condition": res.condition, "tail_bound": res.tail_bound}, cfg)


# -- hc --------------------------------------------------------------------


def cmd_hc_build(args, cfg):
    targets = [parse_vector(t) for t in args.target]
    cert = ergodic_lab.build_hypercyclic_vector(targets, args.eps, cfg.weight, cfg.orbit_budget)
    obj = cert.to_json(cfg.weight)
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(obj, fh, indent=2)
    summary = {"schedule": list(cert.schedule), "epsilon": cert.epsilon, "errors": list(cert.errors)}
    emit(obj if not args.out else summary, cfg,
         [("i", "N", "error")] + [(i, n, e) for i, (n, e) in enumerate(zip(cert.schedule, cert.errors))])


def cmd_hc_verify(args, cfg):
    with open(args.cert) as fh:
        obj = json.load(fh)
    cert = ergodic_lab.HypercyclicCertificate.from_json(obj)
    w = WeightDescriptor.from_json(obj["weight"]) if "weight" in obj else cfg.weight
    chk = ergodic_lab.verify_certificate(cert, w)
    emit({"errors": list(chk.errors), "ok": chk.ok, "schedule_ok": chk.schedule_ok}, cfg)
    if not (chk.ok and chk.schedule_ok):
        raise PredicateError("certificate does not verify")


# -- ergodic ---------------------------------------------------------------


def _shape(args) -> ergodic_lab.MixtureShape:
    return ergodic_lab.MixtureShape(args.M, args.L, args.decay)


def cmd_ergodic_sample(args, cfg):
    s = ergodic_lab.sample_invariant(_shape(args), cfg.seed, cfg.weight, args.run)
    rows = [("m", "mu_re", "mu_im", "g_re", "g_im", "scale")] + s.to_json()["atoms"]
    emit(s.to_json(), cfg, rows)


def cmd_ergodic_invariance(args, cfg):
    f = parse_vector(args.f)
    if args.experiments > 1:
        table = ergodic_lab.repeated_invariance(
            _shape(args), f, args.runs, args.experiments, cfg.seed, cfg.weight, args.mismatch
        )
        emit({"rows": [list(r) for r in table.rows], "pass_rate": table.pass_rate()}, cfg, table.csv_rows())
        return
    rep = ergodic_lab.invariance_test(_shape(args), f, args.runs, cfg.seed, cfg.weight, args.mismatch)
    emit(rep.to_json(), cfg)


def cmd_ergodic_visits(args, cfg):
    if args.cert:
        with open(args.cert) as fh:
            x = ergodic_lab.HypercyclicCertificate.from_json(json.load(fh))
    else:
        x = parse_vector(args.x)
    target = parse_vector(args.target)
    freq = ergodic_lab.visit_frequency(x, target, args.eps, args.horizon, cfg.weight)
    emit({"horizon": args.horizon, "eps": args.eps, "frequency": freq}, cfg)


def cmd_weight_info(args, cfg):
    w = cfg.weight
    emit({"weight": w.to_json(), "description": str(w), "predicates": weight_predicates(w).to_json()}, cfg)


# -- parser ----------------------------------------------------------------


def _global_options(p: argparse.ArgumentParser, default):
    p.add_argument("--weight", default=default, help="'bergman' or weight descriptor JSON / JSON file")
    p.add_argument("--format", choices=("json", "csv"), default=default)
    p.add_argument("--seed", type=int, default=default)
    p.add_argument("--budget", type=float, default=default, help="multiplier for all internal budgets")
    p.add_argument("--config", default=default, help=f"JSON config file (default ${CONFIG_ENV})")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="collatz-transfer", description=__doc__.split("\n")[0])
    _global_options(p, None)
    p.add_argument("-v", "--verbose", action="count", default=0)
    # leaf commands accept the global options too; SUPPRESS keeps the top-level value
    common = argparse.ArgumentParser(add_help=False)
    _global_options(common, argparse.SUPPRESS)
    groups = p.add_subparsers(dest="group", required=True)

    g = groups.add_parser("collatz", help="orbits, preimages, lemma sequences").add_subparsers(dest="cmd", required=True)
    c = g.add_parser("orbit", parents=[common])
    c.add_argument("--k", type=int, required=True)
    c.set_defaults(func=cmd_collatz_orbit)
    c = g.add_parser("preimages", parents=[common])
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--n", type=int, default=1)
    c.set_defaults(func=cmd_collatz_preimages)
    c = g.add_parser("sequences", parents=[common])
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--mode", choices=("density", "adjoint"), default="density")
    c.set_defaults(func=cmd_collatz_sequences)

    g = groups.add_parser("norm", help="operator norms").add_subparsers(dest="cmd", required=True)
    c = g.add_parser("scan", parents=[common])
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--k-max", type=int, default=10**4)
    c.set_defaults(func=cmd_norm_scan)
    c = g.add_parser("exact", parents=[common])
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--workers", type=int, default=1)
    c.set_defaults(func=cmd_norm_exact)
    c = g.add_parser("table", parents=[common])
    c.add_argument("--n-max", type=int, default=6)
    c.add_argument("--workers", type=int, default=1)
    c.set_defaults(func=cmd_norm_table)
    c = g.add_parser("bounded", parents=[common])
    c.add_argument("--m-max", type=int, default=10**4)
    c.set_defaults(func=cmd_norm_bounded)

    g = groups.add_parser("eig", help="eigenvector fields").add_subparsers(dest="cmd", required=True)
    for name, func in (("materialize", cmd_eig_materialize), ("verify", cmd_eig_verify)):
        c = g.add_parser(name, parents=[common])
        c.add_argument("--m", type=int, required=True)
        c.add_argument("--mu", required=True, help="Gaussian rational, e.g. 1/2+1/3i")
        c.add_argument("--cap", type=int, default=2**12)
        c.set_defaults(func=func)
    c = g.add_parser("periodic", parents=[common])
    c.add_argument("--m", type=int, default=0)
    c.add_argument("--alpha", type=_fraction_arg, required=True, help="μ = exp(iαπ)")
    c.add_argument("--cap", type=int, default=2**16)
    c.add_argument("--t-max", type=int, default=8)
    c.add_argument("--tol", type=float, default=1e-12)
    c.set_defaults(func=cmd_eig_periodic)
    c = g.add_parser("witnesses", parents=[common])
    c.add_argument("--rho", type=_fraction_arg, required=True)
    c.add_argument("--m-max", type=int, default=2)
    c.add_argument("--n-radii", type=int, default=5)
    c.add_argument("--n-angles", type=int, default=8)
    c.add_argument("--cap", type=int, default=2**12)
    c.set_defaults(func=cmd_eig_witnesses)
    c = g.add_parser("span", parents=[common])
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--field", action="append", default=[], help="m:mu, repeatable")
    c.add_argument("--cap", type=int, default=2**8)
    c.add_argument("--tol", type=float, default=1e-12)
    c.set_defaults(func=cmd_eig_span)

    g = groups.add_parser("hc", help="hypercyclic certificates").add_subparsers(dest="cmd", required=True)
    c = g.add_parser("build", parents=[common])
    c.add_argument("--target", action="append", default=[], help="sparse vector '3:1,4:-1/2'; repeatable")
    c.add_argument("--eps", type=_fraction_arg, default=Fraction(1, 1000))
    c.add_argument("--out", default=None, help="write the certificate JSON here")
    c.set_defaults(func=cmd_hc_build)
    c = g.add_parser("verify", parents=[common])
    c.add_argument("--cert", required=True)
    c.set_defaults(func=cmd_hc_verify)

    g = groups.add_parser("ergodic", help="invariant sampling").add_subparsers(dest="cmd", required=True)
    for name, func in (("sample", cmd_ergodic_sample), ("invariance", cmd_ergodic_invariance)):
        c = g.add_parser(name, parents=[common])
        c.add_argument("--M", type=int, default=3)
        c.add_argument("--L", type=int, default=4)
        c.add_argument("--decay", type=float, default=0.5)
        if name == "sample":
            c.add_argument("--run", type=int, default=0)
        else:
            c.add_argument("--f", default="3:1,4:1/2,10:1,20:2", help="functional as a sparse vector")
            c.add_argument("--runs", type=int, default=2000)
            c.add_argument("--experiments", type=int, default=1)
            c.add_argument("--mismatch", type=float, default=1.0)
        c.set_defaults(func=func)
    c = g.add_parser("visits", parents=[common])
    c.add_argument("--x", default=None)
    c.add_argument("--cert", default=None)
    c.add_argument("--target", required=True)
    c.add_argument("--eps", type=float, required=True)
    c.add_argument("--horizon", type=int, default=100)
    c.set_defaults(func=cmd_ergodic_visits)

    g = groups.add_parser("weight", help="weight descriptors").add_subparsers(dest="cmd", required=True)
    c = g.add_parser("info", parents=[common])
    c.set_defaults(func=cmd_weight_info)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(message)s")
    if args.group == "ergodic" and args.cmd == "visits" and not (args.x or args.cert):
        parser.error("ergodic visits needs --x or --cert")
    try:
        cfg = load_config(args)
        args.func(args, cfg)
    except BudgetExceeded as e:
        print(f"budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except PredicateError as e:
        print(f"predicate refused: {e}", file=sys.stderr)
        return EXIT_PREDICATE
    except argparse.ArgumentTypeError as e:
        parser.error(str(e))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
