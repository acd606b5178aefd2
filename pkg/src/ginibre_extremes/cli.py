"""Command-line front end.

Subcommands write CSV (17 significant digits) or JSON.  Every output carries
the resolved configuration so a run can be repeated exactly.

Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 acceptance failure.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .empirics import kolmogorov_distance
from .errors import BudgetExceeded, DomainError, NumericalFailure
from .grid import GridPolicy
from .limits import LimitLaw, cdf as law_cdf, sup_distance
from .rates import be_rate, transition_rate, w1_rate
from .sampler import DEFAULT_DRAW_BUDGET, SeedSpec, exact_cdf_k1, sample_xn
from .scaling import Ensemble, RegimeDecl, constants_for
from .suites import SUITES

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_ACCEPTANCE = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for r in rows:
        buf.write(",".join(_fmt(v) for v in r) + "\n")
    return buf.getvalue()


def _config(args) -> dict:
    skip = {"func"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _emit(args, text: str):
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_meta(args, extra: Optional[dict] = None):
    """Sidecar JSON with the resolved configuration next to a CSV output."""
    if not args.out:
        return
    meta = {"config": _config(args), **(extra or {})}
    Path(args.out).with_suffix(".meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def _gnuplot(args, xcol: int, ycol: int, title: str):
    if not (getattr(args, "gnuplot", False) and args.out):
        return
    out = Path(args.out)
    script = (
        "set datafile separator ','\n"
        "set key autotitle columnhead\n"
        f"set title '{title}'\n"
        f"plot '{out.name}' using {xcol}:{ycol} with lines\n"
    )
    out.with_suffix(".gp").write_text(script)


def _grid_from(args) -> GridPolicy:
    return GridPolicy(
        x_lo=args.x_min, x_hi=args.x_max, coarse_step=args.step,
        refine_width=getattr(args, "refine_width", 1e-6),
        m_truncation_tol=getattr(args, "m_tol", 1e-14),
    )


def _x_values(args) -> np.ndarray:
    if args.x is not None:
        return np.asarray(args.x, dtype=float)
    return _grid_from(args).points()


def _law(args) -> LimitLaw:
    if args.law == "normal":
        return LimitLaw.normal()
    if args.law == "gumbel":
        return LimitLaw.gumbel()
    if args.alpha is None:
        raise UsageError("--law phi-alpha needs --alpha")
    return LimitLaw.phi_alpha(args.alpha)


def _decl(args) -> RegimeDecl:
    r = args.regime
    if r == "zero":
        if args.beta is None:
            raise UsageError("--regime zero needs --beta")
        return RegimeDecl.zero(args.beta)
    if r == "finite":
        if args.alpha is None:
            raise UsageError("--regime finite needs --alpha")
        return RegimeDecl.finite(args.alpha, 0.0 if args.eta is None else args.eta)
    return RegimeDecl.infinite()


def _law_for(decl: RegimeDecl) -> LimitLaw:
    if decl.kind.value == "zero":
        return LimitLaw.normal()
    if decl.kind.value == "finite":
        return LimitLaw.phi_alpha(decl.alpha)
    return LimitLaw.gumbel()


def _threads(args) -> int:
    return args.threads if args.threads else (os.cpu_count() or 1)


# ------------------------------------------------------------------ commands


def cmd_limit_cdf(args) -> int:
    law = _law(args)
    xs = _x_values(args)
    vals, cert = law_cdf(law, xs)
    rows = [(x, v, cert.tail_bound) for x, v in zip(np.atleast_1d(xs), np.atleast_1d(vals))]
    if args.format == "json":
        _emit(args, json.dumps({"config": _config(args), "law": str(law),
                                "terms_used": cert.terms_used,
                                "rows": [dict(x=r[0], cdf=r[1], tail_bound=r[2]) for r in rows]},
                               sort_keys=True) + "\n")
    else:
        _emit(args, _csv(("x", "cdf", "tail_bound"), rows))
        _emit_meta(args, {"law": str(law), "terms_used": cert.terms_used})
        _gnuplot(args, 1, 2, f"CDF of {law}")
    return EXIT_OK


def cmd_rate(args) -> int:
    e = Ensemble(args.n, args.k)
    decl = _decl(args)
    grid = _grid_from(args)
    out = {"config": _config(args)}
    if args.metric in ("be", "both"):
        out["be"] = be_rate(e, decl, grid).to_dict()
    if args.metric in ("w1", "both"):
        out["w1"] = w1_rate(e, decl, grid).to_dict()
    _emit(args, json.dumps(out, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    e = Ensemble(args.n, args.k)
    decl = _decl(args) if args.regime else None
    if args.summary and decl is None:
        raise UsageError("--summary needs --regime")
    sc = constants_for(e, decl)
    batch = sample_xn(e, sc, args.samples, SeedSpec(args.seed, args.stream), _threads(args),
                      budget=args.budget)
    out = Path(args.out or f"xn_n{args.n}_k{args.k}_seed{args.seed}.csv")
    batch.write(out)
    meta = json.loads(out.with_suffix(".json").read_text())
    meta["config"] = {k: v for k, v in _config(args).items() if k != "threads"}
    out.with_suffix(".json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    if args.gnuplot:
        out.with_suffix(".gp").write_text(
            "set datafile separator ','\nset key autotitle columnhead\n"
            f"binwidth = 0.05\nbin(x) = binwidth * floor(x / binwidth)\n"
            f"plot '{out.name}' using (bin($2)):(1.0) smooth frequency with boxes\n"
        )
    if args.summary:
        rep = kolmogorov_distance(batch.values, _law_for(decl),
                                  metadata={"n": e.n, "k": e.k, "root_seed": args.seed,
                                            "stream": args.stream})
        text = json.dumps(rep.to_dict(), indent=2, sort_keys=True) + "\n"
        out.with_suffix(".summary.json").write_text(text)
        sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    kw = {}
    if args.suite in ("decoupling", "exact-k1", "edgeworth", "tailbounds",
                      "be-zero", "be-finite"):
        kw["threads"] = _threads(args)
    res = SUITES[args.suite](**kw)
    text = json.dumps({"config": _config(args), **res.to_dict()}, indent=2, sort_keys=True) + "\n"
    _emit(args, text)
    for c in res.checks:
        sys.stderr.write(c.line() + "\n")
    return EXIT_OK if res.passed else EXIT_ACCEPTANCE


def cmd_transition(args) -> int:
    grid = _grid_from(args)
    rows = []
    for al in args.alpha:
        side = args.side
        if side == "auto":
            side = "ToNormal" if al <= 0.01 else "ToGumbel"
        ref = LimitLaw.normal() if side == "ToNormal" else LimitLaw.gumbel()
        rate = transition_rate(al, side)
        stat, arg = sup_distance(LimitLaw.phi_alpha(al), ref, grid)
        rows.append((al, stat, arg, rate, stat / rate))
    _emit(args, _csv(("alpha", "sup_distance", "argmax", "rate", "ratio"), rows))
    _emit_meta(args)
    return EXIT_OK


def cmd_exact_cdf(args) -> int:
    e = Ensemble(args.n, 1)
    sc = constants_for(e)
    xs = np.atleast_1d(_x_values(args))
    vals, terms = exact_cdf_k1(e, sc, xs, return_terms=True)
    gum = LimitLaw.gumbel().cdf(xs)
    _emit(args, _csv(("x", "cdf", "gumbel"), zip(xs, vals, gum)))
    _emit_meta(args, {"terms_used": terms})
    _gnuplot(args, 1, 2, f"exact CDF, n={args.n}, k=1")
    return EXIT_OK


# -------------------------------------------------------------------- parser


def _add_grid(p, x_lo=-8.0, x_hi=14.0, step=0.01):
    p.add_argument("--x-min", type=float, default=x_lo)
    p.add_argument("--x-max", type=float, default=x_hi)
    p.add_argument("--step", type=float, default=step)


def _add_regime(p, required=True):
    p.add_argument("--regime", choices=("zero", "finite", "infinite"), required=required)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--eta", type=float)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ginibre-extremes", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    q = sub.add_parser("limit-cdf", help="CDF of a limit law on a grid")
    q.add_argument("--law", choices=("normal", "gumbel", "phi-alpha"), required=True)
    q.add_argument("--alpha", type=float)
    q.add_argument("--x", type=float, nargs="+")
    _add_grid(q)
    q.add_argument("--format", choices=("csv", "json"), default="csv")
    q.add_argument("--out")
    q.add_argument("--gnuplot", action="store_true")
    q.set_defaults(func=cmd_limit_cdf)

    q = sub.add_parser("rate", help="theoretical Berry-Esseen / W1 rate")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--k", type=int, required=True)
    _add_regime(q)
    q.add_argument("--metric", choices=("be", "w1", "both"), default="be")
    _add_grid(q)
    q.add_argument("--out")
    q.set_defaults(func=cmd_rate)

    q = sub.add_parser("simulate", help="sample X_n with the decoupled sampler")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--samples", type=int, required=True)
    q.add_argument("--seed", type=int, required=True)
    q.add_argument("--stream", type=int, default=0)
    q.add_argument("--budget", type=float, default=DEFAULT_DRAW_BUDGET)
    _add_regime(q, required=False)
    q.add_argument("--summary", action="store_true")
    q.add_argument("--out")
    q.add_argument("--gnuplot", action="store_true")
    q.set_defaults(func=cmd_simulate)

    q = sub.add_parser("verify", help="run an acceptance suite")
    q.add_argument("suite", choices=sorted(SUITES))
    q.add_argument("--out")
    q.set_defaults(func=cmd_verify)

    q = sub.add_parser("transition", help="Phi_alpha against its normal / Gumbel limits")
    q.add_argument("--alpha", type=float, nargs="+", required=True)
    q.add_argument("--side", choices=("auto", "ToNormal", "ToGumbel"), default="auto")
    _add_grid(q)
    q.add_argument("--out")
    q.set_defaults(func=cmd_transition)

    q = sub.add_parser("exact-cdf", help="exact CDF of X_n for k = 1")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--x", type=float, nargs="+")
    _add_grid(q)
    q.add_argument("--out")
    q.add_argument("--gnuplot", action="store_true")
    q.set_defaults(func=cmd_exact_cdf)
    for q in sub.choices.values():
        q.add_argument("--threads", type=int, default=None,
                       help="worker threads (default: logical cores; never changes results)")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (UsageError, DomainError, BudgetExceeded) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except NumericalFailure as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERICAL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
