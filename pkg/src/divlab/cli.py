"""Command-line front end."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import __version__
from .bestapprox import remez_discrete
from .corpus import FUNCTION_FAMILIES, PHI_FAMILIES, corpus_lookup, phi_lookup
from .divdiff import divided_difference, newton_hermite, oracle_leading_coeff
from .errors import ConfigError, DivlabError
from .functionals import lambda_pqr, lambda_r
from .knots import Interval, KnotSet
from .smoothness import modulus


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def _fmt(args, v) -> str:
    return ("%.17g" if args.full_precision else "%.6g") % float(v)


def _emit(args, *values):
    print(" ".join(_fmt(args, v) for v in values))


def _pair(text):
    try:
        p, q = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"pair must be 'p,q', got {text!r}") from None
    return p, q


def _interval(text):
    try:
        return Interval.parse(text)
    except DivlabError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def cmd_divdiff(args):
    X = KnotSet.parse(args.knots)
    f = corpus_lookup(args.fn)
    value = oracle_leading_coeff(X, f) if args.oracle else divided_difference(X, f)
    _emit(args, value)
    return 0


def cmd_hermite(args):
    X = KnotSet.parse(args.knots)
    P = newton_hermite(X, corpus_lookup(args.fn))
    if args.eval is None:
        _emit(args, *P.to_monomial().coeffs)
        return 0
    parts = args.eval.split(",")
    x = float(parts[0])
    j = int(parts[1]) if len(parts) > 1 else 0
    _emit(args, P.to_monomial().deriv(j)(x))
    return 0


def cmd_modulus(args):
    f = corpus_lookup(args.fn)
    est = modulus(f.view(args.deriv), args.k, args.t, args.interval,
                  grid_x=args.grid_x, grid_u=args.grid_u)
    _emit(args, est.value)
    return 0


def cmd_lambda(args):
    X = KnotSet.parse(args.knots)
    phi = phi_lookup(args.phi)
    if args.pair is not None:
        _emit(args, lambda_pqr(X, args.r, args.pair, phi))
    else:
        res = lambda_r(X, args.r, phi)
        _emit(args, res.value)
        if args.verbose:
            print(f"argmax_pair {res.argmax_pair.p},{res.argmax_pair.q}")
    return 0


def cmd_remez(args):
    f = corpus_lookup(args.fn)
    res = remez_discrete(f.view(args.deriv), args.degree, args.interval, grid=args.grid)
    _emit(args, res.error)
    print("coefficients " + " ".join(_fmt(args, c) for c in res.polynomial.coeffs))
    print("reference " + " ".join(_fmt(args, x) for x in res.equioscillation_points))
    if not res.converged:
        print("warning: iteration limit reached before levelling", file=sys.stderr)
    return 0


def cmd_corpus(args):
    print("functions:")
    for name, text in FUNCTION_FAMILIES.items():
        print(f"  {name:18s} {text}")
    print("moduli:")
    for name, text in PHI_FAMILIES.items():
        print(f"  {name:18s} {text}")
    return 0


def cmd_verify(args):
    from .verify import load_baselines, load_configs, run_suite, save_baselines
    configs = load_configs(args.config)
    if args.check != "all":
        configs = [c.replace(check=args.check) for c in configs]
    if args.seed is not None:
        configs = [c.replace(seed=args.seed) for c in configs]
    baselines = load_baselines(args.baselines)
    reports, passed = run_suite(configs, baselines, out_dir=args.out,
                                deterministic=args.deterministic)
    if args.update_baseline:
        path = save_baselines(reports, args.baselines)
        print(f"baselines written to {path}")
        reports, passed = run_suite(configs, load_baselines(args.baselines), out_dir=args.out,
                                    deterministic=args.deterministic)
    for rep in reports:
        status = "PASS" if rep.passed else "FAIL"
        limit = "-" if rep.limit is None else _fmt(args, rep.limit)
        print(f"{status} {rep.name} rows={len(rep.rows)} failures={len(rep.failures)} "
              f"max_ratio={_fmt(args, rep.max_ratio)} limit={limit}")
        for note in rep.notes:
            print(f"  note: {note}")
    return 0 if passed else 1


def cmd_report(args):
    src = Path(args.input)
    if not src.is_dir():
        raise ConfigError(f"report directory not found: {src}")
    if args.format == "json":
        docs = [json.loads(p.read_text()) for p in sorted(src.glob("*.json"))]
        print(json.dumps(docs, indent=2, sort_keys=True))
        return 0
    w = csv.writer(sys.stdout, lineterminator="\n")
    header_done = False
    for p in sorted(src.glob("*.csv")):
        with p.open() as fh:
            rows = list(csv.reader(fh))
        if not rows:
            continue
        if not header_done:
            w.writerow(["check"] + rows[0])
            header_done = True
        for row in rows[1:]:
            w.writerow([p.stem] + row)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="divlab", description="divided differences, moduli of smoothness, "
                 "and randomized checks of the related inequalities")
    ap.add_argument("--version", action="version", version=f"divlab {__version__}")
    ap.add_argument("--full-precision", action="store_true",
                    help="print 17 significant digits instead of 6")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--full-precision", action="store_true", default=argparse.SUPPRESS,
                        help="print 17 significant digits instead of 6")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("divdiff", parents=[common], help="generalized divided difference")
    p.add_argument("--knots", required=True)
    p.add_argument("--fn", required=True)
    p.add_argument("--oracle", action="store_true", help="use the confluent Vandermonde solve")
    p.set_defaults(run=cmd_divdiff)

    p = sub.add_parser("hermite", parents=[common], help="Hermite interpolant")
    p.add_argument("--knots", required=True)
    p.add_argument("--fn", required=True)
    p.add_argument("--eval", metavar="X[,J]")
    p.set_defaults(run=cmd_hermite)

    p = sub.add_parser("modulus", parents=[common], help="modulus of smoothness estimate")
    p.add_argument("--fn", required=True)
    p.add_argument("--deriv", type=int, default=0)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--interval", type=_interval, required=True)
    p.add_argument("--grid-x", type=int, default=2048)
    p.add_argument("--grid-u", type=int, default=512)
    p.set_defaults(run=cmd_modulus)

    p = sub.add_parser("lambda", parents=[common], help="Lambda functionals")
    p.add_argument("--knots", required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--phi", required=True)
    p.add_argument("--pair", "--pq", dest="pair", type=_pair)
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(run=cmd_lambda)

    p = sub.add_parser("remez", parents=[common], help="discrete minimax approximation")
    p.add_argument("--fn", required=True)
    p.add_argument("--deriv", type=int, default=0)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--interval", type=_interval, required=True)
    p.add_argument("--grid", type=int, default=4096)
    p.set_defaults(run=cmd_remez)

    p = sub.add_parser("corpus", parents=[common], help="corpus listing")
    p.add_argument("action", choices=["list"])
    p.set_defaults(run=cmd_corpus)

    p = sub.add_parser("verify", parents=[common], help="run verification checks")
    p.add_argument("check", choices=["all", "main", "lemma_k1", "lemma3", "lemma4",
                                     "section4", "interp"])
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.add_argument("--seed", type=int)
    p.add_argument("--deterministic", action="store_true")
    p.add_argument("--update-baseline", action="store_true")
    p.add_argument("--baselines", help="baseline file (default: packaged)")
    p.set_defaults(run=cmd_verify)

    p = sub.add_parser("report", parents=[common], help="combine written reports")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(run=cmd_report)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except DivlabError as exc:
        print(f"divlab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
