"""Command-line front end: ``bsemicircular verify | counterexample | decompose``.

Exit codes: 0 pass, 1 identity failure, 2 configuration or parse error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import sys
from collections import defaultdict

import numpy as np

from . import counterexample as ce
from .balgebra import algebra_from_json, identity_map, scalar_algebra
from .chebyshev import cheb_decompose
from .errors import BSemicircularError, ConfigError, ParseError
from .ncpoly import poly_from_json, residual
from .verify import SUITES, all_passed, config_from_json, report_csv, report_json, run_suites

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3
_SUB = str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉")


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _load_json(path: str):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def cmd_verify(args) -> int:
    if args.config is None:
        obj = {}
    else:
        obj = _load_json(args.config)
    if args.seed is not None:
        if not isinstance(obj, dict):
            raise ConfigError("config must be a JSON object")
        obj = dict(obj, seed=args.seed)
    cfg = config_from_json(obj)
    if args.tol is not None:
        if not args.tol > 0:
            raise ConfigError("--tol must be positive")
        cfg.tolerances = {k: args.tol for k in cfg.tolerances}
    results = run_suites(cfg, args.suite, args.trials)
    text = report_json(cfg, results) if args.format == "json" else report_csv(results)
    _write(text, args.out)
    for r in results:
        if r.status == "fail":
            print(f"FAIL {r.suite}/{r.check}: value={r.value!r} tol={r.tolerance!r} "
                  f"seed={r.seed} trial={r.worst_trial}", file=sys.stderr)
    return EXIT_OK if all_passed(results) else EXIT_FAIL


def cmd_counterexample(args) -> int:
    if args.n_max < 1 or args.m < 1:
        raise ConfigError("--n-max and --m must be positive")
    if args.n_max > args.m:
        raise ConfigError(f"--n-max {args.n_max} exceeds truncation --m {args.m}")
    space = ce.build_ce_space(args.m)
    rows = ce.ce_table(space, args.n_max)
    slope = ce.growth_slope(rows)
    if args.format == "json":
        text = ce.table_json(rows, args.m, slope)
    else:
        text = ce.table_csv(rows)
    _write(text, args.out)
    if args.out not in (None, "-"):
        print(f"growth_exponent={slope!r}")
    return EXIT_OK


def _fmt_scalar(z: complex) -> str:
    z = complex(z)
    if abs(z.imag) < 1e-12:
        x = z.real
        return str(int(round(x))) if abs(x - round(x)) < 1e-12 else f"{x:.12g}"
    return f"({z.real:.12g}{z.imag:+.12g}j)"


def describe_expansion(expansion, d: int, scalar_b: bool) -> list[str]:
    """Human-readable listing; over ``C`` terms of one signature are merged into one multiplier."""
    def symbol(sig):
        _, _, degrees, letters = sig
        parts = [f"U{str(n).translate(_SUB)}" + ("" if d == 1 else f"(X{str(j).translate(_SUB)})")
                 for n, j in zip(degrees, letters)]
        return "·".join(parts)

    lines = []
    if scalar_b:
        weights: dict = defaultdict(complex)
        for prod in expansion.products:
            w = 1.0 + 0j
            for f in prod.factors:
                for b, c in f.pairs:
                    w *= complex(b[0, 0]) * complex(c[0, 0])
            weights[prod.signature] += w
        terms = []
        for sig in sorted(weights, key=lambda s: (-s[0], s[1], s[2], s[3])):
            w = weights[sig]
            if abs(w) < 1e-12:
                continue
            mult = "" if abs(w - 1) < 1e-12 else ("-" if abs(w + 1) < 1e-12 else _fmt_scalar(w))
            terms.append(f"{mult}{symbol(sig)}")
        s = complex(expansion.scalar[0, 0])
        if abs(s) >= 1e-12 or not terms:
            terms.append(_fmt_scalar(s))
        lines.append(" + ".join(terms).replace("+ -", "- "))
    else:
        nonzero = bool(np.any(np.abs(expansion.scalar) > 0))
        lines.append(f"scalar part: {'b' if nonzero else '0'}")
        for i, prod in enumerate(expansion.products):
            lines.append(f"[{i}] {symbol(prod.signature)}  signature={prod.signature}")
        if not expansion.products:
            lines.append("(no Chebyshev products)")
    return lines


def cmd_decompose(args) -> int:
    try:
        obj = _load_json(args.polyfile)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{args.polyfile}: {exc}") from exc
    if not isinstance(obj, dict) or "terms" not in obj:
        raise ParseError("polynomial file must be an object with a 'terms' list")
    if "algebra" in obj:
        alg, etas = algebra_from_json(obj["algebra"])
    else:
        alg, etas = scalar_algebra(), []
    p = poly_from_json(obj, alg)
    if not etas:
        etas = [identity_map(alg) for _ in range(p.d)]
    elif len(etas) < p.d:
        raise ConfigError(f"{len(etas)} covariance maps for a polynomial in {p.d} variables")
    expansion = cheb_decompose(p, etas)
    res = residual(expansion.poly(etas) - p)
    lines = describe_expansion(expansion, len(etas), alg.dim == 1)
    lines.append(f"residual: {res:.3g}")
    print("\n".join(lines))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bsemicircular", description="B-valued semicircular identity checks")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run randomized identity suites")
    v.add_argument("--config", help="JSON run configuration")
    v.add_argument("--suite", default="all", choices=("all",) + SUITES)
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--seed", type=int)
    v.add_argument("--tol", type=float)
    v.add_argument("--out")
    v.add_argument("--format", choices=("csv", "json"), default="csv")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("counterexample", help="tabulate the growth of the best Poincaré constant")
    c.add_argument("--n-max", type=int, default=50)
    c.add_argument("--m", type=int, default=50)
    c.add_argument("--out")
    c.add_argument("--format", choices=("csv", "json"), default="csv")
    c.set_defaults(func=cmd_counterexample)

    d = sub.add_parser("decompose", help="Chebyshev decomposition of a serialized polynomial")
    d.add_argument("polyfile")
    d.set_defaults(func=cmd_decompose)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (json.JSONDecodeError, BSemicircularError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
