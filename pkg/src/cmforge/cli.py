"""Command line front end; the only module that performs I/O.

Exit codes: 0 success, 2 invalid parameters, 3 internal assertion failure,
4 cross-check disagreement, 5 class-polynomial infeasibility.  Diagnostics go
to stderr; stdout carries data only.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from . import crosscheck as crosscheck_mod
from .errors import (
    CMForgeError,
    InfeasibleError,
    InternalError,
    ParameterError,
    PrecisionError,
)
from .gzrhs import (
    DEFAULT_RAMIFIED_EXPONENT,
    RAMIFIED_OF_M,
    RAMIFIED_OF_MD,
    GZParams,
    enumerate_terms,
    gz_log_norm,
    norm_magnitude,
    term_contribution,
)
from .hauptmodul import PrecisionConfig, hauptmodul_value, load_qseries
from .hcp import class_polynomial, s_set
from .quadforms import heegner_point, heegner_reps

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INTERNAL = 3
EXIT_CROSSCHECK_FAILED = 4
EXIT_INFEASIBLE = 5

_INT_STRING_LIMIT = 2 ** 53


@dataclass
class RunConfig:
    precision: PrecisionConfig
    ramified_exponent: str = DEFAULT_RAMIFIED_EXPONENT
    base_discriminant: int | None = None
    output_format: str = "text"
    series_path: str | None = None

    def series(self):
        return load_qseries(self.series_path) if self.series_path else None


def _jsonable(obj):
    """Canonical JSON form: big integers as strings, rationals as 'num/den'."""
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, int):
        return obj if abs(obj) <= _INT_STRING_LIMIT else str(obj)
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, float):
        return obj
    if isinstance(obj, str):
        return obj
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return str(obj)


def canonical_json(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, separators=(",", ":"))


def _emit(report: dict, config: RunConfig, csv_rows=None, csv_header=None, text_lines=None):
    if config.output_format == "json":
        print(canonical_json(report))
    elif config.output_format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(csv_header or ["key", "value"])
        for row in csv_rows or _flat_rows(report["result"]):
            writer.writerow(row)
        sys.stdout.write(buf.getvalue())
    else:
        for line in text_lines or [canonical_json(report)]:
            print(line)


def _flat_rows(result, prefix=""):
    rows = []
    if isinstance(result, dict):
        for k, v in sorted(result.items(), key=lambda kv: str(kv[0])):
            rows.extend(_flat_rows(v, f"{prefix}{k}." if prefix else f"{k}."))
    elif isinstance(result, (list, tuple)):
        for i, v in enumerate(result):
            rows.extend(_flat_rows(v, f"{prefix}{i}."))
    else:
        rows.append([prefix.rstrip("."), result])
    return rows


def _parse_tau(text: str):
    """Parse 're+im i' decimal pairs like 0.0+1.0i or -0.5-2e-1i."""
    compact = text.replace(" ", "")
    match = re.fullmatch(
        r"([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
        r"([+-](?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)i",
        compact,
    )
    if not match:
        raise ParameterError(f"cannot parse tau {text!r}; expected re+im i")
    return match.group(1), match.group(2)


def _exponent_map(pls):
    return {str(q): e for q, e in pls.items()}


def _norm_payload(mag):
    payload = {
        "factors": {str(q): e for q, e in mag.factors},
        "integral": mag.is_integral,
    }
    payload["value"] = mag.as_integer() if mag.is_integral else float(mag)
    return payload


def cmd_gznorm(args, config: RunConfig) -> int:
    params = GZParams.create(p=args.p, d=args.d, D=args.D, mu=args.mu, beta=args.beta)
    pls = gz_log_norm(params, config.ramified_exponent)
    mag = norm_magnitude(params, config.ramified_exponent)
    result = {
        "exponents": _exponent_map(pls),
        "log_value": pls.log_value(),
        "norm": _norm_payload(mag),
        "ramified_exponent": config.ramified_exponent,
    }
    text = [
        f"p={params.p} d={params.d} D={params.D} beta={params.beta} mu={params.mu}",
        "exponents: " + (" ".join(f"{q}^{e}" for q, e in pls.items()) or "(empty)"),
        f"log value: {pls.log_value():.12g}",
        f"norm: {mag}",
    ]
    if args.breakdown:
        rows = []
        for term in enumerate_terms(params):
            contribution = term_contribution(term, params, config.ramified_exponent)
            rows.append(
                {
                    "sign": term.sign,
                    "y": term.y,
                    "n": term.n,
                    "t": term.t,
                    "m": term.m,
                    "contribution": _exponent_map(contribution),
                }
            )
            text.append(
                f"  sign={term.sign:+d} y={term.y} n={term.n} t={term.t} m={term.m} "
                f"-> {dict(contribution.items()) or {}}"
            )
        result["terms"] = rows
    report = _report("gznorm", vars_of(params), result)
    csv_rows = [
        [params.p, params.d, params.beta, params.D, params.mu, q,
         f"{e.numerator}/{e.denominator}"]
        for q, e in pls.items()
    ]
    _emit(report, config, csv_rows=csv_rows,
          csv_header=["p", "d", "beta", "D", "mu", "prime", "exponent"],
          text_lines=text)
    return EXIT_OK


def vars_of(params: GZParams) -> dict:
    return {"p": params.p, "d": params.d, "D": params.D,
            "beta": params.beta, "mu": params.mu}


def _report(command: str, params: dict, result: dict, warnings=()) -> dict:
    return {"command": command, "params": params, "result": result,
            "warnings": list(warnings)}


def cmd_crosscheck(args, config: RunConfig) -> int:
    series = config.series()
    if args.d is not None and args.D is not None:
        results = [crosscheck_mod.run_crosscheck(
            p=args.p, d=args.d, D=args.D, prec=config.precision, series=series)]
    elif args.d is None and args.D is None:
        pairs = crosscheck_mod.admissible_pairs(args.p, args.max_disc, args.count)
        with ThreadPoolExecutor(max_workers=min(8, os.cpu_count() or 1)) as pool:
            futures = [
                pool.submit(crosscheck_mod.run_crosscheck, args.p, d, D,
                            config.precision, series)
                for d, D in pairs
            ]
            results = [f.result() for f in futures]
        results.sort(key=lambda r: (r.d, r.D))
    else:
        raise ParameterError("supply both --d and --D, or neither for a batch run")

    rows = []
    text = []
    all_pass = True
    for res in results:
        default_pass = res.passed(config.ramified_exponent)
        all_pass = all_pass and default_pass
        entry = {
            "d": res.d, "D": res.D, "beta": res.beta, "mu": res.mu,
            "lhs": res.lhs, "lhs_error_estimate": res.lhs_error_estimate,
            "rhs": res.rhs, "relative_discrepancy": res.discrepancy,
            "variants_differ": res.variants_differ,
            "passes": res.passes,
            "status": "PASS" if default_pass else "FAIL",
        }
        rows.append(entry)
        text.append(
            f"p={args.p} d={res.d} D={res.D}: LHS={res.lhs:.10g} "
            f"RHS[{config.ramified_exponent}]={res.rhs[config.ramified_exponent]:.10g} "
            f"rel={res.discrepancy[config.ramified_exponent]:.3e} "
            f"{'PASS' if default_pass else 'FAIL'}"
        )
        if res.variants_differ:
            winner = [v for v, ok in res.passes.items() if ok]
            text.append(
                f"  ramified-exponent variants differ; passing variant: "
                f"{', '.join(winner) if winner else 'none'}"
            )
    report = _report("crosscheck",
                     {"p": args.p, "tolerance": crosscheck_mod.RELATIVE_TOLERANCE},
                     {"checks": rows, "all_pass": all_pass,
                      "variant": config.ramified_exponent})
    _emit(report, config, text_lines=text)
    return EXIT_OK if all_pass else EXIT_CROSSCHECK_FAILED


def cmd_classpoly(args, config: RunConfig) -> int:
    report_data = class_polynomial(
        p=args.p, d=args.d, base_disc=config.base_discriminant,
        strategy=args.strategy, prec=config.precision, series=config.series(),
        ramified_exponent=config.ramified_exponent,
    )
    poly = report_data.polynomial
    pair_rows = [
        {
            "D": pr.D,
            "x": pr.signed_x(),
            "y": pr.signed_y(),
            "x_mag": pr.x_mag,
            "y_mag": pr.y_mag,
        }
        for pr in report_data.pairs
    ]
    result = {
        "polynomial": str(poly),
        "coefficients": list(poly.coefficients),
        "degree": poly.degree,
        "s_set": report_data.s_set,
        "base_discriminant": report_data.base_disc,
        "beta": report_data.beta,
        "pairs": pair_rows,
    }
    text = [
        f"S({args.p}) = {{{', '.join(str(x) for x in report_data.s_set)}}}",
        f"base discriminant: {report_data.base_disc}",
        "pairs (D, X, Y): " + " ".join(f"({r['D']}, {r['x']}, {r['y']})" for r in pair_rows),
        str(poly),
    ]
    _emit(_report("classpoly", {"p": args.p, "d": args.d}, result), config,
          text_lines=text)
    return EXIT_OK


def cmd_heegner(args, config: RunConfig) -> int:
    forms = heegner_reps(-args.d, args.p, args.beta)
    rows = []
    text = []
    for f in forms:
        point = heegner_point(f)
        rows.append({"a": f.a, "b": f.b, "c": f.c, "tau": str(point)})
        text.append(f"({f.a}, {f.b}, {f.c})  tau = {point}")
    result = {"forms": rows, "count": len(rows)}
    _emit(_report("heegner", {"d": args.d, "p": args.p, "beta": args.beta}, result),
          config,
          csv_rows=[[f.a, f.b, f.c] for f in forms], csv_header=["a", "b", "c"],
          text_lines=text)
    return EXIT_OK


def cmd_sset(args, config: RunConfig) -> int:
    members = s_set(args.p)
    result = {"s_set": members, "size": len(members)}
    _emit(_report("sset", {"p": args.p}, result), config,
          csv_rows=[[m] for m in members], csv_header=["D"],
          text_lines=["{" + ", ".join(str(m) for m in members) + "}"])
    return EXIT_OK


def cmd_eval(args, config: RunConfig) -> int:
    re_part, im_part = _parse_tau(args.tau)
    prec = config.precision
    ctx = prec.context()
    tau = ctx.mpc(ctx.mpf(re_part), ctx.mpf(im_part))
    value = hauptmodul_value(args.p, tau, prec, series=config.series())
    digits = prec.decimal_digits
    result = {
        "re": mpmath.nstr(value.real, digits),
        "im": mpmath.nstr(value.imag, digits),
    }
    _emit(_report("eval", {"p": args.p, "tau": args.tau}, result), config,
          text_lines=[f"{result['re']} {result['im']}i"])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cmforge",
        description="Exact CM-value norms, numeric cross-checks, and class polynomials "
                    "for Fricke-group Hauptmoduls.",
    )
    parser.add_argument("--precision", type=int, default=None,
                        help="decimal digits for numeric work (default 80; "
                             "CMFORGE_PRECISION overrides)")
    parser.add_argument("--format", choices=("json", "csv", "text"), default="text",
                        dest="output_format")
    parser.add_argument("--ramified-exponent", choices=(RAMIFIED_OF_MD, RAMIFIED_OF_M),
                        default=DEFAULT_RAMIFIED_EXPONENT)
    parser.add_argument("--series", default=None, help="path to a q-expansion file")
    parser.add_argument("--base-discriminant", type=int, default=None)

    sub = parser.add_subparsers(dest="command", required=True)

    gz = sub.add_parser("gznorm", help="exact factored norm for one discriminant pair")
    gz.add_argument("--p", type=int, required=True)
    gz.add_argument("--d", type=int, required=True)
    gz.add_argument("--D", type=int, required=True)
    gz.add_argument("--beta", type=int, default=None)
    gz.add_argument("--mu", type=int, default=None)
    gz.add_argument("--breakdown", action="store_true", help="per-term table")
    gz.set_defaults(func=cmd_gznorm)

    cc = sub.add_parser("crosscheck", help="compare the exact norm against numerics")
    cc.add_argument("--p", type=int, required=True)
    cc.add_argument("--d", type=int, default=None)
    cc.add_argument("--D", type=int, default=None)
    cc.add_argument("--max-disc", type=int, default=500, help="batch-mode bound")
    cc.add_argument("--count", type=int, default=5, help="batch-mode pair count")
    cc.set_defaults(func=cmd_crosscheck)

    cp = sub.add_parser("classpoly", help="construct a class polynomial")
    cp.add_argument("--p", type=int, required=True)
    cp.add_argument("--d", type=int, required=True)
    cp.add_argument("--strategy", choices=("search", "numeric"), default="search")
    cp.set_defaults(func=cmd_classpoly)

    hg = sub.add_parser("heegner", help="representative forms and CM points")
    hg.add_argument("--d", type=int, required=True)
    hg.add_argument("--p", type=int, required=True)
    hg.add_argument("--beta", type=int, required=True)
    hg.set_defaults(func=cmd_heegner)

    ss = sub.add_parser("sset", help="usable degree-one discriminants for p")
    ss.add_argument("--p", type=int, required=True)
    ss.set_defaults(func=cmd_sset)

    ev = sub.add_parser("eval", help="evaluate the generator at a point")
    ev.add_argument("--p", type=int, required=True)
    ev.add_argument("--tau", type=str, required=True, help='complex point "re+im i"')
    ev.set_defaults(func=cmd_eval)

    return parser


def _default_digits() -> int:
    env = os.environ.get("CMFORGE_PRECISION")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ParameterError(f"CMFORGE_PRECISION={env!r} is not an integer") from None
    return 80


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors
        return int(exc.code or 0)
    try:
        digits = args.precision if args.precision is not None else _default_digits()
        config = RunConfig(
            precision=PrecisionConfig(decimal_digits=digits),
            ramified_exponent=args.ramified_exponent,
            base_discriminant=args.base_discriminant,
            output_format=args.output_format,
            series_path=args.series,
        )
        return args.func(args, config)
    except InfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (InternalError, AssertionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (ParameterError, PrecisionError, CMForgeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
