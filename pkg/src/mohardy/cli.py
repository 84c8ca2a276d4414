"""Command line entry point.

Exit codes: 0 success, 1 usage or input error, 2 failed inequality ceiling,
unstable ratios or (in strict mode) failed hypotheses.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import atoms, walsh
from .fileio import read_function, spectrum_to_json
from .grid import GridError, martingale_of
from .harness.campaigns import CAMPAIGNS, ExperimentConfig, verify, write_report
from .harness.experiments import fejer_convergence, five_space_campaign
from .musielak import MusielakError, luxemburg_norm
from .phispec import GRAMMAR, SpecError, parse

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit with status 2
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mohardy", description="Musielak-Orlicz martingale Hardy spaces on the dyadic grid.")
    p.add_argument("--json", action="store_true", help="machine-readable output and errors")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    n = sub.add_parser("norm", help="Luxemburg norm of a sampled function")
    n.add_argument("--phi", required=True)
    n.add_argument("--input", required=True)

    d = sub.add_parser("decompose", help="atomic decomposition of the martingale of a sampled function")
    d.add_argument("--kind", required=True, choices=["s", "S", "M", "P", "Q"])
    d.add_argument("--phi", required=True)
    d.add_argument("--input", required=True)
    d.add_argument("--out", required=True)
    d.add_argument("--r", type=float, default=1.0)
    d.add_argument("--t-star", type=float, default=1.0)

    w = sub.add_parser("walsh", help="Walsh-Fourier coefficients, partial sums and Fejer means")
    w.add_argument("action", choices=["coeffs", "partial-sum", "fejer", "maximal"])
    w.add_argument("--n", type=int, default=None)
    w.add_argument("--input", required=True)

    v = sub.add_parser("verify", help="Monte Carlo check of an inequality")
    v.add_argument("name", choices=sorted(CAMPAIGNS))
    v.add_argument("--phi", required=True)
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--resolutions", default="6,8,10")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out", default=None)
    v.add_argument("--r", type=float, default=None)
    v.add_argument("--law", default="mixed")
    v.add_argument("--stability", type=float, default=4.0, help="max allowed ratio drift across resolutions")
    v.add_argument("--ceiling", type=float, default=None)
    v.add_argument("--exploratory", action="store_true", help="annotate failed hypotheses instead of rejecting")

    r = sub.add_parser("report", help="five-space comparison or Fejer convergence table")
    r.add_argument("which", choices=["five-space", "fejer"])
    r.add_argument("--phi", default="power:p=2")
    r.add_argument("--resolutions", default="6,8,10")
    r.add_argument("--trials", type=int, default=100)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--input", default=None)
    r.add_argument("--schedule", default=None, help="comma-separated orders; default doubling")
    return p


def _ints(text: str, what: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise UsageError(f"{what} must be comma-separated integers, got {text!r}") from None
    if not vals:
        raise UsageError(f"{what} is empty")
    return vals


def _emit_values(values, as_json: bool, key: str = "values") -> None:
    vals = [float(x) for x in np.asarray(values).ravel()]
    if as_json:
        print(json.dumps({key: vals}))
    else:
        print("\n".join(repr(x) for x in vals))


def _cmd_norm(args) -> int:
    phi = parse(args.phi)
    f = read_function(args.input)
    value = float(luxemburg_norm(phi, f.values))
    print(json.dumps({"phi": args.phi, "norm": value}) if args.json else repr(value))
    return EXIT_OK


def _cmd_decompose(args) -> int:
    phi = parse(args.phi)
    f = read_function(args.input)
    dec = atoms.decompose(martingale_of(f.values), phi, args.kind, args.r, args.t_star)
    Path(args.out).write_text(atoms.dumps(dec) + "\n")
    summary = {"kind": args.kind, "atoms": len(dec.triples), "atomic_norm": atoms.atomic_norm(dec), "out": args.out}
    print(json.dumps(summary) if args.json else
          f"{summary['atoms']} atoms, atomic norm {summary['atomic_norm']!r}, written to {args.out}")
    return EXIT_OK


def _cmd_walsh(args) -> int:
    f = read_function(args.input).values
    if args.action == "coeffs":
        c = walsh.analyze(f)
        print(json.dumps(spectrum_to_json(c)) if args.json else "\n".join(repr(float(x)) for x in c))
        return EXIT_OK
    if args.action == "maximal":
        _emit_values(walsh.maximal_fejer(f), args.json)
        return EXIT_OK
    if args.n is None:
        raise UsageError(f"walsh {args.action} needs --n")
    if args.action == "partial-sum":
        _emit_values(walsh.partial_sum(f, args.n), args.json)
    else:
        _emit_values(walsh.fejer_mean(f, args.n), args.json)
    return EXIT_OK


def _cmd_verify(args) -> int:
    try:
        config = ExperimentConfig(args.name, args.phi, _ints(args.resolutions, "--resolutions"), args.trials,
                                  args.seed, args.r, out=args.out, law=args.law, strict=not args.exploratory,
                                  stability_limit=args.stability, ceiling=args.ceiling)
    except ValueError as exc:
        if isinstance(exc, SpecError):
            raise
        raise UsageError(str(exc)) from None
    report = verify(config)
    if args.out:
        write_report(report, args.out)
    if args.json:
        sys.stdout.write(report.json_text())
    elif report.rejected:
        print(f"REJECTED {report.inequality} for {report.phi_spec}: hypotheses fail in strict mode")
        print(json.dumps(report.hypothesis.to_json(), indent=2))
    else:
        sys.stdout.write(report.csv_text())
        print(f"stability {report.stability_ratio!r} (limit {report.stability_limit!r}); "
              f"{'PASS' if report.passed else 'FAIL'}")
    return EXIT_OK if report.passed else EXIT_FAIL


def _cmd_report(args) -> int:
    if args.which == "five-space":
        camp = five_space_campaign(args.phi, _ints(args.resolutions, "--resolutions"), args.trials, args.seed)
        if args.json:
            print(json.dumps(camp.to_json(), indent=2, sort_keys=True))
        else:
            print("resolution,pair,min_ratio,max_ratio")
            for N, pairs in camp.brackets.items():
                for k, (lo, hi) in pairs.items():
                    print(f"{N},{k},{lo!r},{hi!r}")
            print(f"worst drift across resolutions {camp.worst_drift!r}")
        return EXIT_OK
    phi = parse(args.phi)
    if args.input:
        f = read_function(args.input).values
    else:
        N = _ints(args.resolutions, "--resolutions")[0]
        f = np.random.default_rng(args.seed).standard_normal(1 << N)
    schedule = None if args.schedule is None else _ints(args.schedule, "--schedule")
    table = fejer_convergence(f, phi, schedule)
    if args.json:
        print(json.dumps({"orders": list(table.orders), "sigma_errors": list(table.sigma_errors),
                          "partial_errors": list(table.partial_errors), "limit_sigma_error": table.limit_sigma_error}))
    else:
        print("order,sigma_error,partial_sum_error")
        for n, se, pe in table.rows():
            print(f"{n},{se!r},{pe!r}")
        print(f"limit,{table.limit_sigma_error!r},")
    return EXIT_OK


COMMANDS = {"norm": _cmd_norm, "decompose": _cmd_decompose, "walsh": _cmd_walsh, "verify": _cmd_verify,
            "report": _cmd_report}


def _fail(code: int, kind: str, message: str, as_json: bool, show_grammar: bool = False) -> int:
    if as_json:
        print(json.dumps({"error": kind, "message": message, "exit_code": code}))
    else:
        print(f"error: {message}", file=sys.stderr)
        if show_grammar:
            print(GRAMMAR, file=sys.stderr)
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    # --json is accepted anywhere on the line
    as_json = "--json" in argv
    argv = [a for a in argv if a != "--json"]
    try:
        args = build_parser().parse_args(argv)
        args.json = as_json
        return COMMANDS[args.command](args)
    except UsageError as exc:
        return _fail(EXIT_USAGE, "usage", str(exc), as_json, show_grammar=True)
    except SpecError as exc:
        return _fail(EXIT_USAGE, "phi-spec", str(exc), as_json, show_grammar=True)
    except (OSError, GridError, MusielakError, atoms.AtomError, ValueError) as exc:
        return _fail(EXIT_USAGE, "input", str(exc), as_json)


if __name__ == "__main__":
    sys.exit(main())
