"""Command-line front end.

Subcommands
===========
analyze  CONFIG           classify identifiability, emit the report
tau      --a ... --b ...  root analysis of tau, optional table/figure export
verify   CONFIG --candidate ...   oracle check of one candidate

Exit codes: 0 for any completed analysis, 2 for validation/usage errors,
3 for internal numeric failures (for example root isolation giving up).
"""

from __future__ import annotations

import argparse
import secrets
import sys
from pathlib import Path

import numpy as np

from .config import load_config
from .errors import (
    DegenerateTau,
    NotSamplable,
    RootIsolationFailure,
    UlrIdentError,
    ValidationError,
)
from .ica import ica_verdict
from .iid import tau_roots, tau_table
from .oracle import OracleConfig, verify_candidate, verify_joint
from .report import build_report, render_text, tau_report, to_json
from .verdict import analyze

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3


def _parse_vector(text: str, flag: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip() != "")
    except ValueError as exc:
        raise ValidationError(f"cannot parse {flag} as comma-separated reals") from exc


def _resolve_seed(seed: int | None) -> tuple[int, bool]:
    if seed is not None:
        return seed, False
    return secrets.randbits(32), True


def _emit(doc: dict, fmt: str, out: str | None) -> None:
    text = to_json(doc) if fmt == "structured" else render_text(doc)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _cmd_analyze(args: argparse.Namespace) -> int:
    parsed = load_config(args.config)
    seed, generated = _resolve_seed(args.seed)
    if parsed.mixing is not None:
        verdict = ica_verdict(parsed.mixing)
        doc = build_report(
            None, None, seed, generated, mixing=parsed.mixing, ica=verdict
        )
        _emit(doc, args.format, args.out)
        return EXIT_OK
    oracle = OracleConfig(
        n=args.oracle_n, permutations=args.permutations, seed=seed
    )
    verdict = analyze(parsed.problem, oracle)
    doc = build_report(parsed.problem, verdict, seed, generated)
    if args.plot_dir and verdict.fourth_moment is not None:
        from .plots import render_weight_circle

        plot_dir = Path(args.plot_dir)
        plot_dir.mkdir(parents=True, exist_ok=True)
        target = render_weight_circle(
            verdict.fourth_moment.m1,
            verdict.fourth_moment.m2,
            plot_dir / "fourth_moment_weights.png",
        )
        doc["figures"] = [str(target)]
    _emit(doc, args.format, args.out)
    return EXIT_OK


def _cmd_tau(args: argparse.Namespace) -> int:
    a = _parse_vector(args.a, "--a")
    b = _parse_vector(args.b, "--b")
    if not a or not b:
        raise ValidationError("--a and --b must be non-empty")
    try:
        analysis = tau_roots(a, b)
    except DegenerateTau as exc:
        analysis = exc.analysis
    doc = tau_report(analysis, a, b)
    if args.table:
        xs, values = tau_table(a, b)
        header = (
            "# a=" + ",".join(f"{v:.17g}" for v in a)
            + " b=" + ",".join(f"{v:.17g}" for v in b)
        )
        rows = "\n".join(f"{x:.17g}\t{t:.17g}" for x, t in zip(xs, values))
        Path(args.table).write_text(header + "\n" + rows + "\n", encoding="utf-8")
    if args.plot:
        from .plots import render_tau_curve

        render_tau_curve(a, b, analysis, args.plot)
    _emit(doc, args.format, args.out)
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    parsed = load_config(args.config)
    seed, generated = _resolve_seed(args.seed)
    values = _parse_vector(args.candidate, "--candidate")
    config = OracleConfig(
        n=args.n,
        permutations=args.permutations,
        seed=seed,
        statistic=args.statistic,
    )
    if parsed.mixing is not None:
        b0 = parsed.mixing.matrix()
        if len(values) != b0.size:
            raise ValidationError(
                f"--candidate needs {b0.size} row-major entries for this matrix"
            )
        candidate = np.asarray(values).reshape(b0.shape)
        record = verify_joint(parsed.mixing, candidate, config)
        doc = build_report(
            None, None, seed, generated, mixing=parsed.mixing,
            oracle_records=[record],
        )
    else:
        record = verify_candidate(parsed.problem, values, config)
        doc = build_report(
            parsed.problem, None, seed, generated, oracle_records=[record]
        )
    _emit(doc, args.format, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ulrident",
        description=(
            "Decide whether the coefficient vector of an unlinked linear "
            "regression problem is identifiable from the marginal laws."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_an = sub.add_parser("analyze", help="classify identifiability of a config")
    p_an.add_argument("config", help="path to a JSON problem configuration")
    p_an.add_argument("--oracle-n", type=int, default=100_000, dest="oracle_n")
    p_an.add_argument("--permutations", type=int, default=200)
    p_an.add_argument("--seed", type=int, default=None)
    p_an.add_argument("--format", choices=("text", "structured"), default="text")
    p_an.add_argument("--out", default=None, help="write the report to a file")
    p_an.add_argument(
        "--plot-dir", default=None, help="render report figures into this directory"
    )
    p_an.set_defaults(func=_cmd_analyze)

    p_tau = sub.add_parser("tau", help="root analysis of the tau function")
    p_tau.add_argument("--a", required=True, help="comma-separated coefficients")
    p_tau.add_argument("--b", required=True, help="comma-separated coefficients")
    p_tau.add_argument("--table", default=None, help="write x<TAB>tau rows here")
    p_tau.add_argument("--plot", default=None, help="render the tau curve to a PNG")
    p_tau.add_argument("--format", choices=("text", "structured"), default="text")
    p_tau.add_argument("--out", default=None)
    p_tau.set_defaults(func=_cmd_tau)

    p_ver = sub.add_parser("verify", help="oracle check of a candidate vector")
    p_ver.add_argument("config")
    p_ver.add_argument(
        "--candidate",
        required=True,
        help="comma-separated candidate (row-major for mixing matrices)",
    )
    p_ver.add_argument("--n", type=int, default=100_000)
    p_ver.add_argument("--permutations", type=int, default=200)
    p_ver.add_argument("--seed", type=int, default=None)
    p_ver.add_argument("--statistic", choices=("energy", "ecf"), default="energy")
    p_ver.add_argument("--format", choices=("text", "structured"), default="text")
    p_ver.add_argument("--out", default=None)
    p_ver.set_defaults(func=_cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, NotSamplable) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except RootIsolationFailure as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except UlrIdentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
