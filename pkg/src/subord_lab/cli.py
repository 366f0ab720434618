"""
Command-line front end.

Exit codes: 0 success, 1 a mathematical check failed, 2 bad input or domain
error, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import math
import sys
from typing import Sequence

import numpy as np

from . import __version__
from .admissibility import MARGIN_TOL, GridSpec, certify
from .bounds import (
    TheoremId,
    alpha_parabola,
    convex_cubic,
    get_theorem,
    nunokawa_residual,
)
from .errors import DomainError, SubordLabError
from .reports import SCHEMA_VERSION
from .verification import (
    CATALOG,
    FAMILY_KINDS,
    TestFamily,
    VerificationConfig,
    generate_test_function,
    sample_family,
    summarize,
    sweep_theorem,
    verify_implication,
    write_csv,
    write_jsonl,
)

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_IO = 0, 1, 2, 3


class _InputError(Exception):
    pass


def parse_b_spec(text: str) -> list[float]:
    """``"0.3"`` -> ``[0.3]``; ``"start:stop:count"`` -> inclusive linspace."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return [float(parts[0])]
        if len(parts) == 3:
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
            if count < 1:
                raise ValueError
            return [float(x) for x in np.linspace(start, stop, count)]
    except ValueError:
        pass
    raise _InputError(f"bad b specification {text!r}; use a number or start:stop:count")


def _fmt(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, complex):
        return f"{x.real:.12g}{x.imag:+.12g}j"
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _theorem_arg(value: str):
    try:
        return get_theorem(value)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _single_b(args) -> float:
    values = parse_b_spec(args.b)
    if len(values) != 1:
        raise _InputError("this command takes a single --b value")
    return values[0]


def _grid_from(args) -> GridSpec:
    defaults = GridSpec()
    return GridSpec(
        rho_max=args.rho_max if args.rho_max is not None else defaults.rho_max,
        rho_count=args.rho_count if args.rho_count is not None else defaults.rho_count,
        sigma_depth_factor=args.sigma_depth if args.sigma_depth is not None else defaults.sigma_depth_factor,
        sigma_count=args.sigma_count if args.sigma_count is not None else defaults.sigma_count,
        theta_exclusion=args.theta_exclusion if args.theta_exclusion is not None else defaults.theta_exclusion,
        m_count=args.m_count if args.m_count is not None else defaults.m_count,
        theta_count=args.theta_count if args.theta_count is not None else defaults.theta_count,
    )


def _config_from(args) -> VerificationConfig:
    radii = tuple(float(r) for r in args.radii.split(",")) if args.radii else VerificationConfig.radii
    return VerificationConfig(
        tol=args.tol,
        radii=radii,
        angles=args.angles,
        order=args.order,
    )


@contextlib.contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
        return
    with open(path, "w", newline="") as fh:
        yield fh


def _emit_table(rows: list[dict], columns: Sequence[str], fmt: str, stream, header: dict | None = None):
    if fmt == "json":
        payload = {"schema": SCHEMA_VERSION}
        payload.update(header or {})
        payload["rows"] = rows
        stream.write(json.dumps(payload, sort_keys=True) + "\n")
    elif fmt == "csv":
        writer = csv.DictWriter(stream, fieldnames=list(columns), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    else:
        widths = {c: max(len(c), *(len(_fmt(r.get(c))) for r in rows)) if rows else len(c) for c in columns}
        stream.write("  ".join(c.rjust(widths[c]) for c in columns) + "\n")
        for r in rows:
            stream.write("  ".join(_fmt(r.get(c)).rjust(widths[c]) for c in columns) + "\n")


# -- verbs ------------------------------------------------------------------

def cmd_bounds(args) -> int:
    spec = args.theorem
    rows = []
    for b in parse_b_spec(args.b):
        alpha = spec.alpha(b)
        row = {"b": b, "alpha": alpha}
        if spec.id is TheoremId.NUNOKAWA_3_1:
            row["residual"] = nunokawa_residual(b, alpha)
        elif spec.id is TheoremId.CONVEX_3_3:
            row["residual"] = convex_cubic(b, alpha)
        rows.append(row)
    columns = ["b", "alpha"] + (["residual"] if spec.id in (TheoremId.NUNOKAWA_3_1, TheoremId.CONVEX_3_3) else [])
    with _output(args.out) as out:
        _emit_table(rows, columns, args.format, out, {"theorem": spec.id.value})
    return EXIT_OK


def cmd_admissibility(args) -> int:
    spec = args.theorem
    report = certify(spec, _single_b(args), _grid_from(args), args.tol)
    with _output(args.out) as out:
        if args.format == "pretty":
            out.write(f"theorem       {spec.id.value}\n")
            out.write(f"b             {_fmt(report.b)}\n")
            out.write(f"alpha         {_fmt(report.alpha)}\n")
            out.write(f"worst_margin  {_fmt(report.worst_margin)}\n")
            out.write(f"argmin        {', '.join(f'{k}={_fmt(v)}' for k, v in report.argmin.items())}\n")
            out.write(f"samples       {report.samples} (skipped {report.skipped})\n")
            out.write(f"passed        {report.passed}\n")
        else:
            out.write(json.dumps(report.to_dict(), sort_keys=True) + "\n")
    return EXIT_OK if report.passed else EXIT_FAILED


def _report_lines(report, out):
    for key in ("theorem", "b", "hypothesis_margin", "conclusion_margin", "strip_margin",
                "min_abs_f_over_z", "min_abs_fprime", "truncation_estimate", "verdict"):
        out.write(f"{key:20s}{_fmt(getattr(report, key))}\n")
    if report.note:
        out.write(f"{'note':20s}{report.note}\n")


def cmd_verify(args) -> int:
    spec = args.theorem
    b = _single_b(args)
    config = _config_from(args)
    if args.family == "catalog" and args.name:
        family = TestFamily("catalog", {"name": args.name})
    else:
        rng = np.random.default_rng(args.seed)
        family = sample_family(args.family, spec, b, rng, first=args.extremal)
    f = generate_test_function(spec, family, config.order)
    report = verify_implication(spec, f, config=config, family=family)
    with _output(args.out) as out:
        if args.format == "pretty":
            _report_lines(report, out)
        elif args.format == "csv":
            write_csv([report], out)
        else:
            out.write(json.dumps(report.to_dict(), sort_keys=True) + "\n")
    return EXIT_FAILED if report.verdict == "violation" else EXIT_OK


def cmd_sweep(args) -> int:
    spec = args.theorem
    config = _config_from(args)
    families = tuple(args.families.split(","))
    b_grid = parse_b_spec(args.b)
    reports = sweep_theorem(spec, b_grid, families, args.samples, args.seed, config)
    counts = summarize(reports)
    with _output(args.out) as out:
        if args.format == "csv":
            write_csv(reports, out)
        else:
            write_jsonl(reports, out)
    if args.csv:
        with _output(args.csv) as out:
            write_csv(reports, out)
    dest = sys.stderr if args.out in (None, "-") else sys.stdout
    dest.write(" ".join(f"{k}={v}" for k, v in counts.items()) + "\n")
    return EXIT_FAILED if counts["violation"] else EXIT_OK


def region_rows(spec, abs_b: float, count: int, eta_max: float) -> tuple[list[dict], list[str]]:
    if spec.id is TheoremId.PARABOLA_2_9:
        abs_b = spec.check_b(abs_b)
        vertex = abs_b / (2 * (1 + abs_b))
        eta = np.linspace(-eta_max, eta_max, count)
        xi = vertex - 2 * eta**2 / (1 + abs_b)
        return [{"xi": float(x), "eta": float(e)} for x, e in zip(xi, eta)], ["xi", "eta"]
    if spec.id is TheoremId.NUNOKAWA_3_1:
        alpha = spec.alpha(abs_b)
        t = 2 * math.pi * np.arange(count) / count
        w = alpha + alpha * np.exp(1j * t)
        return [{"re": float(v.real), "im": float(v.imag)} for v in w], ["re", "im"]
    raise _InputError(f"region is available for parabola2_9 and nunokawa3_1, not {spec.id.value}")


def cmd_region(args) -> int:
    spec = args.theorem
    rows, columns = region_rows(spec, _single_b(args), args.count, args.eta_max)
    header = {"theorem": spec.id.value, "b": _single_b(args)}
    if spec.id is TheoremId.PARABOLA_2_9:
        header["alpha"] = alpha_parabola(header["b"])
    fmt = "csv" if args.format == "pretty" else args.format
    with _output(args.out) as out:
        _emit_table(rows, columns, fmt, out, header)
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    theorem_names = ", ".join(t.value for t in TheoremId)
    parser = argparse.ArgumentParser(
        prog="subord-lab",
        description="Bounds, admissibility certificates and implication sweeps for "
                    "differential implications with a fixed second coefficient.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p, b_help="|b| value or start:stop:count grid"):
        p.add_argument("--theorem", required=True, type=_theorem_arg, help=theorem_names)
        p.add_argument("--b", required=True, help=b_help)
        p.add_argument("--format", choices=("pretty", "json", "csv"), default="pretty")
        p.add_argument("--out", default=None, help="output file (default stdout)")

    def verification_opts(p):
        p.add_argument("--radii", default=None, help="comma-separated radii (default 0.5,0.7,0.9,0.95)")
        p.add_argument("--angles", type=int, default=VerificationConfig.angles)
        p.add_argument("--order", type=int, default=VerificationConfig.order,
                       help="truncation order of the test functions")
        p.add_argument("--tol", type=float, default=VerificationConfig.tol)
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("bounds", help="tabulate alpha(|b|)")
    common(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("admissibility", help="certify the admissibility condition on a grid")
    common(p, "|b| value")
    p.add_argument("--tol", type=float, default=MARGIN_TOL)
    p.add_argument("--rho-max", type=float)
    p.add_argument("--rho-count", type=int)
    p.add_argument("--sigma-depth", type=float)
    p.add_argument("--sigma-count", type=int)
    p.add_argument("--theta-exclusion", type=float)
    p.add_argument("--m-count", type=int)
    p.add_argument("--theta-count", type=int)
    p.set_defaults(func=cmd_admissibility)

    p = sub.add_parser("verify", help="check the implication on one test function")
    common(p, "target |b| value")
    verification_opts(p)
    p.add_argument("--family", choices=FAMILY_KINDS, default="moebius_p")
    p.add_argument("--name", choices=sorted(CATALOG), help="catalog function (with --family catalog)")
    p.add_argument("--extremal", action="store_true", help="use the extremal family member")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="seeded batch of implication checks, written as JSON lines")
    common(p)
    verification_opts(p)
    p.add_argument("--families", default="moebius_p", help=f"comma-separated subset of {FAMILY_KINDS}")
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--csv", default=None, help="also write a CSV summary here")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("region", help="boundary curve of the parabola or disk as CSV")
    common(p, "|b| value")
    p.add_argument("--count", type=int, default=201)
    p.add_argument("--eta-max", type=float, default=2.0)
    p.set_defaults(func=cmd_region)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (_InputError, SubordLabError) as exc:
        tid = getattr(args, "theorem", None)
        if isinstance(exc, DomainError) and tid is not None:
            lo, hi = tid.b_range
            sys.stderr.write(f"error: {exc} ({tid.id.value} requires |b| in [{lo}, {hi}])\n")
        else:
            sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except OSError as exc:
        sys.stderr.write(f"I/O error: {exc}\n")
        return EXIT_IO


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
