"""Command-line front end: ``geepower run | sweep | explain``.

Exit codes are 0 on success, 2 when the scenario is rejected (bad keys,
unparsable values, validation failures) and 1 for I/O or numeric failures.
"""

from __future__ import annotations

import argparse
import sys

from .correlation import build_R
from .design import build_design
from .engine import fast_gee_power, model_covariance
from .exceptions import ConfigError, GeePowerError, ParseError, ValidationError
from .model import DfChoice
from .report import render, render_matrix, round4
from .scenario import load_spec
from .sweep import SWEEP_PARAMS, SweepSpec, power_curve, run_sweep, write_csv
from .validation import validate

EXIT_OK, EXIT_RUNTIME, EXIT_INVALID = 0, 1, 2


def _load(args):
    spec = load_spec(args.file, as_json=True if args.json else None)
    if getattr(args, "df", None):
        spec = spec.replace(df_choice=DfChoice.parse(args.df))
    return spec


def _invalid(report) -> int:
    print("scenario failed validation:", file=sys.stderr)
    print(str(report), file=sys.stderr)
    return EXIT_INVALID


def cmd_run(args) -> int:
    spec = _load(args)
    try:
        result = fast_gee_power(spec)
    except ValidationError as exc:
        return _invalid(exc.report)
    sys.stdout.write(render(spec, result))
    return EXIT_OK


def cmd_sweep(args) -> int:
    spec = _load(args)
    try:
        values = [float(v) for v in args.values.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"--values must be comma-separated numbers, got {args.values!r}") from None
    try:
        sweep = SweepSpec(spec, args.param, tuple(values))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    rows = run_sweep(sweep)
    write_csv(rows, args.out)
    ok = sum(r.error == "" for r in rows)
    print(f"wrote {len(rows)} rows ({ok} valid) to {args.out}")
    if args.summary:
        sys.stdout.write(power_curve(rows))
    return EXIT_OK


def _span(v) -> str:
    return "-" if v is None else str(v)


def cmd_explain(args) -> int:
    spec = _load(args)
    report = validate(spec)
    if not report.ok:
        return _invalid(report)
    out = [f"p = {spec.n_params}  (theta = {', '.join(format(v, 'g') for v in spec.theta)})",
           f"sequences = {spec.n_sequences}  periods = {spec.n_periods}  "
           f"clusters = {spec.n_clusters}  totaln = {spec.total_size}", ""]
    for design, m in zip(build_design(spec), spec.clusters_per_sequence):
        prof = design.profile
        R = build_R(spec.correlation, prof, design.sizes)
        out.append(
            f"sequence {prof.seq_index}: (b0,b1,q0,q1) = ({_span(prof.b0)},{_span(prof.b1)},"
            f"{_span(prof.q0)},{_span(prof.q1)})  c = {prof.c}  clusters = {int(m)}"
        )
        out.append(f"  periods   {list(prof.observed_periods)}")
        out.append(f"  sizes     {list(prof.sizes)}")
        out.append(f"  exposures {[float(round4(u)) for u in design.exposures]}")
        out.append(f"  per-cluster n = {R.n}  (R is {R.n}x{R.n}, X is {R.n}x{design.p})")
    cov = model_covariance(spec)
    out += ["", f"model-based covariance ({spec.n_params}x{spec.n_params}):", render_matrix(cov),
            "", f"var(delta) = {float(cov[-1, -1])!r}"]
    print("\n".join(out))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geepower",
        description="Analytical GEE power for multi-period cluster randomized trials.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("file", help="scenario file (key = value text, or JSON)")
        p.add_argument("--json", action="store_true", help="read the scenario as JSON")

    p_run = sub.add_parser("run", help="compute power for one scenario")
    common(p_run)
    p_run.add_argument("--df", choices=("1", "2"), help="1: df = I - p, 2: df = I - 2")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="tabulate power over one parameter")
    common(p_sweep)
    p_sweep.add_argument("--param", required=True, choices=SWEEP_PARAMS)
    p_sweep.add_argument("--values", required=True, help="comma-separated values")
    p_sweep.add_argument("--out", required=True, help="CSV output path")
    p_sweep.add_argument("--df", choices=("1", "2"))
    p_sweep.add_argument("--summary", action="store_true", help="print a text power curve")
    p_sweep.set_defaults(func=cmd_sweep)

    p_explain = sub.add_parser("explain", help="dump parsed design and covariance")
    common(p_explain)
    p_explain.set_defaults(func=cmd_explain)
    return parser


def _glue_values(argv):
    # "--values -0.2,-0.3" would otherwise be read as an unknown option
    out = list(argv)
    for i, a in enumerate(out[:-1]):
        if a == "--values" and out[i + 1].startswith("-"):
            out[i:i + 2] = [f"--values={out[i + 1]}"]
            break
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    args = build_parser().parse_args(_glue_values(argv))
    try:
        return args.func(args)
    except (ConfigError, ParseError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValidationError as exc:
        return _invalid(exc.report)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except GeePowerError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
