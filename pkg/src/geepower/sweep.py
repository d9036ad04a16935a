"""Batch what-if sweeps over a single scenario parameter."""

from __future__ import annotations

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .engine import model_covariance, power
from .exceptions import GeePowerError
from .model import Dist, Link, TrialSpec
from .report import round4
from .validation import validate

__all__ = ["SWEEP_PARAMS", "SweepSpec", "SweepRow", "run_sweep", "write_csv", "power_curve"]

SWEEP_PARAMS = (
    "delta", "alpha0", "r0", "alpha1", "alpha2", "alpha3",
    "cluster_multiplier", "cp_size_multiplier",
)
CSV_HEADER = ("param", "value", "stddel", "zpower", "tpower", "df", "totaln",
              "stddel_4dp", "zpower_4dp", "tpower_4dp", "error")


@dataclass(frozen=True)
class SweepSpec:
    spec: TrialSpec
    param: str
    values: tuple

    def __post_init__(self):
        if self.param not in SWEEP_PARAMS:
            raise ValueError(f"cannot sweep {self.param!r}; choose from {', '.join(SWEEP_PARAMS)}")
        if not self.values:
            raise ValueError("a sweep needs at least one value")
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))


@dataclass(frozen=True)
class SweepRow:
    param: str
    value: float
    stddel: float = None
    zpower: float = None
    tpower: float = None
    df: int = None
    totaln: int = None
    error: str = ""


def _multiplier(value: float) -> int:
    if value != int(value) or value < 1:
        raise ValueError(f"multiplier must be a positive integer, got {value:g}")
    return int(value)


def apply_value(spec: TrialSpec, param: str, value: float) -> TrialSpec:
    """Copy of ``spec`` with one swept parameter replaced."""
    if param == "delta":
        return spec.replace(delta=value)
    if param == "cluster_multiplier":
        return spec.replace(clusters_per_sequence=spec.clusters_per_sequence * _multiplier(value))
    if param == "cp_size_multiplier":
        return spec.replace(cp_sizes=spec.cp_sizes * _multiplier(value))
    corr = spec.correlation
    fields = {k: getattr(corr, k) for k in ("alpha0", "r0", "alpha1", "alpha2", "alpha3")}
    fields[param] = value
    return spec.replace(correlation=type(corr)(corr.kind, **fields))


def _delta_free(spec: TrialSpec) -> bool:
    # with a normal outcome and identity link neither D nor V involves theta
    return spec.outcome.dist is Dist.NORMAL and spec.outcome.link is Link.IDENTITY


def _evaluate(sweep: SweepSpec, value: float, shared_cov) -> SweepRow:
    try:
        spec = apply_value(sweep.spec, sweep.param, value)
    except ValueError as exc:
        return SweepRow(sweep.param, value, error=str(exc))
    report = validate(spec)
    if not report.ok:
        return SweepRow(sweep.param, value, error="; ".join(str(v) for v in report.violations))
    try:
        cov = shared_cov if shared_cov is not None else model_covariance(spec)
        stddel, zpower, tpower = power(spec.delta, float(cov[-1, -1]), spec.sig_level, spec.df)
    except GeePowerError as exc:
        return SweepRow(sweep.param, value, error=f"{type(exc).__name__}: {exc}")
    return SweepRow(sweep.param, value, float(stddel), float(zpower), float(tpower),
                    spec.df, spec.total_size)


def _workers(n: int) -> int:
    cap = os.environ.get("GEEPOWER_THREADS")
    limit = os.cpu_count() or 1
    if cap:
        try:
            limit = max(1, int(cap))
        except ValueError:
            pass
    return max(1, min(n, limit))


def run_sweep(sweep: SweepSpec, workers: int = None) -> list:
    """Evaluate every value; rows come back in input order.

    Each point is validated on its own, and points that fail carry the
    reason in ``error`` instead of being dropped.
    """
    shared = None
    if sweep.param == "delta" and _delta_free(sweep.spec):
        try:
            shared = model_covariance(sweep.spec)
        except GeePowerError:
            shared = None
    workers = _workers(len(sweep.values)) if workers is None else workers
    if workers <= 1:
        return [_evaluate(sweep, v, shared) for v in sweep.values]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda v: _evaluate(sweep, v, shared), sweep.values))


def _full(x) -> str:
    return "" if x is None else repr(float(x))


def write_csv(rows, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in rows:
            ok = r.stddel is not None
            writer.writerow([
                r.param, repr(r.value), _full(r.stddel), _full(r.zpower), _full(r.tpower),
                "" if r.df is None else r.df, "" if r.totaln is None else r.totaln,
                round4(r.stddel) if ok else "", round4(r.zpower) if ok else "",
                round4(r.tpower) if ok else "", r.error,
            ])


def power_curve(rows, width: int = 40) -> str:
    """Text bar chart of z and t power against the swept value."""
    lines = []
    for r in rows:
        label = f"{r.param}={r.value:g}"
        if r.stddel is None:
            lines.append(f"{label:>24}  invalid: {r.error}")
            continue
        bar = "#" * int(round(r.tpower * width))
        lines.append(f"{label:>24}  z {round4(r.zpower)}  t {round4(r.tpower)}  |{bar:<{width}}|")
    return "\n".join(lines) + "\n"
