"""Plain-text rendering of power results in the macro's tabular layout."""

from __future__ import annotations

from decimal import ROUND_HALF_UP, Decimal

import numpy as np

from .engine import PowerResult
from .model import CorrType, EffectType, TrialSpec

STRUCTURE_NAMES = {
    CorrType.NE: "nested exchangeable",
    CorrType.ED: "exponential decay",
    CorrType.BE: "block exchangeable",
    CorrType.PD: "proportional decay",
}
EFFECT_NAMES = {
    EffectType.AVE: "average intervention effects",
    EffectType.INC: "incremental intervention effects",
    EffectType.INC_EX: "extended incremental intervention effects",
}
COLUMNS = ("T", "S", "clusters", "df", "theta", "totaln", "Dist", "Link",
           "stddel", "zpower", "tpower")
WIDTHS = (4, 4, 10, 6, 10, 9, 9, 10, 8, 8, 8)


def round4(x: float) -> str:
    """Four decimals, ties rounded away from zero."""
    return str(Decimal(repr(float(x))).quantize(Decimal("0.0001"), rounding=ROUND_HALF_UP))


def _num(x: float) -> str:
    return format(float(x), "g")


def header(spec: TrialSpec) -> str:
    corr = spec.correlation
    names = ",".join(corr.param_names)
    values = ", ".join("NA" if v is None else _num(v) for v in corr.values())
    return (
        f"The fast GEE power of {spec.outcome.dist.value.lower()} outcomes with "
        f"{STRUCTURE_NAMES[corr.kind]} correlation structure and ({names}):({values}) "
        f"under {EFFECT_NAMES[spec.intervention_effect_type]} model and "
        f"delta = {_num(spec.delta)}"
    )


def _line(cells) -> str:
    return "".join(str(c).ljust(w) for c, w in zip(cells, WIDTHS)).rstrip()


def render(spec: TrialSpec, result: PowerResult) -> str:
    """Header line plus the 11-column table; theta runs down its column."""
    theta = [_num(v) for v in result.theta]
    first = (
        spec.n_periods, spec.n_sequences, spec.n_clusters, result.df, theta[0],
        result.totaln, spec.outcome.dist.value, spec.outcome.link.value,
        round4(result.stddel), round4(result.zpower), round4(result.tpower),
    )
    lines = [header(spec), "", _line(COLUMNS), _line(first)]
    blank = [""] * len(COLUMNS)
    for value in theta[1:]:
        cells = list(blank)
        cells[4] = value
        lines.append(_line(cells))
    return "\n".join(lines) + "\n"


def render_matrix(mat, fmt: str = "{: .10e}") -> str:
    mat = np.atleast_2d(mat)
    return "\n".join("  ".join(fmt.format(v) for v in row) for row in mat)
