"""Consistency checks run before any power computation.

:func:`validate` collects every problem in one pass instead of stopping at
the first.  Codes:

V1   no-data cells (2) and zero cluster-period sizes do not coincide
V2   number of period effects does not match the period model
V3   a marginal mean leaves the admissible range of its distribution
V4   a binary correlation lies outside its Frechet bounds
V5   correlation parameters missing or out of range
V6   a calendar period has no data anywhere (CAT effects unidentifiable)
V7   incremental models need monotone rows and max_intervention_period >= 1
V8   extended incremental model without a maintenance period in a sequence
V9   cohort structures need one constant cluster-period size per row
V10  binary outcomes need phi = 1
V11  no observed control or no observed intervention cluster-period
V12  fewer than one degree of freedom for the t test
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .correlation import correlation_entry
from .design import exposure, parse_sequence
from .exceptions import NonMonotoneSequenceError
from .model import (
    CONTROL,
    INTERVENTION,
    NO_DATA,
    CorrType,
    Dist,
    EffectType,
    PeriodType,
    TrialSpec,
    frechet_bounds,
    mean_and_derivative,
)

__all__ = ["Violation", "ValidationReport", "validate"]


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    indices: tuple = ()

    def __str__(self):
        return f"{self.code}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def codes(self) -> list:
        return [v.code for v in self.violations]

    def __contains__(self, code) -> bool:
        return code in self.codes

    def __str__(self):
        if self.ok:
            return "no violations"
        return "\n".join(str(v) for v in self.violations)


def _cells(mask) -> tuple:
    return tuple((int(s) + 1, int(j) + 1) for s, j in zip(*np.nonzero(mask)))


def _fmt_cells(cells, limit=6) -> str:
    shown = ", ".join(f"({s},{j})" for s, j in cells[:limit])
    return shown + (", ..." if len(cells) > limit else "")


def _check_sizes(spec, out):
    dp, sizes = spec.design_pattern, spec.cp_sizes
    bad = (dp == NO_DATA) != (sizes == 0)
    if bad.any():
        cells = _cells(bad)
        out.append(Violation(
            "V1",
            "cp_sizes must be 0 exactly where the design pattern is 2; "
            f"mismatch at (sequence, period) {_fmt_cells(cells)}",
            cells,
        ))
    observed = (dp != NO_DATA) & (sizes > 0)
    for state, label in ((CONTROL, "control"), (INTERVENTION, "intervention")):
        if not (observed & (dp == state)).any():
            out.append(Violation(
                "V11", f"design has no observed {label} cluster-period; delta is not identifiable"
            ))


def _check_beta(spec, out) -> bool:
    want = spec.n_periods if spec.period_effect_type is PeriodType.CAT else 2
    got = len(spec.beta_period_effects)
    if got != want:
        out.append(Violation(
            "V2",
            f"{spec.period_effect_type.value} period effects need {want} values in "
            f"beta_period_effects, got {got}",
        ))
        return False
    return True


def _check_corr_params(spec, out) -> bool:
    corr = spec.correlation
    ok = True
    for name in corr.param_names:
        value = getattr(corr, name)
        if value is None or not math.isfinite(value):
            out.append(Violation("V5", f"{corr.kind.value} correlation requires {name}", (name,)))
            ok = False
            continue
        if name == "r0":
            if corr.kind is CorrType.PD:
                good, rng = 0.0 < value < 1.0, "(0, 1)"
            else:
                good, rng = 0.0 <= value <= 1.0, "[0, 1]"
        else:
            good, rng = 0.0 <= value < 1.0, "[0, 1)"
        if not good:
            out.append(Violation(
                "V5", f"{name} = {value:g} is outside {rng} for {corr.kind.value}", (name,)
            ))
            ok = False
    return ok


def _check_periods(spec, out):
    if spec.period_effect_type is not PeriodType.CAT:
        return
    observed = (spec.design_pattern != NO_DATA) & (spec.cp_sizes > 0)
    empty = np.flatnonzero(~observed.any(axis=0))
    if empty.size:
        periods = tuple(int(j) + 1 for j in empty)
        out.append(Violation(
            "V6",
            f"no sequence collects data in period(s) {list(periods)}; "
            "categorical period effects cannot be estimated",
            periods,
        ))


def _profiles(spec, out):
    """Parse every row; returns None when exposures cannot be computed."""
    effect = spec.intervention_effect_type
    incremental = effect is not EffectType.AVE
    ok = True
    if incremental:
        q = spec.max_intervention_period
        if q is None or q < 1:
            out.append(Violation(
                "V7", f"{effect.value} requires max_intervention_period >= 1, got {q}"
            ))
            ok = False
    profiles = []
    for s in range(spec.n_sequences):
        try:
            profiles.append(parse_sequence(spec.design_pattern[s], spec.cp_sizes[s],
                                           effect, seq_index=s + 1))
        except NonMonotoneSequenceError:
            out.append(Violation(
                "V7",
                f"sequence {s + 1} is not monotone (intervention before control), "
                f"not allowed under {effect.value}",
                (s + 1,),
            ))
            ok = False
    return profiles if ok else None


def _check_maintenance(spec, profiles, out):
    if spec.intervention_effect_type is not EffectType.INC_EX or profiles is None:
        return
    q = spec.max_intervention_period
    for prof in profiles:
        if prof.q0 is None:
            continue
        if prof.q1 - prof.q0 + 1 <= q:
            out.append(Violation(
                "V8",
                f"sequence {prof.seq_index} has no maintenance period "
                f"(intervention periods {prof.q0}..{prof.q1}, active phase {q})",
                (prof.seq_index,),
            ))


def _check_cohort_sizes(spec, out):
    if not spec.correlation.is_cohort:
        return
    for s in range(spec.n_sequences):
        row = spec.cp_sizes[s][spec.design_pattern[s] != NO_DATA]
        positive = row[row > 0]
        if positive.size == 0 or np.any(row != positive[0]):
            out.append(Violation(
                "V9",
                f"{spec.correlation.kind.value} is a cohort structure; sequence {s + 1} must "
                "have the same nonzero size in every observed period",
                (s + 1,),
            ))


def _linear_predictor(spec, t):
    beta = spec.beta_period_effects
    if spec.period_effect_type is PeriodType.CAT:
        return beta[t - 1]
    return beta[0] + beta[1] * (t - 1)


def _means(spec, profiles):
    """Per sequence, the list of (period, size, mu at u=0, mu at realized u)."""
    effect = spec.intervention_effect_type
    q = spec.max_intervention_period
    link = spec.outcome.link
    table = []
    for prof in profiles:
        rows = []
        for t, n in zip(prof.observed_periods, prof.sizes):
            base = _linear_predictor(spec, t)
            u = exposure(prof, t, effect, q)
            mu0, _ = mean_and_derivative(base, link)
            mu1, _ = mean_and_derivative(base + u * spec.delta, link)
            rows.append((t, n, mu0, mu1))
        table.append(rows)
    return table


def _check_means(spec, table, out) -> bool:
    dist = spec.outcome.dist
    ok = True
    for s, rows in enumerate(table, start=1):
        for t, _, mu0, mu1 in rows:
            for label, mu in (("control", mu0), ("realized", mu1)):
                if not math.isfinite(mu):
                    bad = True
                elif dist is Dist.BINARY:
                    bad = not 0.0 < mu < 1.0
                elif dist is Dist.POISSON:
                    bad = not mu > 0.0
                else:
                    bad = False
                if bad:
                    rng = "(0, 1)" if dist is Dist.BINARY else "(0, inf)"
                    out.append(Violation(
                        "V3",
                        f"{label} mean {mu:.6g} in sequence {s}, period {t} is outside "
                        f"{rng} for {dist.value} outcomes",
                        ((s, t),),
                    ))
                    ok = False
    return ok


def _check_frechet(spec, table, out):
    corr = spec.correlation
    cohort = corr.is_cohort
    for s, rows in enumerate(table, start=1):
        for a, (t, n, _, mu) in enumerate(rows):
            for t2, n2, _, mu2 in rows[a:]:
                pairs = []
                if t == t2:
                    if n >= 2:
                        pairs.append(("within-period", correlation_entry(corr, t, 0, t, 1)))
                else:
                    if not cohort or min(n, n2) >= 2:
                        pairs.append(("between-period", correlation_entry(corr, t, 0, t2, 1)))
                    if cohort:
                        pairs.append(("within-individual", correlation_entry(corr, t, 0, t2, 0)))
                if not pairs:
                    continue
                lower, upper = frechet_bounds(mu, mu2)
                for label, rho in pairs:
                    if not lower <= rho <= upper:
                        out.append(Violation(
                            "V4",
                            f"{label} correlation {rho:.6g} between periods {t} and {t2} "
                            f"of sequence {s} is outside the Frechet bounds "
                            f"[{lower:.4f}, {upper:.4f}] for means {mu:.4f}, {mu2:.4f}",
                            ((s, t), (s, t2)),
                        ))


def validate(spec: TrialSpec) -> ValidationReport:
    """Run every consistency check on ``spec`` and report all failures."""
    out = []
    _check_sizes(spec, out)
    beta_ok = _check_beta(spec, out)
    corr_ok = _check_corr_params(spec, out)
    _check_periods(spec, out)
    profiles = _profiles(spec, out)
    _check_maintenance(spec, profiles, out)
    _check_cohort_sizes(spec, out)
    if spec.outcome.dist is Dist.BINARY and spec.outcome.phi != 1.0:
        out.append(Violation("V10", f"binary outcomes need phi = 1, got {spec.outcome.phi:g}"))
    if spec.df < 1:
        out.append(Violation(
            "V12", f"{spec.n_clusters} clusters leave df = {spec.df} under {spec.df_choice.value}; need df >= 1"
        ))
    if beta_ok and profiles is not None:
        table = _means(spec, profiles)
        means_ok = _check_means(spec, table, out)
        if means_ok and corr_ok and spec.outcome.dist is Dist.BINARY:
            _check_frechet(spec, table, out)
    return ValidationReport(tuple(out))
