"""Design-pattern parsing, exposure covariates and per-sequence design matrices."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import NonMonotoneSequenceError
from .model import CONTROL, INTERVENTION, NO_DATA, EffectType, PeriodType, TrialSpec

__all__ = [
    "SequenceProfile",
    "SequenceDesign",
    "parse_sequence",
    "exposure",
    "build_design",
]

# Exposure clocks.  "intervention" starts counting at the first intervention
# period so implementation gaps accrue nothing; "control" counts from the last
# control period.  Both agree on complete designs.
CLOCKS = ("intervention", "control")


@dataclass(frozen=True)
class SequenceProfile:
    """Calendar structure of one sequence (row of the design pattern).

    Periods are 1-based calendar indices.  ``b0``/``b1`` bound the control
    span and ``q0``/``q1`` the intervention span; either is ``None`` when the
    row has no cells of that kind.  ``c`` counts implementation periods
    between the spans.
    """

    seq_index: int
    observed_periods: tuple
    states: tuple
    sizes: tuple
    b0: Optional[int]
    b1: Optional[int]
    q0: Optional[int]
    q1: Optional[int]
    c: int
    monotone: bool

    @property
    def b(self) -> int:
        return 0 if self.b0 is None else self.b1 - self.b0 + 1

    @property
    def q(self) -> int:
        return 0 if self.q0 is None else self.q1 - self.q0 + 1

    @property
    def n_observed(self) -> int:
        return len(self.observed_periods)

    @property
    def n_obs(self) -> int:
        """Observations per cluster."""
        return int(sum(self.sizes))

    def state_at(self, t: int) -> int:
        try:
            return self.states[self.observed_periods.index(t)]
        except ValueError:
            raise IndexError(f"period {t} is not observed in sequence {self.seq_index}") from None


@dataclass(frozen=True)
class SequenceDesign:
    profile: SequenceProfile
    x_rows: np.ndarray
    sizes: np.ndarray
    exposures: np.ndarray
    p: int


def parse_sequence(dp_row, sizes_row, effect_type=EffectType.AVE, seq_index: int = 1):
    """Build the :class:`SequenceProfile` of one design-pattern row.

    A cluster-period counts as observed when its cell is not 2 and its size
    is positive.  Rows whose intervention cells precede control cells are
    only allowed under the average effect model; they get no intervention
    span.
    """
    effect_type = EffectType.parse(effect_type)
    dp_row = np.asarray(dp_row)
    sizes_row = np.asarray(sizes_row)
    keep = (dp_row != NO_DATA) & (sizes_row > 0)
    periods = tuple(int(t) + 1 for t in np.flatnonzero(keep))
    states = tuple(int(s) for s in dp_row[keep])
    sizes = tuple(int(n) for n in sizes_row[keep])

    ctrl = [t for t, s in zip(periods, states) if s == CONTROL]
    trt = [t for t, s in zip(periods, states) if s == INTERVENTION]
    b0, b1 = (ctrl[0], ctrl[-1]) if ctrl else (None, None)
    q0, q1 = (trt[0], trt[-1]) if trt else (None, None)
    monotone = not (ctrl and trt) or b1 < q0
    if not monotone:
        if effect_type is not EffectType.AVE:
            raise NonMonotoneSequenceError(
                f"sequence {seq_index}: intervention cells precede control cells, "
                f"which the {effect_type.value} model cannot represent"
            )
        q0 = q1 = None
    c = q0 - b1 - 1 if (b1 is not None and q0 is not None) else 0
    return SequenceProfile(seq_index, periods, states, sizes, b0, b1, q0, q1, c, monotone)


def exposure(profile: SequenceProfile, t: int, effect_type, q: Optional[int] = None,
             clock: str = "intervention") -> float:
    """Treatment covariate u for calendar period ``t`` of a sequence.

    AVE returns the 0/1 cell state.  INC returns e/q with no cap and INC_EX
    caps it at 1 once the active phase of ``q`` periods is over, where the
    elapsed exposure e is 1 in the first intervention period.
    """
    effect_type = EffectType.parse(effect_type)
    state = profile.state_at(t)
    if effect_type is EffectType.AVE:
        return float(state)
    if state == CONTROL:
        return 0.0
    if q is None or q < 1:
        raise ValueError("incremental effect models need max_intervention_period >= 1")
    if clock == "intervention":
        elapsed = t - profile.q0 + 1
    elif clock == "control":
        # a row without control cells starts its clock at period 1
        start = profile.b1 if profile.b1 is not None else profile.q0 - 1
        elapsed = t - start
    else:
        raise ValueError(f"clock must be one of {CLOCKS}")
    u = elapsed / q
    if effect_type is EffectType.INC_EX:
        u = min(u, 1.0)
    return u


def _covariates(t: int, u: float, spec: TrialSpec) -> np.ndarray:
    p = spec.n_params
    if spec.period_effect_type is PeriodType.CAT:
        row = np.zeros(p)
        row[t - 1] = 1.0
    else:
        row = np.array([1.0, t - 1.0, 0.0])
    row[p - 1] = u
    return row


def build_design(spec: TrialSpec, clock: str = "intervention") -> list:
    """One :class:`SequenceDesign` per sequence, rows at cluster-period level.

    Under CAT the covariates are period indicators followed by u, so theta is
    (beta_1, ..., beta_J, delta).  Under LIN they are (1, t - 1, u).
    """
    designs = []
    q = spec.max_intervention_period
    for s in range(spec.n_sequences):
        profile = parse_sequence(spec.design_pattern[s], spec.cp_sizes[s],
                                 spec.intervention_effect_type, seq_index=s + 1)
        u = np.array([
            exposure(profile, t, spec.intervention_effect_type, q, clock=clock)
            for t in profile.observed_periods
        ])
        x = np.array([_covariates(t, ui, spec) for t, ui in zip(profile.observed_periods, u)])
        x = x.reshape(len(u), spec.n_params)
        for arr in (x, u):
            arr.setflags(write=False)
        sizes = np.array(profile.sizes, dtype=np.int64)
        sizes.setflags(write=False)
        designs.append(SequenceDesign(profile, x, sizes, u, spec.n_params))
    return designs
