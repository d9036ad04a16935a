"""Trial specification, outcome families and link functions.

A :class:`TrialSpec` is the declarative description of one power scenario:
the design pattern, cluster-period sizes, cluster counts, the marginal mean
model and the working correlation structure.  Everything in this module is
immutable and free of side effects.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import expit

from .exceptions import MeanRangeError

__all__ = [
    "CONTROL",
    "INTERVENTION",
    "NO_DATA",
    "Dist",
    "Link",
    "EffectType",
    "PeriodType",
    "CorrType",
    "DfChoice",
    "OutcomeModel",
    "CorrelationSpec",
    "TrialSpec",
    "mean_and_derivative",
    "variance_function",
    "frechet_bounds",
]

CONTROL, INTERVENTION, NO_DATA = 0, 1, 2


class _Named(str, enum.Enum):
    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().upper())
        except ValueError:
            choices = ", ".join(m.value for m in cls)
            raise ValueError(f"{value!r} is not one of {choices}") from None


class Dist(_Named):
    BINARY = "BINARY"
    POISSON = "POISSON"
    NORMAL = "NORMAL"


class Link(_Named):
    LOGIT = "LOGIT"
    LOG = "LOG"
    IDENTITY = "IDENTITY"


class EffectType(_Named):
    AVE = "AVE"
    INC = "INC"
    INC_EX = "INC_EX"


class PeriodType(_Named):
    CAT = "CAT"
    LIN = "LIN"


class CorrType(_Named):
    NE = "NE"
    ED = "ED"
    BE = "BE"
    PD = "PD"


class DfChoice(_Named):
    IMINUSP = "IMINUSP"
    IMINUS2 = "IMINUS2"

    @classmethod
    def parse(cls, value):
        # the macro spells these 1 and 2
        aliases = {"1": cls.IMINUSP, "2": cls.IMINUS2}
        key = str(value.value if isinstance(value, enum.Enum) else value).strip().upper()
        if key in aliases:
            return aliases[key]
        return super().parse(key)


CANONICAL_LINK = {Dist.BINARY: Link.LOGIT, Dist.POISSON: Link.LOG, Dist.NORMAL: Link.IDENTITY}

# parameters each structure needs, in display order
CORR_PARAMS = {
    CorrType.NE: ("alpha1", "alpha2"),
    CorrType.ED: ("alpha0", "r0"),
    CorrType.BE: ("alpha1", "alpha2", "alpha3"),
    CorrType.PD: ("alpha0", "r0"),
}
COHORT_STRUCTURES = frozenset({CorrType.BE, CorrType.PD})


@dataclass(frozen=True)
class OutcomeModel:
    """Outcome distribution, link and dispersion.

    ``link=None`` selects the canonical link of ``dist``.
    """

    dist: Dist
    link: Optional[Link] = None
    phi: float = 1.0

    def __post_init__(self):
        dist = Dist.parse(self.dist)
        object.__setattr__(self, "dist", dist)
        link = CANONICAL_LINK[dist] if self.link is None else Link.parse(self.link)
        object.__setattr__(self, "link", link)
        phi = float(self.phi)
        if not (phi > 0 and math.isfinite(phi)):
            raise ValueError(f"dispersion phi must be positive, got {self.phi!r}")
        object.__setattr__(self, "phi", phi)


@dataclass(frozen=True)
class CorrelationSpec:
    """Working correlation structure and its parameters.

    NE and ED describe cross-sectional designs, BE and PD closed cohorts.
    Parameters a structure does not use are ignored.
    """

    kind: CorrType
    alpha0: Optional[float] = None
    r0: Optional[float] = None
    alpha1: Optional[float] = None
    alpha2: Optional[float] = None
    alpha3: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", CorrType.parse(self.kind))
        for name in ("alpha0", "r0", "alpha1", "alpha2", "alpha3"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, float(value))

    @property
    def is_cohort(self) -> bool:
        return self.kind in COHORT_STRUCTURES

    @property
    def param_names(self) -> tuple:
        return CORR_PARAMS[self.kind]

    def values(self) -> tuple:
        return tuple(getattr(self, name) for name in self.param_names)


def _frozen_array(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class TrialSpec:
    """Complete description of a multi-period cluster randomized trial scenario.

    Parameters
    ----------
    design_pattern : array_like, shape (S, J)
        Cell states: 0 control, 1 intervention, 2 no data collected.
    cp_sizes : array_like, shape (S, J)
        Participants per cluster-period.
    clusters_per_sequence : array_like, shape (S,)
        Number of clusters randomized to each sequence.
    outcome : OutcomeModel
    intervention_effect_type, period_effect_type : str or enum
        ``AVE``/``INC``/``INC_EX`` and ``CAT``/``LIN``.
    delta : float
        Intervention effect on the link scale.
    beta_period_effects : sequence of float
        ``J`` period effects for CAT, ``(intercept, slope)`` for LIN.
    correlation : CorrelationSpec
    max_intervention_period : int, optional
        Periods to reach the full effect (INC, INC_EX).
    sig_level : float
        Two-sided type I error rate.
    df_choice : str or DfChoice
        ``IMINUSP`` (default) or ``IMINUS2``.

    Only structural problems (shapes, cell codes, negative counts) raise here;
    modelling problems are collected by :func:`geepower.validation.validate`.
    """

    design_pattern: np.ndarray
    cp_sizes: np.ndarray
    clusters_per_sequence: np.ndarray
    outcome: OutcomeModel
    intervention_effect_type: EffectType
    period_effect_type: PeriodType
    delta: float
    beta_period_effects: tuple
    correlation: CorrelationSpec
    max_intervention_period: Optional[int] = None
    sig_level: float = 0.05
    df_choice: DfChoice = DfChoice.IMINUSP
    _hash: int = field(default=0, init=False, repr=False, compare=False)

    def __post_init__(self):
        dp = np.atleast_2d(np.asarray(self.design_pattern))
        sizes = np.atleast_2d(np.asarray(self.cp_sizes))
        m = np.atleast_1d(np.asarray(self.clusters_per_sequence))
        if dp.ndim != 2:
            raise ValueError("design_pattern must be a 2-d matrix")
        if sizes.shape != dp.shape:
            raise ValueError(
                f"cp_sizes has shape {sizes.shape}, design_pattern has shape {dp.shape}"
            )
        if not np.all(np.isin(dp, (CONTROL, INTERVENTION, NO_DATA))):
            raise ValueError("design_pattern entries must be 0, 1 or 2")
        if np.any(sizes < 0) or np.any(sizes != np.round(sizes)):
            raise ValueError("cp_sizes must hold non-negative integers")
        if m.ndim != 1 or len(m) != dp.shape[0]:
            raise ValueError(
                f"clusters_per_sequence needs one entry per sequence ({dp.shape[0]})"
            )
        if np.any(m < 1) or np.any(m != np.round(m)):
            raise ValueError("clusters_per_sequence must hold positive integers")
        object.__setattr__(self, "design_pattern", _frozen_array(dp, np.int64))
        object.__setattr__(self, "cp_sizes", _frozen_array(sizes, np.int64))
        object.__setattr__(self, "clusters_per_sequence", _frozen_array(m, np.int64))

        object.__setattr__(self, "intervention_effect_type",
                           EffectType.parse(self.intervention_effect_type))
        object.__setattr__(self, "period_effect_type", PeriodType.parse(self.period_effect_type))
        object.__setattr__(self, "df_choice", DfChoice.parse(self.df_choice))
        object.__setattr__(self, "delta", float(self.delta))
        beta = np.atleast_1d(np.asarray(self.beta_period_effects, dtype=float))
        object.__setattr__(self, "beta_period_effects", tuple(float(b) for b in beta))
        if self.max_intervention_period is not None:
            q = self.max_intervention_period
            if q != int(q):
                raise ValueError("max_intervention_period must be an integer")
            object.__setattr__(self, "max_intervention_period", int(q))
        alpha = float(self.sig_level)
        if not 0.0 < alpha < 1.0:
            raise ValueError(f"sig_level must lie in (0, 1), got {self.sig_level!r}")
        object.__setattr__(self, "sig_level", alpha)
        object.__setattr__(self, "_hash", hash((
            self.design_pattern.tobytes(), self.cp_sizes.tobytes(),
            self.clusters_per_sequence.tobytes(), self.outcome,
            self.intervention_effect_type, self.period_effect_type, self.delta,
            self.beta_period_effects, self.correlation, self.max_intervention_period,
            alpha, self.df_choice,
        )))

    # numpy arrays defeat the generated __eq__/__hash__
    def __eq__(self, other):
        if not isinstance(other, TrialSpec):
            return NotImplemented
        return (
            np.array_equal(self.design_pattern, other.design_pattern)
            and np.array_equal(self.cp_sizes, other.cp_sizes)
            and np.array_equal(self.clusters_per_sequence, other.clusters_per_sequence)
            and self.outcome == other.outcome
            and self.intervention_effect_type == other.intervention_effect_type
            and self.period_effect_type == other.period_effect_type
            and self.delta == other.delta
            and self.beta_period_effects == other.beta_period_effects
            and self.correlation == other.correlation
            and self.max_intervention_period == other.max_intervention_period
            and self.sig_level == other.sig_level
            and self.df_choice == other.df_choice
        )

    def __hash__(self):
        return self._hash

    @property
    def n_sequences(self) -> int:
        return self.design_pattern.shape[0]

    @property
    def n_periods(self) -> int:
        return self.design_pattern.shape[1]

    @property
    def n_clusters(self) -> int:
        return int(self.clusters_per_sequence.sum())

    @property
    def n_params(self) -> int:
        """Dimension of theta: J + 1 under CAT, 3 under LIN."""
        if self.period_effect_type is PeriodType.CAT:
            return self.n_periods + 1
        return 3

    @property
    def theta(self) -> np.ndarray:
        return np.array(self.beta_period_effects + (self.delta,))

    @property
    def total_size(self) -> int:
        """Total participants, sum over sequences of I_s times the row sum of sizes."""
        return int(self.clusters_per_sequence @ self.cp_sizes.sum(axis=1))

    @property
    def df(self) -> int:
        if self.df_choice is DfChoice.IMINUS2:
            return self.n_clusters - 2
        return self.n_clusters - self.n_params

    def replace(self, **changes) -> "TrialSpec":
        """Return a copy with some fields swapped out."""
        kwargs = {
            name: getattr(self, name)
            for name in self.__dataclass_fields__
            if name != "_hash"
        }
        kwargs.update(changes)
        return TrialSpec(**kwargs)


def mean_and_derivative(eta, link):
    """Inverse link and its derivative at the linear predictor ``eta``.

    Works elementwise on arrays.  Returns ``(mu, dmu_deta)``.
    """
    link = Link.parse(link)
    eta = np.asarray(eta, dtype=float)
    if link is Link.LOGIT:
        mu = expit(eta)
        d = mu * (1.0 - mu)
    elif link is Link.LOG:
        mu = np.exp(eta)
        d = mu
    else:
        mu = eta.copy()
        d = np.ones_like(eta)
    if mu.ndim == 0:
        return float(mu), float(d)
    return mu, d


def variance_function(mu, outcome: OutcomeModel):
    """Variance of a single response with mean ``mu``, dispersion included.

    BINARY gives mu(1 - mu), POISSON gives phi * mu and NORMAL gives phi.
    """
    arr = np.asarray(mu, dtype=float)
    if outcome.dist is Dist.BINARY:
        if np.any((arr <= 0.0) | (arr >= 1.0)) or np.any(np.isnan(arr)):
            raise MeanRangeError("binary means must lie strictly inside (0, 1)")
        var = arr * (1.0 - arr)
    elif outcome.dist is Dist.POISSON:
        if np.any(~(arr > 0.0)):
            raise MeanRangeError("count means must be positive")
        var = outcome.phi * arr
    else:
        var = np.full_like(arr, outcome.phi)
    return float(var) if var.ndim == 0 else var


def frechet_bounds(mu1: float, mu2: float) -> tuple:
    """Feasible range for the correlation of two binary variables.

    With odds ``psi = mu / (1 - mu)`` the bounds are
    ``max(-sqrt(psi1 psi2), -1/sqrt(psi1 psi2))`` and
    ``min(sqrt(psi1/psi2), sqrt(psi2/psi1))``.
    """
    for mu in (mu1, mu2):
        if not 0.0 < mu < 1.0:
            raise MeanRangeError(f"binary mean {mu!r} is not inside (0, 1)")
    psi1 = mu1 / (1.0 - mu1)
    psi2 = mu2 / (1.0 - mu2)
    root = math.sqrt(psi1 * psi2)
    lower = max(-root, -1.0 / root)
    upper = min(math.sqrt(psi1 / psi2), math.sqrt(psi2 / psi1))
    return lower, upper

