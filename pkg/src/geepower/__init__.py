"""Analytical GEE power for complete and incomplete multi-period cluster randomized trials."""

from .correlation import CorrelationMatrix, build_R, correlation_entry
from .design import SequenceDesign, SequenceProfile, build_design, exposure, parse_sequence
from .distributions import normal_cdf, normal_quantile, t_cdf, t_quantile
from .engine import (
    PowerResult,
    fast_gee_power,
    information_matrix,
    model_covariance,
    power,
    sequence_information,
)
from .exceptions import (
    ConfigError,
    DomainError,
    GeePowerError,
    MeanRangeError,
    NonMonotoneSequenceError,
    NotPositiveDefiniteError,
    ParseError,
    SingularInformationError,
    ValidationError,
)
from .model import (
    CorrelationSpec,
    CorrType,
    DfChoice,
    Dist,
    EffectType,
    Link,
    OutcomeModel,
    PeriodType,
    TrialSpec,
    frechet_bounds,
    mean_and_derivative,
    variance_function,
)
from .report import render, round4
from .scenario import load_scenario, load_spec, spec_from_mapping
from .sweep import SweepRow, SweepSpec, power_curve, run_sweep, write_csv
from .validation import ValidationReport, Violation, validate

__version__ = "0.1.0"
