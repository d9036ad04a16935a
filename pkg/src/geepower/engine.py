"""Model-based GEE information, covariance of theta-hat and power.

The information contributed by one cluster is ``D' V^{-1} D`` with
``D = diag(dmu/deta) X`` and ``V = A^{1/2} R A^{1/2}``, ``A`` holding the
response variances.  Clusters of the same sequence are identical, so the
total is ``sum_s I_s * info_s`` and the cost grows with the number of
sequences, not clusters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .correlation import CorrelationMatrix, build_R
from .design import SequenceDesign, build_design
from .distributions import normal_cdf, normal_quantile, t_cdf, t_quantile
from .exceptions import DomainError, SingularInformationError, ValidationError
from .model import TrialSpec, mean_and_derivative, variance_function
from .validation import validate

SINGULAR_TOL = 1e-10

__all__ = [
    "PowerResult",
    "sequence_information",
    "information_matrix",
    "model_covariance",
    "power",
    "fast_gee_power",
]


@dataclass(frozen=True)
class PowerResult:
    var_delta: float
    stddel: float
    zpower: float
    tpower: float
    df: int
    totaln: int
    theta: tuple
    covariance: np.ndarray


def sequence_information(design: SequenceDesign, spec: TrialSpec,
                         R: CorrelationMatrix) -> np.ndarray:
    """Information ``D' V^{-1} D`` of a single cluster in this sequence."""
    x = np.repeat(design.x_rows, design.sizes, axis=0)
    if x.shape[0] != R.n:
        raise ValueError(f"design has {x.shape[0]} observations, correlation matrix {R.n}")
    mu, dmu = mean_and_derivative(x @ spec.theta, spec.outcome.link)
    sd = np.sqrt(variance_function(mu, spec.outcome))
    # V^{-1} = A^{-1/2} R^{-1} A^{-1/2}; whiten with the factor of R
    w = linalg.solve_triangular(R.cholesky, (dmu / sd)[:, None] * x, lower=True)
    return w.T @ w


def information_matrix(spec: TrialSpec, clock: str = "intervention") -> np.ndarray:
    """Total information, accumulated in fixed sequence order."""
    p = spec.n_params
    total = np.zeros((p, p))
    for design, m in zip(build_design(spec, clock=clock), spec.clusters_per_sequence):
        if design.profile.n_obs == 0:
            continue
        R = build_R(spec.correlation, design.profile, design.sizes)
        total += int(m) * sequence_information(design, spec, R)
    return total


def model_covariance(spec: TrialSpec, clock: str = "intervention") -> np.ndarray:
    """Model-based covariance of theta-hat, the inverse of the total information.

    Raises
    ------
    SingularInformationError
        If the information is not positive definite.
    """
    info = information_matrix(spec, clock=clock)
    diag = np.diag(info)
    if np.any(~(diag > 0)):
        raise SingularInformationError(
            "information matrix has a zero diagonal entry; theta is not identifiable"
        )
    # judge rank on the unit-diagonal rescaling so units of theta do not matter
    scale = 1.0 / np.sqrt(diag)
    scaled = info * np.outer(scale, scale)
    if np.linalg.eigvalsh(scaled)[0] < SINGULAR_TOL:
        raise SingularInformationError(
            "information matrix is singular; theta is not identifiable under this design"
        )
    try:
        factor = linalg.cho_factor(scaled, lower=True)
    except linalg.LinAlgError:
        raise SingularInformationError(
            "information matrix is singular; theta is not identifiable under this design"
        ) from None
    cov = linalg.cho_solve(factor, np.eye(info.shape[0])) * np.outer(scale, scale)
    return 0.5 * (cov + cov.T)


def power(delta: float, var_delta: float, alpha: float = 0.05, df: int = None):
    """Two-sided Wald power for the intervention effect.

    Returns ``(stddel, zpower, tpower)`` where ``stddel = |delta| / sqrt(var_delta)``,
    ``zpower = Phi(z_{alpha/2} + stddel)`` and ``tpower`` applies the same shift
    to the central t with ``df`` degrees of freedom.
    """
    if not var_delta > 0:
        raise DomainError(f"var_delta must be positive, got {var_delta!r}")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    stddel = abs(delta) / np.sqrt(var_delta)
    zpower = normal_cdf(normal_quantile(alpha / 2) + stddel)
    if df is None:
        return stddel, zpower, None
    tpower = t_cdf(t_quantile(alpha / 2, df) + stddel, df)
    return stddel, zpower, tpower


def fast_gee_power(spec: TrialSpec, check: bool = True,
                   clock: str = "intervention") -> PowerResult:
    """Validate ``spec`` and compute its analytical GEE power.

    Raises :class:`~geepower.exceptions.ValidationError` carrying the report
    when ``check`` is true and the spec is rejected.
    """
    if check:
        report = validate(spec)
        if not report.ok:
            raise ValidationError(report)
    cov = model_covariance(spec, clock=clock)
    var_delta = float(cov[-1, -1])
    stddel, zpower, tpower = power(spec.delta, var_delta, spec.sig_level, spec.df)
    cov.setflags(write=False)
    return PowerResult(
        var_delta=var_delta,
        stddel=float(stddel),
        zpower=float(zpower),
        tpower=float(tpower),
        df=spec.df,
        totaln=spec.total_size,
        theta=tuple(spec.theta.tolist()),
        covariance=cov,
    )
