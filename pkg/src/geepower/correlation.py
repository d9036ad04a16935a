"""Within-cluster working correlation matrices.

Observations of one cluster are laid out period-major: every individual of
the earliest observed period, then the next period, and so on.  In cohort
structures (BE, PD) individual ``k`` is the same person in every period.
Decay exponents use calendar distance, so a skipped period widens the gap.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .exceptions import NotPositiveDefiniteError
from .model import CorrelationSpec, CorrType

__all__ = ["CorrelationMatrix", "correlation_entry", "build_R"]


@dataclass(frozen=True)
class CorrelationMatrix:
    matrix: np.ndarray
    periods: np.ndarray
    individuals: np.ndarray
    cholesky: np.ndarray  # lower factor, matrix = L @ L.T

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def correlation_entry(corr: CorrelationSpec, t: int, k: int, t2: int, k2: int) -> float:
    """Correlation between individual ``k`` in period ``t`` and ``k2`` in ``t2``."""
    if t == t2 and k == k2:
        return 1.0
    d = abs(t - t2)
    kind = corr.kind
    decay = corr.r0 ** d if corr.r0 is not None else None
    if kind is CorrType.NE:
        return corr.alpha1 if d == 0 else corr.alpha2
    if kind is CorrType.ED:
        return corr.alpha0 * decay
    if kind is CorrType.BE:
        if d == 0:
            return corr.alpha1
        return corr.alpha3 if k == k2 else corr.alpha2
    # PD
    if d == 0:
        return corr.alpha0
    return decay if k == k2 else corr.alpha0 * decay


def _decay(r0: float, d: np.ndarray) -> np.ndarray:
    # scalar pow per distance; the vectorized np.power loop can differ in the last ulp
    table = np.array([r0 ** k for k in range(int(d.max(initial=0)) + 1)])
    return table[d]


def _fill(corr: CorrelationSpec, periods: np.ndarray, individuals: np.ndarray) -> np.ndarray:
    d = np.abs(periods[:, None] - periods[None, :])
    same_t = d == 0
    same_k = individuals[:, None] == individuals[None, :]
    kind = corr.kind
    if kind is CorrType.NE:
        R = np.where(same_t, corr.alpha1, corr.alpha2)
    elif kind is CorrType.ED:
        R = corr.alpha0 * _decay(corr.r0, d)
    elif kind is CorrType.BE:
        R = np.where(same_t, corr.alpha1, np.where(same_k, corr.alpha3, corr.alpha2))
    else:
        decay = _decay(corr.r0, d)
        R = np.where(same_t, corr.alpha0, np.where(same_k, decay, corr.alpha0 * decay))
    R = R.astype(float)
    np.fill_diagonal(R, 1.0)
    return R


@functools.lru_cache(maxsize=256)
def _build_cached(corr: CorrelationSpec, periods: tuple, sizes: tuple) -> CorrelationMatrix:
    obs_t = np.repeat(np.asarray(periods, dtype=np.int64), sizes)
    obs_k = np.concatenate([np.arange(n) for n in sizes]) if sizes else np.zeros(0, np.int64)
    R = _fill(corr, obs_t, obs_k)
    try:
        L = np.linalg.cholesky(R)
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError(
            f"{corr.kind.value} correlation with {dict(zip(corr.param_names, corr.values()))} "
            f"is not positive definite for periods {list(periods)} with sizes {list(sizes)}"
        ) from None
    for arr in (R, obs_t, obs_k, L):
        arr.setflags(write=False)
    return CorrelationMatrix(R, obs_t, obs_k, L)


def build_R(corr: CorrelationSpec, profile, sizes=None) -> CorrelationMatrix:
    """Dense correlation matrix for one cluster of a sequence.

    ``profile`` is a :class:`~geepower.design.SequenceProfile`; ``sizes``
    defaults to its observed cluster-period sizes.  Matrices are cached per
    unique (structure, periods, sizes) so clusters and sequences sharing a
    layout share one factorization.

    Raises
    ------
    NotPositiveDefiniteError
        If the Cholesky factorization fails.
    """
    if sizes is None:
        sizes = profile.sizes
    sizes = tuple(int(n) for n in sizes)
    if len(sizes) != len(profile.observed_periods):
        raise ValueError("need one size per observed period")
    return _build_cached(corr, tuple(profile.observed_periods), sizes)
