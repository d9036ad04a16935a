"""Normal and central t distribution functions used by the power formulas.

Thin wrappers over ``scipy.special`` that enforce the argument domains.
"""

import numpy as np
from scipy import special

from .exceptions import DomainError

__all__ = ["normal_cdf", "normal_quantile", "t_cdf", "t_quantile"]


def _check_prob(p):
    arr = np.asarray(p, dtype=float)
    if np.any(~((arr > 0.0) & (arr < 1.0))):
        raise DomainError(f"probability must lie in (0, 1), got {p!r}")
    return arr


def _check_df(df):
    if not df >= 1:
        raise DomainError(f"degrees of freedom must be >= 1, got {df!r}")
    return float(df)


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def normal_cdf(x):
    return _out(special.ndtr(np.asarray(x, dtype=float)))


def normal_quantile(p):
    return _out(special.ndtri(_check_prob(p)))


def t_cdf(x, df):
    return _out(special.stdtr(_check_df(df), np.asarray(x, dtype=float)))


def t_quantile(p, df):
    return _out(special.stdtrit(_check_df(df), _check_prob(p)))
