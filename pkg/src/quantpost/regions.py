"""Probabilities that a Dirichlet draw's quantile lands on each support atom.

The simplex splits into one region per support point, the region index
being the quantile's position. Under a Dirichlet law the cumulative
coordinate sums are Beta distributed, so each region probability is a
difference of two regularized incomplete beta values at the quantile
level. Two evaluation routes are kept deliberately distinct:

* :func:`region_probs` differences the CDF values in linear space — the
  plain formula, fine at moderate concentrations;
* :func:`log_region_probs` stays in log space throughout via
  ``log c_k = log B_k + log(exp(log B_{k-1} - log B_k) - 1)``, which
  survives concentrations in the hundreds where the linear differences
  cancel to nothing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import binom

from .betainc import log_betainc, log_expm1, log1mexp
from .errors import NumericInstabilityError
from .support import as_alpha, as_counts, check_tau

#: linear-space floor applied to region probabilities
C_FLOOR = 1e-300

# relative noise scale allowed in the log CDF before a decreasing-CDF
# violation is treated as real rather than rounding
_MONOTONE_SLACK = 64 * np.finfo(float).eps


@dataclass(frozen=True)
class RegionProbs:
    """Per-atom region probabilities in linear and log form."""

    c: np.ndarray = field()
    log_c: np.ndarray = field()

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        log_c = np.asarray(self.log_c, dtype=float)
        if c.shape != log_c.shape or c.ndim != 1:
            raise ValueError("c and log_c must be 1-D arrays of equal length")
        if np.any(c <= 0) or np.any(c > 1):
            raise ValueError("region probabilities must lie in (0, 1]")
        total = c.sum()
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"region probabilities sum to {total}, not 1")
        big = c > 1e-250
        if np.any(np.abs(np.exp(log_c[big]) - c[big]) > 1e-8 * c[big]):
            raise ValueError("log_c inconsistent with c")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "log_c", log_c)

    def __len__(self) -> int:
        return self.c.size


def _log_upper_cdfs(alpha: np.ndarray, tau: float) -> np.ndarray:
    """log Pr(partial sum below tau) for the first J-1 cumulative coordinates."""
    partial = np.cumsum(alpha)[:-1]
    total = alpha.sum()
    return log_betainc(partial, total - partial, tau)


def region_probs(alpha, tau: float) -> RegionProbs:
    """Region probabilities by linear differencing of Beta CDF values."""
    alpha = as_alpha(alpha)
    tau = check_tau(tau)
    cdf = np.exp(_log_upper_cdfs(alpha, tau))
    c = np.diff(np.concatenate(([1.0], cdf, [0.0]))) * -1.0
    c = np.maximum(c, C_FLOOR)
    return RegionProbs(c=c, log_c=np.log(c))


def log_region_probs(alpha, tau: float) -> RegionProbs:
    """Region probabilities computed entirely in log space."""
    alpha = as_alpha(alpha)
    tau = check_tau(tau)
    log_cdf = _log_upper_cdfs(alpha, tau)
    j = alpha.size
    log_c = np.empty(j)
    log_c[0] = log1mexp(min(log_cdf[0], 0.0))
    log_c[-1] = log_cdf[-1]
    if j > 2:
        d = log_cdf[:-1] - log_cdf[1:]
        slack = _MONOTONE_SLACK * np.maximum(np.abs(log_cdf[1:]), 1.0)
        bad = d < -slack
        if np.any(bad):
            k = int(np.argmax(bad))
            raise NumericInstabilityError(
                f"cumulative Beta CDF increased between atoms {k + 1} and {k + 2}; "
                "the concentration parameters are outside the stable range"
            )
        log_c[1:-1] = log_cdf[1:] + log_expm1(np.maximum(d, 0.0))
    c = np.maximum(np.exp(log_c), C_FLOOR)
    return RegionProbs(c=c, log_c=log_c)


def small_alpha_region_probs(counts, tau: float) -> RegionProbs:
    """Vanishing-concentration limit of the data-updated region probabilities.

    With total count ``n`` the limit is a run of binomial(n-1, tau) pmf
    terms between consecutive cumulative counts. Atoms with no
    observations get zero limiting mass (floored for the linear field).
    """
    counts = as_counts(counts)
    tau = check_tau(tau)
    n = int(counts.sum())
    if n < 1:
        raise ValueError("the limit needs at least one observation")
    upper = np.cumsum(counts)
    cdf = binom.cdf(upper - 1, n - 1, tau)
    c = np.diff(np.concatenate(([0.0], cdf)))
    with np.errstate(divide="ignore"):
        log_c = np.log(np.maximum(c, 0.0))
    return RegionProbs(c=np.maximum(c, C_FLOOR), log_c=log_c)


def small_alpha_prior_probs(j: int) -> RegionProbs:
    """Vanishing-concentration limit on the prior side: uniform over atoms."""
    if j < 2:
        raise ValueError("need at least two atoms")
    c = np.full(j, 1.0 / j)
    return RegionProbs(c=c, log_c=np.log(c))


def empirical_quantile_pmf(j: int, tau: float) -> np.ndarray:
    """Sampling pmf of the empirical quantile over the order statistics.

    For a no-ties sample of size ``j`` the empirical quantile at level
    ``tau`` is an order statistic; its pmf over ranks 1..j is a
    difference of binomial CDFs.
    """
    if j < 1:
        raise ValueError("need at least one point")
    tau = check_tau(tau)
    m = int(np.ceil(tau * j - 1e-12)) - 1
    ranks = np.arange(1, j + 1)
    hi = binom.cdf(m, j, (ranks - 1) / j)
    lo = binom.cdf(m, j, ranks / j)
    return hi - lo
