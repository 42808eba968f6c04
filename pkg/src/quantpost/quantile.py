"""Check loss, its expectation over a discrete law, and the induced quantile.

The quantile of a discrete distribution is the minimizer of the expected
check loss; for a valid probability vector it is located by a single
cumulative-sum scan, with an explicit error on the measure-zero boundary
where a cumulative sum ties the level exactly.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import NonUniqueQuantile
from .support import TIE_TOL, Support, as_simplex, check_tau


def check_loss(e, tau: float):
    """Asymmetric absolute loss: ``|e| * (tau if e >= 0 else 1-tau)``."""
    tau = check_tau(tau)
    e = np.asarray(e, dtype=float)
    if not np.all(np.isfinite(e)):
        raise ValueError("loss argument must be finite")
    out = np.abs(e) * np.where(e < 0, 1.0 - tau, tau)
    return float(out) if out.ndim == 0 else out


def expected_check_loss(b: float, theta, support: Support, tau: float) -> float:
    """Expected check loss of forecasting ``b`` under probabilities ``theta``."""
    b = float(b)
    if not np.isfinite(b):
        raise ValueError("forecast value must be finite")
    theta = as_simplex(theta, len(support))
    return float(theta @ check_loss(support.values - b, tau))


class QuantileResult(NamedTuple):
    beta: float
    region: int  # 1-based support index


def quantile_of(theta, support: Support, tau: float, tie_tol: float = TIE_TOL) -> QuantileResult:
    """Quantile of the discrete law ``theta`` on ``support`` at level ``tau``.

    Returns the minimizing support point together with its 1-based index.
    Raises :class:`NonUniqueQuantile` when a cumulative probability ties
    ``tau`` within ``tie_tol``.
    """
    tau = check_tau(tau)
    theta = as_simplex(theta, len(support))
    partial = np.cumsum(theta)[:-1]
    if np.any(np.abs(partial - tau) <= tie_tol):
        raise NonUniqueQuantile(
            f"a cumulative probability equals tau={tau} within {tie_tol:g}"
        )
    k = int(np.count_nonzero(partial < tau)) + 1
    return QuantileResult(float(support.values[k - 1]), k)


def region_contains(theta, k: int, tau: float, tie_tol: float = TIE_TOL) -> bool:
    """Whether ``theta`` lies strictly inside the region with quantile index ``k``."""
    theta = np.asarray(theta, dtype=float)
    tau = check_tau(tau)
    below = float(theta[: k - 1].sum())
    upto = below + float(theta[k - 1])
    return below < tau - tie_tol and upto > tau + tie_tol


def classify_regions(thetas: np.ndarray, tau: float, tie_tol: float = TIE_TOL):
    """Vectorized region indices for rows of ``thetas``.

    Returns ``(k, ties)`` where ``k`` holds 1-based indices and ``ties``
    flags rows whose cumulative sums tie ``tau`` (their ``k`` is unusable).
    """
    tau = check_tau(tau)
    partial = np.cumsum(thetas, axis=1)[:, :-1]
    ties = np.any(np.abs(partial - tau) <= tie_tol, axis=1)
    k = np.count_nonzero(partial < tau, axis=1) + 1
    return k, ties


def directional_derivative(b: float, theta, support: Support, tau: float, v: int) -> float:
    """One-sided derivative of the expected check loss at ``b`` in direction ``v``."""
    if v not in (-1, 1):
        raise ValueError("direction must be -1 or +1")
    b = float(b)
    if not np.isfinite(b):
        raise ValueError("evaluation point must be finite")
    tau = check_tau(tau)
    theta = as_simplex(theta, len(support))
    s = support.values
    below = (1.0 - tau) * v * theta[s < b].sum()
    above = -tau * v * theta[s > b].sum()
    at = theta[s == b].sum() * check_loss(-v, tau)
    return float(below + above + at)
