"""Exact single-population posterior over a discrete-support quantile.

The posterior mass on each support atom multiplies the prior atom mass by
the ratio of data-updated to prior region probabilities; both region
vectors are evaluated in log space and the ratio is only exponentiated
after subtracting its maximum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import AcceptanceStarvation
from .quantile import classify_regions
from .regions import log_region_probs
from .support import Support, as_alpha, as_counts, as_generator, check_tau

_STARVE_PROPOSALS = 100_000
_STARVE_RATE = 1e-4


@dataclass(frozen=True)
class QuantileSpec:
    """Quantile level plus the prior pmf for the quantile itself."""

    tau: float
    prior_b: np.ndarray = field()

    def __post_init__(self):
        object.__setattr__(self, "tau", check_tau(self.tau))
        b = np.asarray(self.prior_b, dtype=float)
        if b.ndim != 1 or b.size < 2:
            raise ValueError("prior pmf must be a 1-D array with >= 2 atoms")
        if np.any(b <= 0) or not np.all(np.isfinite(b)):
            raise ValueError("prior pmf must be strictly positive and finite")
        if abs(b.sum() - 1.0) > 1e-12:
            raise ValueError(f"prior pmf sums to {b.sum()}, not 1")
        object.__setattr__(self, "prior_b", b)


@dataclass(frozen=True)
class PosteriorBeta:
    """Posterior pmf over support atoms and the log normalizing constant."""

    pmf: np.ndarray
    log_pmf: np.ndarray
    log_norm_const: float

    def __len__(self) -> int:
        return self.pmf.size


def _log_ratio(alpha: np.ndarray, counts: np.ndarray, tau: float) -> np.ndarray:
    """log of the data-updated over prior region probabilities."""
    prior = log_region_probs(alpha, tau).log_c
    post = log_region_probs(alpha + counts, tau).log_c
    with np.errstate(invalid="ignore"):
        ratio = post - prior
    # both regions numerically empty: the atom carries no usable signal
    ratio[np.isnan(ratio)] = -np.inf
    return ratio


def quantile_posterior(spec: QuantileSpec, alpha, counts) -> PosteriorBeta:
    """Exact posterior pmf of the quantile given per-atom counts."""
    alpha = as_alpha(alpha, spec.prior_b.size)
    counts = as_counts(counts, spec.prior_b.size)
    ratio = _log_ratio(alpha, counts, spec.tau)
    shift = ratio.max()
    weights = spec.prior_b * np.exp(ratio - shift)
    total = weights.sum()
    pmf = weights / total
    log_norm = shift + np.log(total)
    with np.errstate(divide="ignore"):
        log_pmf = np.log(spec.prior_b) + ratio - log_norm
    return PosteriorBeta(pmf=pmf, log_pmf=log_pmf, log_norm_const=float(log_norm))


@dataclass(frozen=True)
class PosteriorSummary:
    mean: float
    quantiles: dict[float, float]


def posterior_summary(post: PosteriorBeta, support: Support, levels=()) -> PosteriorSummary:
    """Posterior mean plus left-closed discrete quantiles at ``levels``."""
    pmf = np.asarray(post.pmf, dtype=float)
    if pmf.size != len(support):
        raise ValueError("posterior and support lengths differ")
    mean = float(pmf @ support.values)
    cdf = np.cumsum(pmf)
    quantiles = {}
    for q in levels:
        q = float(q)
        if not (0.0 < q < 1.0):
            raise ValueError(f"summary level {q} outside (0,1)")
        idx = int(np.searchsorted(cdf, q, side="left"))
        idx = min(idx, pmf.size - 1)
        quantiles[q] = float(support.values[idx])
    return PosteriorSummary(mean=mean, quantiles=quantiles)


@dataclass(frozen=True)
class AcceptanceStats:
    proposals: int
    accepted: int
    expected_rate: float

    @property
    def rate(self) -> float:
        return self.accepted / self.proposals if self.proposals else 0.0


@dataclass(frozen=True)
class ThetaPosteriorDraw:
    theta: np.ndarray
    beta: float
    region: int
    stats: AcceptanceStats


def _log_accept_ratios(spec: QuantileSpec, alpha: np.ndarray, tau: float) -> np.ndarray:
    """Per-region log acceptance probabilities, normalized to max 0."""
    log_prior_c = log_region_probs(alpha, tau).log_c
    log_m = np.log(spec.prior_b) - log_prior_c
    return log_m - log_m.max()


def _expected_accept_rate(spec: QuantileSpec, alpha: np.ndarray,
                          counts: np.ndarray) -> float:
    """Analytic overall acceptance rate of the rejection sampler."""
    post = quantile_posterior(spec, alpha, counts)
    log_prior_c = log_region_probs(alpha, spec.tau).log_c
    return float(np.exp(post.log_norm_const - np.max(np.log(spec.prior_b) - log_prior_c)))


def sample_theta_posterior(spec: QuantileSpec, alpha, counts, rng,
                           support: Support | None = None) -> ThetaPosteriorDraw:
    """One exact draw of the full probability vector given the data.

    Proposes from the count-updated Dirichlet and accepts with the prior
    reweighting ratio; a tied quantile triggers a silent resample. With a
    prior equal to the region probabilities every proposal is accepted.
    ``beta`` is the support value when ``support`` is given, otherwise the
    1-based atom index.
    """
    rng = as_generator(rng)
    alpha = as_alpha(alpha, spec.prior_b.size)
    counts = as_counts(counts, spec.prior_b.size)
    log_accept = _log_accept_ratios(spec, alpha, spec.tau)
    expected = _expected_accept_rate(spec, alpha, counts)
    shape = alpha + counts
    proposals = 0
    while True:
        proposals += 1
        theta = rng.dirichlet(shape)
        k, ties = classify_regions(theta[None, :], spec.tau)
        if ties[0]:
            continue
        k = int(k[0])
        if np.log(rng.random()) <= log_accept[k - 1]:
            stats = AcceptanceStats(proposals=proposals, accepted=1, expected_rate=expected)
            beta = float(support.values[k - 1]) if support is not None else float(k)
            return ThetaPosteriorDraw(theta=theta, beta=beta, region=k, stats=stats)
        if proposals >= _STARVE_PROPOSALS and 1.0 / proposals < _STARVE_RATE:
            raise AcceptanceStarvation(
                f"no acceptance in {proposals} proposals (expected rate {expected:.3g}); "
                "consider a flatter quantile prior"
            )


def sample_beta_atoms(spec: QuantileSpec, alpha, counts, draws: int, rng,
                      batch: int = 8192):
    """Vectorized batch of quantile draws from the posterior sampler.

    Returns ``(regions, stats)`` where ``regions`` holds 1-based atom
    indices of accepted draws. Bulk counterpart of
    :func:`sample_theta_posterior` for frequency checks.
    """
    if draws < 1:
        raise ValueError("need at least one draw")
    rng = as_generator(rng)
    alpha = as_alpha(alpha, spec.prior_b.size)
    counts = as_counts(counts, spec.prior_b.size)
    log_accept = _log_accept_ratios(spec, alpha, spec.tau)
    expected = _expected_accept_rate(spec, alpha, counts)
    shape = alpha + counts
    out = np.empty(draws, dtype=np.int64)
    got = 0
    proposals = 0
    while got < draws:
        m = min(batch, max(1024, 2 * (draws - got)))
        thetas = rng.dirichlet(shape, size=m)
        k, ties = classify_regions(thetas, spec.tau)
        accept = (np.log(rng.random(m)) <= log_accept[k - 1]) & ~ties
        proposals += m
        kept = k[accept]
        take = min(kept.size, draws - got)
        out[got:got + take] = kept[:take]
        got += take
        if proposals >= _STARVE_PROPOSALS and got / proposals < _STARVE_RATE:
            raise AcceptanceStarvation(
                f"acceptance rate {got / proposals:.2e} after {proposals} proposals; "
                "consider a flatter quantile prior"
            )
    stats = AcceptanceStats(proposals=proposals, accepted=got, expected_rate=expected)
    return out, stats


@dataclass(frozen=True)
class CheapPosterior:
    mean: float
    variance: float
    cdf: Callable[[float], float]


def cheap_posterior(sorted_data, spec: QuantileSpec) -> CheapPosterior:
    """Gaussian-kernel rank-weight approximation to the posterior.

    Valid for a no-ties sorted sample whose points carry the prior pmf;
    weights peak at the rank closest to the quantile level.
    """
    data = np.asarray(sorted_data, dtype=float)
    if data.ndim != 1 or data.size < 2:
        raise ValueError("need a 1-D sample with at least two points")
    if np.any(np.diff(data) <= 0):
        raise ValueError("data must be strictly increasing (no ties)")
    if data.size != spec.prior_b.size:
        raise ValueError("prior pmf must align with the data points")
    j = data.size
    tau = spec.tau
    ranks = np.arange(j, dtype=float)
    w = np.exp(-j * (ranks / (j - 1) - tau) ** 2 / (2.0 * tau * (1.0 - tau)))
    wstar = w * spec.prior_b
    wstar /= wstar.sum()
    mean = float(wstar @ data)
    variance = float(wstar @ (data - mean) ** 2)

    def cdf(x: float) -> float:
        return float(wstar[data <= x].sum())

    return CheapPosterior(mean=mean, variance=variance, cdf=cdf)
