"""Exact samplers for truncated Beta laws and region-truncated Dirichlets.

Four rejection schemes cover every (shape, interval) configuration of the
truncated Beta after at most one reflection ``Beta(a,b) = 1 - Beta(b,a)``;
each pairs an inverse-CDF proposal with an acceptance ratio bounded by 1.
On top of these, a Dirichlet conditioned on "the quantile sits on atom k"
is drawn exactly: three-atom problems directly, larger ones by Dirichlet
aggregation around the pivot atom.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .betainc import log1mexp, log_beta, log_betainc
from .errors import AcceptanceStarvation, NumericInstabilityError, RegionMassError
from .quantile import region_contains
from .support import as_alpha, as_generator, check_tau

_PROPOSAL_CAP = 1_000_000
_ASSEMBLY_RETRIES = 1000
_REGION_MASS_FLOOR = 1e-12


@dataclass(frozen=True)
class TruncatedBetaParams:
    """Beta(a, b) restricted to (L, U); (0, 1) degenerates to untruncated."""

    a: float
    b: float
    L: float = 0.0
    U: float = 1.0

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError("shape parameters must be positive")
        if not (0.0 <= self.L < self.U <= 1.0):
            raise ValueError("need 0 <= L < U <= 1")


class SamplingRoute(NamedTuple):
    case: int        # 0 = untruncated, 1..4 = rejection scheme
    reflected: bool  # whether the draw happens on the mirrored problem
    naive: bool      # cases 3/4: plain Beta draws filtered to (L, U)


def _case3_prefers_naive(a: float, b: float, L: float, U: float) -> bool:
    # efficiency ratio of the tailored scheme relative to naive filtering
    log_tail_diff = b * np.log1p(-L) + log1mexp(b * (np.log1p(-U) - np.log1p(-L)))
    log_ratio = np.log(b) + log_beta(a, b) - (a - 1.0) * np.log(U) - log_tail_diff
    return bool(log_ratio <= 0.0)


def classify_case(params: TruncatedBetaParams) -> SamplingRoute:
    """Decide which rejection scheme serves the given configuration."""
    a, b, L, U = params.a, params.b, params.L, params.U
    if L == 0.0 and U == 1.0:
        return SamplingRoute(0, False, False)
    if a <= 1.0 and b <= 1.0:
        # both powers flat or decaying toward the interior
        return SamplingRoute(1, not U < 1.0, False)
    if a <= 1.0 < b:
        if L > 0.0:
            return SamplingRoute(2, False, False)
        return SamplingRoute(3, True, _case3_prefers_naive(b, a, 1.0 - U, 1.0 - L))
    if b <= 1.0 < a:
        return SamplingRoute(3, False, _case3_prefers_naive(a, b, L, U))
    mode = a / (a + b)
    if mode < U:
        return SamplingRoute(4, False, L <= mode)
    return SamplingRoute(4, True, (1.0 - U) <= b / (a + b))


def _case1_batch(a, b, L, U, m, rng):
    # exponential-in-log proposal with density ~ a e^{a z} on (log L, log U)
    u = rng.random(m)
    v = rng.random(m)
    la, ua = L**a, U**a
    theta = np.exp(np.log(la + (ua - la) * u) / a)
    log_acc = (b - 1.0) * (np.log1p(-theta) - np.log1p(-U))
    return theta[np.log(v) <= log_acc]


def _tail_power_proposal(b, L, U, u):
    # inverse CDF of the density ~ (1-theta)^(b-1) on (L, U)
    o_l = (1.0 - L) ** b
    o_u = (1.0 - U) ** b
    return 1.0 - (o_l - (o_l - o_u) * u) ** (1.0 / b)


def _case2_batch(a, b, L, U, m, rng):
    u = rng.random(m)
    v = rng.random(m)
    theta = _tail_power_proposal(b, L, U, u)
    log_acc = (a - 1.0) * (np.log(theta) - np.log(L))
    return theta[np.log(v) <= log_acc]


def _case3_batch(a, b, L, U, m, rng):
    u = rng.random(m)
    v = rng.random(m)
    theta = _tail_power_proposal(b, L, U, u)
    with np.errstate(divide="ignore"):
        log_acc = (a - 1.0) * (np.log(theta) - np.log(U))
    return theta[np.log(v) <= log_acc]


def _case4_batch(a, b, L, U, m, rng):
    u = rng.random(m)
    v = rng.random(m)
    lam = ((b - 1.0) * L - (a - 1.0) * (1.0 - L)) / (L * (1.0 - L))
    if lam > 1e-12:
        w = -np.expm1(-lam * (U - L))
        theta = L - np.log1p(-w * u) / lam
        shift = lam * (theta - L)
    else:
        # boundary sits on the mode: density flat enough for a uniform proposal
        theta = L + (U - L) * u
        shift = 0.0
    log_acc = (
        (a - 1.0) * (np.log(theta) - np.log(L))
        + (b - 1.0) * (np.log1p(-theta) - np.log1p(-L))
        + shift
    )
    return theta[np.log(v) <= log_acc]


def _naive_batch(a, b, L, U, m, rng):
    theta = rng.beta(a, b, m)
    return theta[(theta >= L) & (theta <= U)]


def sample_truncated_beta(params: TruncatedBetaParams, rng, size: int | None = None):
    """Exact draw(s) from a Beta law restricted to an interval.

    Scalar for ``size=None``, otherwise an array of length ``size``.
    """
    rng = as_generator(rng)
    n = 1 if size is None else int(size)
    if n < 1:
        raise ValueError("size must be positive")
    route = classify_case(params)
    a, b, L, U = params.a, params.b, params.L, params.U
    if route.case == 0:
        draws = rng.beta(a, b, n)
        return float(draws[0]) if size is None else draws
    if route.reflected:
        a, b, L, U = b, a, 1.0 - U, 1.0 - L

    if route.naive:
        kernel = _naive_batch
    else:
        kernel = {1: _case1_batch, 2: _case2_batch, 3: _case3_batch, 4: _case4_batch}[route.case]

    out = np.empty(n)
    got = 0
    proposals = 0
    while got < n:
        m = min(max(1024, 2 * (n - got)), 1 << 18)
        accepted = kernel(a, b, L, U, m, rng)
        proposals += m
        take = min(accepted.size, n - got)
        out[got:got + take] = accepted[:take]
        got += take
        if got < n and proposals >= _PROPOSAL_CAP:
            raise AcceptanceStarvation(
                f"truncated Beta case {route.case}"
                f"{' (naive filter)' if route.naive else ''} accepted {got}/{n} draws "
                f"in {proposals} proposals for a={params.a:g}, b={params.b:g}, "
                f"interval=({params.L:g},{params.U:g})"
            )
    if route.reflected:
        out = 1.0 - out
    return float(out[0]) if size is None else out


@dataclass(frozen=True)
class TruncatedDirichletSpec:
    """Dirichlet(alpha) conditioned on the quantile sitting on atom ``region``."""

    alpha: np.ndarray = field()
    region: int = 1
    tau: float = 0.5

    def __post_init__(self):
        alpha = as_alpha(self.alpha)
        if not 1 <= int(self.region) <= alpha.size:
            raise ValueError(f"region {self.region} outside 1..{alpha.size}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "region", int(self.region))
        object.__setattr__(self, "tau", check_tau(self.tau))


def _log_region_mass(alpha: np.ndarray, k: int, tau: float) -> float:
    """log probability of region ``k`` from its two boundary CDF values."""
    partial = np.cumsum(alpha)
    total = partial[-1]
    j = alpha.size

    def log_cdf(i: int) -> float:
        if i == 0:
            return 0.0
        if i == j:
            return -np.inf
        return float(log_betainc(partial[i - 1], total - partial[i - 1], tau))

    hi = log_cdf(k - 1)
    lo = log_cdf(k)
    if lo == -np.inf:
        return hi
    if hi <= lo:
        return -np.inf
    return lo + float(np.log(np.expm1(min(hi - lo, 700.0))))


def _check_region_mass(alpha: np.ndarray, k: int, tau: float) -> None:
    if _log_region_mass(alpha, k, tau) < np.log(_REGION_MASS_FLOOR):
        raise RegionMassError(
            f"region {k} carries probability below {_REGION_MASS_FLOOR:g}; "
            "conditioning on it is numerically meaningless"
        )


def _assemble(parts) -> np.ndarray:
    theta = np.concatenate([np.atleast_1d(np.asarray(p, dtype=float)) for p in parts])
    return theta


def sample_constrained_dirichlet3(spec: TruncatedDirichletSpec, rng) -> np.ndarray:
    """Exact draw from a three-atom Dirichlet restricted to one quantile region."""
    alpha = spec.alpha
    if alpha.size != 3:
        raise ValueError("this sampler is specific to three atoms")
    rng = as_generator(rng)
    k, tau = spec.region, spec.tau
    a1, a2, a3 = alpha
    _check_region_mass(alpha, k, tau)

    for _ in range(_ASSEMBLY_RETRIES):
        if k == 1:
            t1 = sample_truncated_beta(TruncatedBetaParams(a1, a2 + a3, tau, 1.0), rng)
            t2 = (1.0 - t1) * rng.beta(a2, a3)
            theta = np.array([t1, t2, 1.0 - t1 - t2])
        elif k == 3:
            t3 = sample_truncated_beta(TruncatedBetaParams(a3, a1 + a2, 1.0 - tau, 1.0), rng)
            t1 = (1.0 - t3) * rng.beta(a1, a2)
            theta = np.array([t1, 1.0 - t1 - t3, t3])
        else:
            t1 = _middle_region_first_coord(a1, a2, a3, tau, rng)
            cut = (tau - t1) / (1.0 - t1)
            t2 = (1.0 - t1) * sample_truncated_beta(
                TruncatedBetaParams(a2, a3, cut, 1.0), rng
            )
            theta = np.array([t1, t2, 1.0 - t1 - t2])
        if theta[-1] > 0.0 and region_contains(theta, k, tau):
            return theta
    raise NumericInstabilityError(
        f"could not assemble an interior draw for region {k} after "
        f"{_ASSEMBLY_RETRIES} attempts"
    )


def _middle_region_first_coord(a1: float, a2: float, a3: float, tau: float, rng) -> float:
    """First coordinate's marginal on the middle region, by rejection.

    Proposes from Beta(a1, a2+a3) restricted below ``tau`` and accepts
    with the probability that the remaining mass pushes the second
    cumulative sum past ``tau`` — a probability, hence a valid acceptance
    weight with envelope 1.
    """
    proposals = 0
    while True:
        m = 64
        t1 = sample_truncated_beta(TruncatedBetaParams(a1, a2 + a3, 0.0, tau), rng, size=m)
        cut = (tau - t1) / (1.0 - t1)
        accept_p = -np.expm1(log_betainc(a2, a3, cut))
        u = rng.random(m)
        hits = np.nonzero(u <= accept_p)[0]
        proposals += m
        if hits.size:
            return float(t1[hits[0]])
        if proposals >= _PROPOSAL_CAP:
            raise AcceptanceStarvation(
                "middle-region marginal rejection starved; the region mass "
                "is too small for this construction"
            )


def sample_constrained_dirichlet(spec: TruncatedDirichletSpec, rng) -> np.ndarray:
    """Exact draw from a Dirichlet restricted to one quantile region.

    Aggregates the atoms around the pivot into a three-atom problem and
    splits the aggregated masses with independent Dirichlet draws, which
    reproduces the full conditional law exactly.
    """
    alpha = spec.alpha
    j = alpha.size
    k, tau = spec.region, spec.tau
    rng = as_generator(rng)

    if j == 2:
        _check_region_mass(alpha, k, tau)
        lo, hi = (tau, 1.0) if k == 1 else (0.0, tau)
        t1 = sample_truncated_beta(TruncatedBetaParams(alpha[0], alpha[1], lo, hi), rng)
        return np.array([t1, 1.0 - t1])
    if j == 3:
        return sample_constrained_dirichlet3(spec, rng)

    _check_region_mass(alpha, k, tau)

    def split(mass: float, block: np.ndarray) -> np.ndarray:
        if block.size == 1:
            return np.array([mass])
        return mass * rng.dirichlet(block)

    for _ in range(_ASSEMBLY_RETRIES):
        if k == 1:
            agg = TruncatedDirichletSpec(
                np.array([alpha[0], alpha[1:-1].sum(), alpha[-1]]), 1, tau
            )
            t1, mid, t_last = sample_constrained_dirichlet3(agg, rng)
            theta = _assemble([[t1], split(mid, alpha[1:-1]), [t_last]])
        elif k == j:
            agg = TruncatedDirichletSpec(
                np.array([alpha[:-2].sum(), alpha[-2], alpha[-1]]), 3, tau
            )
            front, t_m, t_last = sample_constrained_dirichlet3(agg, rng)
            theta = _assemble([split(front, alpha[:-2]), [t_m], [t_last]])
        else:
            agg = TruncatedDirichletSpec(
                np.array([alpha[: k - 1].sum(), alpha[k - 1], alpha[k:].sum()]), 2, tau
            )
            s1, t_k, s2 = sample_constrained_dirichlet3(agg, rng)
            theta = _assemble([split(s1, alpha[: k - 1]), [t_k], split(s2, alpha[k:])])
        if np.all(theta >= 0.0) and region_contains(theta, k, tau):
            return theta
    raise NumericInstabilityError(
        f"could not assemble an interior draw for region {k} after "
        f"{_ASSEMBLY_RETRIES} attempts"
    )
