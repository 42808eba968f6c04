"""Outcome supports, probability vectors and shared validation helpers."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

#: tolerance used to declare a cumulative sum tied with the quantile level
TIE_TOL = 1e-12

#: largest admissible sum of Dirichlet concentrations
ALPHA_SUM_MAX = 1e12


@dataclass(frozen=True)
class Support:
    """Sorted vector of distinct finite outcome values."""

    values: np.ndarray = field()

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 2:
            raise ValueError("support needs at least two points in a 1-D array")
        if not np.all(np.isfinite(vals)):
            raise ValueError("support values must be finite")
        if not np.all(np.diff(vals) > 0):
            raise ValueError("support values must be strictly increasing")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_range(cls, lo: float, hi: float, step: float = 1.0) -> "Support":
        if step <= 0 or hi <= lo:
            raise ValueError("need hi > lo and step > 0")
        count = int(round((hi - lo) / step)) + 1
        return cls(lo + step * np.arange(count))

    def __len__(self) -> int:
        return self.values.size

    @property
    def size(self) -> int:
        return self.values.size

    def index_of(self, value: float) -> int:
        """1-based position of ``value``, which must be a support point."""
        j = int(np.searchsorted(self.values, value))
        if j >= self.values.size or self.values[j] != value:
            raise ValueError(f"{value!r} is not a support point")
        return j + 1


def check_tau(tau: float) -> float:
    tau = float(tau)
    if not (0.0 < tau < 1.0) or not np.isfinite(tau):
        raise ValueError(f"quantile level must lie in (0,1), got {tau}")
    return tau


def as_simplex(theta, size: int | None = None, *, tol: float = 1e-8) -> np.ndarray:
    """Validate and exactly renormalize a probability vector."""
    theta = np.asarray(theta, dtype=float)
    if theta.ndim != 1:
        raise ValueError("probability vector must be 1-D")
    if size is not None and theta.size != size:
        raise ValueError(f"probability vector has length {theta.size}, expected {size}")
    if not np.all(np.isfinite(theta)) or np.any(theta < 0):
        raise ValueError("probabilities must be finite and nonnegative")
    total = theta.sum()
    if abs(total - 1.0) > tol:
        raise ValueError(f"probabilities sum to {total}, not 1")
    return theta / total


def is_interior(theta: np.ndarray) -> bool:
    return bool(np.all(theta > 0))


def as_counts(counts, size: int | None = None) -> np.ndarray:
    counts = np.asarray(counts)
    if counts.ndim != 1:
        raise ValueError("count vector must be 1-D")
    if size is not None and counts.size != size:
        raise ValueError(f"count vector has length {counts.size}, expected {size}")
    as_int = np.asarray(counts, dtype=np.int64)
    if np.any(np.asarray(counts, dtype=float) != as_int) or np.any(as_int < 0):
        raise ValueError("counts must be nonnegative integers")
    return as_int


def as_alpha(alpha, size: int | None = None) -> np.ndarray:
    alpha = np.asarray(alpha, dtype=float)
    if alpha.ndim != 1:
        raise ValueError("concentration vector must be 1-D")
    if size is not None and alpha.size != size:
        raise ValueError(f"concentration vector has length {alpha.size}, expected {size}")
    if not np.all(np.isfinite(alpha)) or np.any(alpha <= 0):
        raise ValueError("concentrations must be finite and strictly positive")
    total = alpha.sum()
    if total > ALPHA_SUM_MAX:
        raise ValueError(
            f"total concentration {total:g} exceeds the supported range {ALPHA_SUM_MAX:g}"
        )
    return alpha


# ---------------------------------------------------------------------------
# random-stream plumbing
# ---------------------------------------------------------------------------

def as_generator(rng) -> np.random.Generator:
    """Coerce a seed, SeedSequence or Generator into a Generator."""
    return np.random.default_rng(rng)


def master_entropy(rng) -> int:
    """Distill ``rng`` into one integer used to key derived streams."""
    if isinstance(rng, np.random.Generator):
        return int(rng.integers(0, 2**63 - 1))
    if isinstance(rng, np.random.SeedSequence):
        return int(rng.generate_state(1, np.uint64)[0])
    if rng is None:
        return int(np.random.SeedSequence().generate_state(1, np.uint64)[0])
    return int(rng)


def stable_tag(tag) -> int:
    """Deterministic 63-bit integer for a string or integer tag."""
    if isinstance(tag, (int, np.integer)):
        return int(tag) & (2**63 - 1)
    digest = hashlib.sha256(str(tag).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") & (2**63 - 1)


def tagged_stream(master: int, *tags) -> np.random.Generator:
    """Independent stream keyed by ``master`` entropy plus stable tags.

    Streams depend only on the tag values, not on call order, so e.g.
    per-group streams are invariant under reordering of the groups.
    """
    entropy = [int(master) & (2**63 - 1)] + [stable_tag(t) for t in tags]
    return np.random.default_rng(np.random.SeedSequence(entropy))
