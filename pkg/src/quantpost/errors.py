"""Exception types shared across the package."""


class QuantPostError(Exception):
    """Base class for package-specific failures."""


class NonUniqueQuantile(QuantPostError):
    """A cumulative probability landed exactly on the quantile level.

    This is a measure-zero boundary event for continuously distributed
    probability vectors; samplers treat it as a resample trigger.
    """


class AcceptanceStarvation(QuantPostError):
    """A rejection sampler exhausted its proposal budget."""


class RegionMassError(QuantPostError):
    """Conditioning on a region whose probability is numerically zero."""


class NumericInstabilityError(QuantPostError):
    """A numerical routine detected an unstable or inconsistent result."""
