"""Exception taxonomy shared across the package.

The CLI maps these onto its exit-code contract: ConfigError -> 2,
VerdictError -> 3, PrecisionError -> 4.
"""


class DetcoverError(Exception):
    pass


class ConfigError(DetcoverError):
    """Malformed configuration, scenario string, or out-of-range parameter."""


class VerdictError(DetcoverError):
    """A quantitative check that the run was required to satisfy failed."""


class PrecisionError(DetcoverError):
    """Requested numeric guarantee cannot be met at the working precision."""


class NearZeroOnBoundary(PrecisionError):
    """Contour integrand denominator dips below the safety threshold."""


class InconsistentCounts(PrecisionError):
    """Winding integrals disagree across boundary samples."""


class DomainError(DetcoverError):
    """Point or polydisc outside the domain of validity of a model."""
