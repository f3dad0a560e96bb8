"""Exception hierarchy shared across the package.

Every error carries a human-readable message with the measured deviation,
so callers (and the CLI) can surface exactly which contract was violated.
"""


class HqcError(Exception):
    """Base class for all package-specific errors."""


class NotHermitian(HqcError):
    """Matrix is not Hermitian within tolerance."""


class TraceNotOne(HqcError):
    """Matrix trace differs from one beyond tolerance."""


class NotPositive(HqcError):
    """Matrix has an eigenvalue below the positivity tolerance."""


class ZeroProbability(HqcError):
    """A steering outcome has (numerically) zero probability."""


class ZeroSuccessProbability(HqcError):
    """A filtering operation annihilates the state's support."""


class DegenerateEllipsoid(HqcError):
    """Operation requires an invertible ellipsoid matrix."""


class ComplexSpectrum(HqcError):
    """Correlation-spectrum eigenvalues are not real; input is unphysical."""


class DegenerateNormalForm(HqcError):
    """Leading normal-form eigenvalue vanishes; hidden measures undefined."""


class DomainError(HqcError):
    """Argument outside its documented domain."""


class ParseError(HqcError):
    """Input file does not match the expected schema."""
