"""Exception hierarchy shared across the package.

Everything raised on purpose derives from ExtcalcError so callers (and the
command line front end) can distinguish domain failures from genuine bugs.
"""

from __future__ import annotations


class ExtcalcError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(ExtcalcError):
    """Malformed input: bad JSON, unknown variety name, wrong schema."""


class ArityError(ExtcalcError):
    """A term or table does not fit the declared operation arities."""


class ValidationError(ExtcalcError):
    """A structural invariant failed: bad table, non-homomorphism, bad partition."""


class WitnessError(ExtcalcError):
    """A semi-abelian witness is missing or its identities fail."""


class EndpointMismatchError(ExtcalcError):
    """Two sequences that must share endpoint objects do not."""


class UnsupportedVarietyError(ExtcalcError):
    """The requested computation is not available for this variety."""


class LimitExceededError(ExtcalcError):
    """A carrier or search-node budget was exhausted before completion."""


class NotExactError(ValidationError):
    """A candidate (short) exact sequence fails exactness.

    ``position`` locates the failure: for short exact sequences it names the
    failing condition, for longer ones it is the 1-based index i of the map
    f_i at fault.
    """

    def __init__(self, message: str, position: int | str | None = None):
        super().__init__(message)
        self.position = position


class NotNormalError(NotExactError):
    """A map in a candidate exact sequence admits no normal image factorization."""
