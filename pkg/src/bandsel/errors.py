"""Exception hierarchy shared across the toolkit.

The CLI maps these onto distinct exit codes: validation problems exit
with 2, infeasible requests with 3, and container/file problems with 4.
"""


class BandselError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(BandselError):
    """An input value or combination of values violates a precondition."""


class InfeasibleError(BandselError):
    """The request cannot be satisfied by the data (e.g. too few candidate bands)."""


class ContainerError(BandselError):
    """A container file is missing, malformed, or inconsistent."""
