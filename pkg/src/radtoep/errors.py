"""Exception hierarchy shared by all radtoep modules.

The distinction between the classes matters for the CLI exit-code
taxonomy: validation problems (bad parameters, short windows, malformed
files) are reported differently from numerical non-convergence and from
internal invariant violations.
"""

from __future__ import annotations


class RadtoepError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(RadtoepError, ValueError):
    """A parameter is outside its documented domain (e.g. eps <= 0)."""


class WindowError(RadtoepError, ValueError):
    """A sequence window is too short or an index is out of range."""


class ToleranceError(RadtoepError, RuntimeError):
    """A numerical routine could not reach the requested tolerance.

    Carries the best estimate achieved so callers can inspect it.
    """

    def __init__(self, message: str, achieved=None, estimate=None):
        super().__init__(message)
        self.achieved = achieved
        self.estimate = estimate


class InvariantError(RadtoepError, RuntimeError):
    """An internal invariant that should be provably true was violated.

    Raised e.g. when the feasible interval of the second-difference
    projection comes out empty, which the constraint analysis rules out.
    """
