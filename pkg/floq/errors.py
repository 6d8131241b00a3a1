# SPDX-License-Identifier: GPL-3.0+

"""
Errors
------

All exceptions raised by floq derive from :class:`FloqError`. Invalid input
raises :class:`ValidationError`; failures of the numerics raise
:class:`NumericalError` or one of its subclasses.
"""

import copy
from typing import Optional


__all__ = (
    "DegeneracyError",
    "EigenError",
    "FloqError",
    "NumericalError",
    "ValidationError",
    "with_context",
)


class FloqError(Exception):
    """Base class for floq errors."""


class ValidationError(FloqError, ValueError):
    """
    Invalid parameters, configuration, or preconditions.

    :ivar field: Name of the offending parameter, or ``None``.
    """

    def __init__(self, message: str, field: Optional[str] = None) -> None:
        super().__init__(message)
        self.field = field


class NumericalError(FloqError, ArithmeticError):
    """The integrator or a solver produced an unusable result."""


class EigenError(NumericalError):
    """
    The eigensolver did not converge or its residual check failed.

    :ivar iterations: Iteration count reported by the solver, if known.
    """

    def __init__(self, message: str, iterations: Optional[int] = None) -> None:
        super().__init__(message)
        self.iterations = iterations


class DegeneracyError(NumericalError):
    """A degenerate (critically damped) system has no complete set of modes."""


def with_context(error: FloqError, context: str) -> FloqError:
    """
    Return a copy of ``error`` whose message is prefixed with ``context``.
    Attributes such as :attr:`ValidationError.field` are kept.
    """
    annotated = copy.copy(error)
    annotated.args = (f"{context}: {error}",)
    return annotated
