"""Exception hierarchy for the toolkit.

Every failure a caller may want to report carries a ``details`` dict
that the CLI copies verbatim into the report payload.
"""

from typing import Any, Dict, Optional


class ChannelToolkitError(Exception):
    """Base class for all toolkit errors."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details: Dict[str, Any] = dict(details or {})

    def to_dict(self) -> Dict[str, Any]:
        return {
            'type': self.__class__.__name__,
            'message': self.message,
            'details': self.details,
        }


class DimensionMismatch(ChannelToolkitError, ValueError):
    """Operand shapes do not agree."""


class NotHermitian(ChannelToolkitError, ValueError):
    """Matrix fails the Hermiticity precondition."""


class NotPSD(ChannelToolkitError, ValueError):
    """Matrix has an eigenvalue below -eps_psd."""


class NotPSDInput(ChannelToolkitError, ValueError):
    """A channel component (state or effect) is not positive semidefinite."""


class NumericalFailure(ChannelToolkitError):
    """An underlying LAPACK routine did not converge."""


class NotCommutingFamily(ChannelToolkitError, ValueError):
    """A matrix family handed to joint diagonalization does not commute."""


class DiagonalizationFailure(ChannelToolkitError):
    """Joint diagonalization could not reach the off-diagonal bound."""


class BadWeights(ChannelToolkitError, ValueError):
    """Choi weights are not a strictly positive probability vector."""


class NotRankOne(ChannelToolkitError, ValueError):
    """A Kraus operator is not numerically rank one."""


class NotCommutativeRange(ChannelToolkitError, ValueError):
    """The channel range is not commutative."""


class CertificationFailure(ChannelToolkitError):
    """A constructed object violates one of its certified invariants."""


class NotSelfAdjoint(ChannelToolkitError, ValueError):
    """A subspace is not closed under the adjoint."""


class NotTraceZero(ChannelToolkitError, ValueError):
    """A subspace generator has nonzero trace."""


class NotProjection(ChannelToolkitError, ValueError):
    """Operator is not a Hermitian idempotent."""


class ParseError(ChannelToolkitError, ValueError):
    """Input file is malformed JSON or has the wrong shape."""


class ValidationError(ChannelToolkitError, ValueError):
    """Parsed channel file fails semantic validation."""


class IoError(ChannelToolkitError):
    """Input file cannot be read or output cannot be written."""
