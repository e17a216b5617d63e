"""Exception hierarchy.

Every error carries a machine-readable payload so the command line can turn
it into an error JSON document.
"""

from __future__ import annotations

from typing import Any


class RelshockError(Exception):
    """Base class; ``details`` holds JSON-serialisable context."""

    exit_code = 1

    def __init__(self, message: str, **details: Any) -> None:
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> dict[str, Any]:
        return {"error": type(self).__name__, "message": self.message, **self.details}


class DomainError(RelshockError):
    """An EOS or state evaluation left its admissible domain."""


class OutOfRangeError(DomainError):
    """A tabulated inverse was asked for a value it does not bracket."""


class HyperbolicityError(DomainError):
    """The sound speed left (0, 1] or the state left the hyperbolic regime."""


class DegenerateFrameError(DomainError):
    """The null frame cannot be formed because |u1/u0| c >= 1."""


class IntegrationFailure(RelshockError):
    """An ODE or quadrature step controller did not converge."""


class ConfigError(RelshockError):
    """A scenario or EOS configuration file is malformed."""

    exit_code = 2


class SeedViolation(RelshockError):
    """Base class for seed-profile admissibility failures."""

    exit_code = 2

    def __init__(self, message: str, location: float, margin: float, **details: Any) -> None:
        super().__init__(message, location=float(location), margin=float(margin), **details)
        self.location = float(location)
        self.margin = float(margin)


class ViolatedSupport(SeedViolation):
    pass


class ViolatedMinimum(SeedViolation):
    pass


class ViolatedThirdDerivative(SeedViolation):
    pass


class ViolatedTail(SeedViolation):
    pass


class NonDegeneracyFailure(RelshockError):
    """No amplitude in the search range keeps the data admissible."""


class SearchExhausted(RelshockError):
    """No certified half-width for the interesting region was found."""


class AtSingularity(RelshockError):
    """Evaluation requested on the singular curve where 1 + tG = 0."""


class OutOfCertifiedRegion(RelshockError):
    pass


class PositiveG(RelshockError):
    pass


class MultipleCreasePoints(RelshockError):
    pass


class CreaseDegeneracy(RelshockError):
    pass


class NotInImage(RelshockError):
    """A rectangular point has no preimage in the admissible region."""


class CflViolation(RelshockError):
    pass


class ResolutionExhausted(RelshockError):
    pass


class NonMonotoneLadder(RelshockError):
    pass


class NotTimelike(RelshockError):
    pass


class StencilOutOfBounds(RelshockError):
    pass


class MissingThermoCallback(RelshockError):
    pass
