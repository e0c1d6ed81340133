"""
Exceptions raised by the mapping core.

Every error names the computation stage that failed so the command line can
report it, e.g. ``solve_e: no sign change on [1.25, 3.375]``.
"""


class ConformalMapError(Exception):
    """Base class for all mapping errors."""

    stage: str = "core"

    def __init__(self, message: str, stage: str | None = None) -> None:
        super().__init__(message)
        if stage is not None:
            self.stage = stage

    def describe(self) -> str:
        return f"{type(self).__name__} [{self.stage}]: {self}"


class PoleInputError(ConformalMapError):
    """Evaluation requested at (or numerically next to) the preimage of infinity."""

    stage = "bilinear"


class DomainViolationError(ConformalMapError):
    """Point lies outside the domain where the map is defined."""

    stage = "outer_map"


class OverlappingCirclesError(ConformalMapError):
    """The w-plane circles violate e > 1 + r1."""

    stage = "bilinear"


class BadShapeError(ConformalMapError):
    """Shape parameters out of range, or the Laurent map is not conformal on |w| > 1."""

    stage = "outer_map"


class NoRootError(ConformalMapError):
    stage = "solve_e"


class NonConvergenceError(ConformalMapError):
    stage = "solve_e"


class DegenerateDerivativeError(ConformalMapError):
    """F'(e) vanishes, so r1 cannot be recovered from R."""

    stage = "solve_r1"


class WrongFamilyError(ConformalMapError):
    stage = "discrepancy"


class InconsistentSolutionError(ConformalMapError):
    """A solver output failed its own substitution check."""

    stage = "bilinear"


class NonRealTargetError(ConformalMapError):
    """Hole centre off the real axis; e is real so only real h is reachable."""

    stage = "composite"
