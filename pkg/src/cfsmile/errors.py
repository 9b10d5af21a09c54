"""Error taxonomy shared by all modules.

Every public operation maps each failure mode to exactly one error kind.
"""

from __future__ import annotations


class NumericsError(Exception):
    """Base class for all library errors; carries a ``kind`` tag."""

    kind: str = "NumericsError"

    def __init__(self, detail: str = ""):
        self.detail = detail
        super().__init__(f"{self.kind}: {detail}" if detail else self.kind)


class DomainViolation(NumericsError):
    """Input outside the mathematical domain of an operation."""

    kind = "DomainViolation"


class NonConvergence(NumericsError):
    """An iterative or quadrature scheme failed to meet its tolerance."""

    kind = "NonConvergence"


class ContourViolation(NumericsError):
    """Evaluation outside an analyticity strip or across a branch cut."""

    kind = "ContourViolation"


class MartingaleViolation(NumericsError):
    """A model's exponent fails the martingale check phi(t, -i) = 0."""

    kind = "MartingaleViolation"


class FitFailure(NumericsError):
    """A least-squares fit failed on all attempted starting points."""

    kind = "FitFailure"


class IoFailure(NumericsError):
    """Malformed or missing input files."""

    kind = "IoFailure"
